#pragma once

#include <optional>
#include <string>
#include <vector>

#include "guiflow/model.hpp"

namespace guiflow {

// Swipe displacement as a fraction of the element extent along the scroll
// axis. Quarter-extent reproduces the reference gesture geometry.
inline constexpr double kDefaultSwipeFrac = 0.25;

enum class GestureKind { Tap, Swipe, TypeAt };

// Concrete screen gesture an abstract action aligns to.
struct AlignedGesture {
  GestureKind kind = GestureKind::Tap;
  Point start;
  std::optional<Point> end;         // Swipe only
  std::optional<std::string> text;  // TypeAt only
  friend bool operator==(const AlignedGesture&, const AlignedGesture&) = default;
};

// Parse a UIAutomator-style XML dump into elements, document order. Nodes
// without a bounds attribute are skipped silently (layout scaffolding); nodes
// with a malformed bounds attribute are skipped and reported via `warnings`
// when given. Throws MalformedXmlError if the document does not parse.
std::vector<Element> parse_page_xml(const std::string& xml,
                                    const ScreenSize& screen,
                                    std::vector<std::string>* warnings = nullptr);

// Candidate action space of a page: per element in document order, a Click if
// clickable, four Scrolls (up, down, left, right) if scrollable, an Input
// with an unbound text slot if inputtable; Complete always comes last.
std::vector<Action> enumerate_action_space(const GuiPage& page);

// |space| without materializing it.
std::size_t action_space_size(const GuiPage& page);

// Map an abstract action to its gesture: Click -> Tap at the element center,
// Input -> TypeAt at the center, Scroll -> Swipe from the center along the
// scroll axis by floor(swipe_frac * extent). Throws NotAlignableError for
// Complete.
AlignedGesture align_action(const Action& a, const ScreenSize& screen,
                            double swipe_frac = kDefaultSwipeFrac);

// Membership test against the enumerated space, matching by target identity
// (Input text is a free slot; Complete always belongs).
bool action_in_space(const Action& a, const GuiPage& page);

}  // namespace guiflow
