#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "guiflow/model.hpp"

namespace guiflow::testing {

// One XML element line. `extra` carries raw attributes, e.g. clickable="true".
std::string node(const std::string& text, const std::string& bounds,
                 const std::string& extra);

// Page from an XML body (wrapped in a hierarchy root), elements parsed.
GuiPage make_page(const std::string& id, const std::string& body,
                  ScreenSize screen = ScreenSize{720, 1280});

// Nine-page storefront walkthrough: search for a phone, open it, add it to
// the cart, pick a color, confirm. Ships with the annotated 8-step
// descriptions and exercises every extraction rule exactly once.
GuiGraph storefront_graph();
GuiFlow storefront_flow();

// Names the storefront registry must treat as already assigned so only the
// new ones produce reaching subtasks.
std::vector<std::string> storefront_known_names();

// Extractor seed whose first two template draws yield "Visit the {text}
// page." and "Help me navigate to {text} interface." in that order.
inline constexpr std::uint64_t kStorefrontTemplateSeed = 3302;

// Eight-page graph with one start page fanning out into a shortest route, a
// detour route, and a dead end; completion = reach M then reach G. Gives all
// four reward levels something to land on.
GuiGraph reward_graph();

// Start page with two disjoint routes to the goal; gold flows take route A,
// alternates take route B.
GuiGraph two_route_graph();
GuiFlow two_route_gold_flow();

// Random synthetic page: up to six elements with independently drawn
// capability flags. Capability counts are returned so tests can check the
// enumeration law against what the generator intended, not what the parser
// produced.
struct PageIntent {
  GuiPage page;
  int clickable = 0;
  int scrollable = 0;
  int inputtable = 0;
};
PageIntent random_page(std::mt19937_64& rng, const std::string& id);

// Random graph of up to `max_pages` pages whose edge actions are always
// drawn from the source page's enumerated space; Input edges get a text from
// a small pool so text-mismatch cases occur.
GuiGraph random_graph(std::mt19937_64& rng, int max_pages);

// Random walk along edges, length in [min_steps, max_steps] when possible;
// returns an empty flow (no steps, empty terminal) if the start is a dead
// end.
GuiFlow random_walk_flow(const GuiGraph& g, std::mt19937_64& rng,
                         int min_steps, int max_steps);

}  // namespace guiflow::testing
