#include "guiflow/action_space.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "guiflow/errors.hpp"

namespace guiflow {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool attr_true(const boost::property_tree::ptree& node, const std::string& key) {
  return node.get<std::string>("<xmlattr>." + key, "") == "true";
}

std::string attr(const boost::property_tree::ptree& node, const std::string& key) {
  return node.get<std::string>("<xmlattr>." + key, "");
}

bool parse_bounds(const std::string& s, BoundingBox* out) {
  BoundingBox b;
  int consumed = 0;
  if (std::sscanf(s.c_str(), "[%d,%d][%d,%d]%n", &b.x1, &b.y1, &b.x2, &b.y2,
                  &consumed) != 4)
    return false;
  if (static_cast<std::size_t>(consumed) != s.size()) return false;
  if (!bbox_valid(b)) return false;
  *out = b;
  return true;
}

void walk(const boost::property_tree::ptree& node, const std::string& path,
          const ScreenSize& screen, std::vector<Element>* out,
          std::vector<std::string>* warnings) {
  std::size_t child_index = 0;
  for (const auto& [key, child] : node) {
    if (key == "<xmlattr>" || key == "<xmltext>" || key == "<xmlcomment>")
      continue;
    std::string child_path = path + "/" + key + "[" + std::to_string(child_index) + "]";
    ++child_index;

    std::string bounds_attr = attr(child, "bounds");
    if (!bounds_attr.empty()) {
      BoundingBox b;
      if (!parse_bounds(bounds_attr, &b)) {
        if (warnings)
          warnings->push_back("malformed bounds at " + child_path + ": " +
                              bounds_attr);
      } else {
        Element e;
        e.id = attr(child, "resource-id");
        if (e.id.empty()) e.id = child_path;
        e.name = attr(child, "text");
        if (e.name.empty()) e.name = attr(child, "content-desc");
        e.bounds = bbox_clamp(b, screen);

        std::string cls = lower(attr(child, "class"));
        bool editable = attr_true(child, "editable") ||
                        cls.find("edittext") != std::string::npos ||
                        cls.find("input") != std::string::npos;
        e.inputtable = editable;
        e.scrollable = attr_true(child, "scrollable");
        // Inputtable elements take clicks too unless the dump says otherwise.
        if (editable)
          e.clickable = attr(child, "clickable") != "false";
        else
          e.clickable = attr_true(child, "clickable");
        out->push_back(std::move(e));
      }
    }
    walk(child, child_path, screen, out, warnings);
  }
}

}  // namespace

std::vector<Element> parse_page_xml(const std::string& xml,
                                    const ScreenSize& screen,
                                    std::vector<std::string>* warnings) {
  boost::property_tree::ptree tree;
  std::istringstream in(xml);
  try {
    boost::property_tree::read_xml(in, tree);
  } catch (const boost::property_tree::xml_parser_error& e) {
    throw MalformedXmlError(std::string("page xml does not parse: ") + e.what());
  }
  std::vector<Element> elements;
  walk(tree, "", screen, &elements, warnings);
  return elements;
}

std::vector<Action> enumerate_action_space(const GuiPage& page) {
  std::vector<Action> space;
  for (const Element& e : page.elements) {
    if (e.clickable) space.push_back(Action::click(e.name, e.bounds));
    if (e.scrollable)
      for (auto d : {ScrollDirection::Up, ScrollDirection::Down,
                     ScrollDirection::Left, ScrollDirection::Right})
        space.push_back(Action::scroll(e.name, e.bounds, d));
    if (e.inputtable) space.push_back(Action::input(e.name, e.bounds, ""));
  }
  space.push_back(Action::complete());
  return space;
}

std::size_t action_space_size(const GuiPage& page) {
  std::size_t n = 1;  // Complete
  for (const Element& e : page.elements) {
    if (e.clickable) ++n;
    if (e.scrollable) n += 4;
    if (e.inputtable) ++n;
  }
  return n;
}

AlignedGesture align_action(const Action& a, const ScreenSize& screen,
                            double swipe_frac) {
  (void)screen;  // bounds are clamped at parse time
  if (a.kind == ActionKind::Complete)
    throw NotAlignableError("complete has no screen gesture");
  if (!bbox_valid(a.bounds))
    throw DataError("cannot align action with invalid bounds " +
                    bbox_to_string(a.bounds));

  const Point c = bbox_center(a.bounds);
  AlignedGesture g;
  g.start = c;
  switch (a.kind) {
    case ActionKind::Click:
      g.kind = GestureKind::Tap;
      return g;
    case ActionKind::Input:
      g.kind = GestureKind::TypeAt;
      g.text = a.input_text.value_or("");
      return g;
    case ActionKind::Scroll: {
      g.kind = GestureKind::Swipe;
      const int dx = static_cast<int>(std::floor(swipe_frac * bbox_width(a.bounds)));
      const int dy = static_cast<int>(std::floor(swipe_frac * bbox_height(a.bounds)));
      Point end = c;
      switch (*a.direction) {
        case ScrollDirection::Left: end.x -= dx; break;
        case ScrollDirection::Right: end.x += dx; break;
        case ScrollDirection::Up: end.y -= dy; break;
        case ScrollDirection::Down: end.y += dy; break;
      }
      g.end = end;
      return g;
    }
    case ActionKind::Complete: break;
  }
  throw Error("unreachable action kind");
}

bool action_in_space(const Action& a, const GuiPage& page) {
  if (a.kind == ActionKind::Complete) return true;
  for (const Element& e : page.elements) {
    if (e.bounds != a.bounds || e.name != a.element_name) continue;
    switch (a.kind) {
      case ActionKind::Click:
        if (e.clickable) return true;
        break;
      case ActionKind::Scroll:
        if (e.scrollable && a.direction.has_value()) return true;
        break;
      case ActionKind::Input:
        if (e.inputtable) return true;
        break;
      case ActionKind::Complete:
        return true;
    }
  }
  return false;
}

}  // namespace guiflow
