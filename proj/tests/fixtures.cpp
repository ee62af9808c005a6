#include "fixtures.hpp"

#include <stdexcept>

#include "guiflow/action_space.hpp"

namespace guiflow::testing {

std::string node(const std::string& text, const std::string& bounds,
                 const std::string& extra) {
  std::string out = "<node text=\"" + text + "\" bounds=\"" + bounds + "\"";
  if (!extra.empty()) out += " " + extra;
  return out + " />";
}

GuiPage make_page(const std::string& id, const std::string& body,
                  ScreenSize screen) {
  GuiPage p;
  p.page_id = id;
  p.screen = screen;
  p.xml = "<hierarchy>" + body + "</hierarchy>";
  p.elements = parse_page_xml(p.xml, p.screen, nullptr);
  return p;
}

namespace {

const char* kClick = "clickable=\"true\"";

// The parameter sheet shared by the last two storefront pages. The selected
// color chip widens on the confirm page; everything else keeps its
// signature, leaving 9 of 11 distinct elements in common.
std::string parameter_sheet(const std::string& white_bounds) {
  return node("Xiaomi 14", "[24,480][340,530]", "") +
         node("3999", "[24,540][200,580]", "") +
         node("black", "[24,693][120,722]", kClick) +
         node("blue", "[130,693][178,722]", kClick) +
         node("white", white_bounds, kClick) +
         node("256GB", "[24,760][120,790]", kClick) +
         node("512GB", "[130,760][226,790]", kClick) +
         node("quantity 1", "[24,850][120,880]", "") +
         node("OK", "[333,1121][387,1153]", kClick) +
         node("Cancel", "[24,1121][120,1153]", kClick);
}

}  // namespace

GuiGraph storefront_graph() {
  GuiGraph g;

  g.add_page(make_page(
      "P1", node("search", "[177,96][273,168]", kClick) +
                node("New season sale", "[0,200][720,560]", "") +
                node("Home", "[0,1200][180,1280]", kClick) +
                node("Category", "[180,1200][360,1280]", kClick) +
                node("Cart", "[360,1200][540,1280]", kClick) +
                node("Me", "[540,1200][720,1280]", kClick)));
  g.add_page(make_page(
      "P2", node("water purifier", "[231,72][555,168]",
                 "class=\"android.widget.EditText\" clickable=\"true\"") +
                node("Back", "[24,72][96,168]", kClick) +
                node("hot: earbuds", "[24,240][240,300]", kClick) +
                node("hot: router", "[260,240][476,300]", kClick)));
  g.add_page(make_page(
      "P3", node("xiaomi 14", "[24,72][555,168]", "") +
                node("search", "[597,48][702,192]", kClick) +
                node("xiaomi 14 case", "[24,240][720,300]", kClick) +
                node("xiaomi 14 charger", "[24,320][720,380]", kClick)));
  g.add_page(make_page(
      "P4", node("sales", "[24,48][200,120]", kClick) +
                node("price", "[220,48][396,120]", kClick) +
                node("Xiaomi 14", "[425,1074][628,1125]", kClick) +
                node("Xiaomi 14 Pro", "[425,520][628,570]", kClick) +
                node("result list", "[0,140][720,1260]", "scrollable=\"true\"")));
  g.add_page(make_page(
      "P5", node("Xiaomi 14", "[24,900][500,960]", "") +
                node("gallery", "[0,100][720,860]", "scrollable=\"true\"") +
                node("Buy now", "[454,1122][700,1154]", kClick) +
                node("Add to cart", "[294,1122][429,1154]", kClick)));
  g.add_page(make_page(
      "P6", node("", "[0,585][720,1088]", "scrollable=\"true\"") +
                node("Xiaomi 14", "[24,600][340,650]", "") +
                node("Choose a color", "[24,660][240,690]", "")));
  g.add_page(make_page("P7", parameter_sheet("[187,693][235,722]")));
  g.add_page(make_page("P8", parameter_sheet("[187,693][250,722]")));
  g.add_page(make_page(
      "P9", node("Added to cart", "[160,560][560,640]", "") +
                node("Go to cart", "[160,700][560,780]", kClick) +
                node("Continue shopping", "[160,820][560,900]", kClick)));
  g.set_home("P1");

  g.add_edge({"P1", Action::click("search", {177, 96, 273, 168}), "P2"});
  g.add_edge({"P2",
              Action::input("water purifier", {231, 72, 555, 168}, "xiaomi 14"),
              "P3"});
  g.add_edge({"P3", Action::click("search", {597, 48, 702, 192}), "P4"});
  g.add_edge({"P4", Action::click("Xiaomi 14", {425, 1074, 628, 1125}), "P5"});
  g.add_edge({"P5", Action::click("Add to cart", {294, 1122, 429, 1154}), "P6"});
  g.add_edge({"P6",
              Action::scroll("", {0, 585, 720, 1088}, ScrollDirection::Up),
              "P7"});
  g.add_edge({"P7", Action::click("white", {187, 693, 235, 722}), "P8"});
  g.add_edge({"P8", Action::click("OK", {333, 1121, 387, 1153}), "P9"});
  return g;
}

GuiFlow storefront_flow() {
  GuiFlow f;
  f.task = "Help me find detailed information about xiaomi 14, and add a "
           "white one to the shopping cart.";
  const GuiGraph g = storefront_graph();
  for (const GraphEdge& e : g.edges()) f.steps.push_back({e.src, e.action});
  f.terminal_page = "P9";
  f.step_descriptions = {
      "On the homepage of Xiaomi Mall, click the search icon to enter the "
      "search page.",
      "On the search page, enter \"xiaomi 14\" in the search box to search.",
      "On the search page, click the search icon to search.",
      "On the search results page, select the detailed information of "
      "\"xiaomi 14\".",
      "On the detailed information page, select and click \"Add to Cart\" to "
      "enter the parameter page of the phone.",
      "On the parameter page, scroll the page to view more parameter "
      "information.",
      "On the parameter page, select \xe2\x80\x9cwhite\" to confirm the "
      "parameters of the phone.",
      "On the parameter page, click the \"Confirm\" button at the bottom to "
      "confirm the parameter configuration of the phone.",
  };
  return f;
}

std::vector<std::string> storefront_known_names() {
  // Element names whose pages were already assigned in earlier corpora plus
  // the one page phrase that is unique in-flow but likewise taken; only
  // "search results page" and "Xiaomi 14" remain available.
  return {"search", "Add to cart", "white", "OK", "detailed information page"};
}

GuiGraph reward_graph() {
  GuiGraph g;
  auto simple = [](const std::string& id,
                   const std::vector<std::string>& buttons) {
    std::string body = node(id + " header", "[0,0][720,120]", "");
    int y = 200;
    for (const std::string& b : buttons) {
      body += node(b, "[60," + std::to_string(y) + "][660," +
                          std::to_string(y + 80) + "]",
                   "clickable=\"true\"");
      y += 120;
    }
    return make_page(id, body);
  };

  g.add_page(simple("S", {"alpha", "beta", "gamma"}));
  g.add_page(simple("A", {"go"}));
  g.add_page(simple("B", {"go", "side", "trap"}));
  g.add_page(simple("C", {"go"}));
  g.add_page(simple("D", {"hop"}));
  g.add_page(simple("M", {"finish"}));
  g.add_page(simple("G", {"again"}));
  g.add_page(simple("X", {}));
  g.set_home("S");

  auto btn = [&](const std::string& page, const std::string& name) {
    for (const Element& e : g.page(page).elements) {
      if (e.name == name) return Action::click(e.name, e.bounds);
    }
    throw std::runtime_error("fixture button missing: " + page + "/" + name);
  };

  g.add_edge({"S", btn("S", "alpha"), "A"});
  g.add_edge({"S", btn("S", "beta"), "B"});
  g.add_edge({"S", btn("S", "gamma"), "C"});
  g.add_edge({"A", btn("A", "go"), "M"});
  g.add_edge({"B", btn("B", "go"), "M"});
  g.add_edge({"B", btn("B", "side"), "D"});
  g.add_edge({"B", btn("B", "trap"), "X"});
  g.add_edge({"C", btn("C", "go"), "D"});
  g.add_edge({"D", btn("D", "hop"), "M"});
  g.add_edge({"M", btn("M", "finish"), "G"});
  g.add_edge({"G", btn("G", "again"), "S"});
  return g;
}

GuiGraph two_route_graph() {
  GuiGraph g;
  g.add_page(make_page("S", node("Route A", "[40,200][240,260]", kClick) +
                                node("Route B", "[480,600][680,660]", kClick)));
  g.add_page(make_page("A", node("Finish A", "[40,900][340,980]", kClick)));
  g.add_page(make_page("B", node("Finish B", "[480,300][680,380]", kClick)));
  g.add_page(make_page("G", node("Done", "[160,560][560,640]", "") +
                                node("Home", "[160,700][560,780]", kClick)));
  g.set_home("S");
  g.add_edge({"S", Action::click("Route A", {40, 200, 240, 260}), "A"});
  g.add_edge({"S", Action::click("Route B", {480, 600, 680, 660}), "B"});
  g.add_edge({"A", Action::click("Finish A", {40, 900, 340, 980}), "G"});
  g.add_edge({"B", Action::click("Finish B", {480, 300, 680, 380}), "G"});
  return g;
}

GuiFlow two_route_gold_flow() {
  GuiFlow f;
  f.task = "reach the done screen";
  f.steps.push_back({"S", Action::click("Route A", {40, 200, 240, 260})});
  f.steps.push_back({"A", Action::click("Finish A", {40, 900, 340, 980})});
  f.terminal_page = "G";
  return f;
}

PageIntent random_page(std::mt19937_64& rng, const std::string& id) {
  static const std::vector<std::string> names = {
      "alpha", "beta", "gamma", "delta", "menu", "list", "box", "send"};
  PageIntent out;
  const int count = 1 + static_cast<int>(rng() % 6);
  std::string body;
  for (int i = 0; i < count; ++i) {
    const int x1 = static_cast<int>(rng() % 600);
    const int y1 = static_cast<int>(rng() % 1100);
    const int x2 = x1 + 20 + static_cast<int>(rng() % 100);
    const int y2 = y1 + 20 + static_cast<int>(rng() % 80);
    const bool clickable = rng() % 2 == 0;
    const bool scrollable = rng() % 4 == 0;
    const bool inputtable = rng() % 4 == 0;
    out.clickable += clickable ? 1 : 0;
    out.scrollable += scrollable ? 1 : 0;
    out.inputtable += inputtable ? 1 : 0;
    std::string extra = std::string("clickable=\"") +
                        (clickable ? "true" : "false") + "\" scrollable=\"" +
                        (scrollable ? "true" : "false") + "\" editable=\"" +
                        (inputtable ? "true" : "false") + "\"";
    body += node(names[rng() % names.size()] + std::to_string(i),
                 "[" + std::to_string(x1) + "," + std::to_string(y1) + "][" +
                     std::to_string(x2) + "," + std::to_string(y2) + "]",
                 extra);
  }
  out.page = make_page(id, body);
  return out;
}

GuiGraph random_graph(std::mt19937_64& rng, int max_pages) {
  const int n = 3 + static_cast<int>(rng() % (max_pages - 2));
  GuiGraph g;
  for (int i = 0; i < n; ++i) {
    g.add_page(random_page(rng, "p" + std::to_string(i)).page);
  }
  g.set_home("p0");

  static const std::vector<std::string> texts = {"", "alpha", "beta"};
  for (int i = 0; i < n; ++i) {
    const GuiPage& page = g.page("p" + std::to_string(i));
    std::vector<Action> space = enumerate_action_space(page);
    space.pop_back();  // Complete cannot label an edge
    if (space.empty()) continue;
    const int edges = static_cast<int>(rng() % 4);
    for (int e = 0; e < edges; ++e) {
      Action a = space[rng() % space.size()];
      if (a.kind == ActionKind::Input) a.input_text = texts[rng() % 3];
      g.add_edge({page.page_id, std::move(a),
                  "p" + std::to_string(rng() % n)});
    }
  }
  return g;
}

GuiFlow random_walk_flow(const GuiGraph& g, std::mt19937_64& rng,
                         int min_steps, int max_steps) {
  std::vector<std::string> candidates;
  for (const auto& [id, page] : g.pages()) {
    if (!g.outgoing(id).empty()) candidates.push_back(id);
  }
  GuiFlow f;
  if (candidates.empty()) return f;
  std::string cur = candidates[rng() % candidates.size()];
  const int want =
      min_steps + static_cast<int>(rng() % (max_steps - min_steps + 1));
  for (int i = 0; i < want; ++i) {
    const auto& out = g.outgoing(cur);
    if (out.empty()) break;
    const GraphEdge& e = g.edges()[out[rng() % out.size()]];
    f.steps.push_back({cur, e.action});
    cur = e.dst;
  }
  f.terminal_page = f.steps.empty() ? "" : cur;
  return f;
}

}  // namespace guiflow::testing
