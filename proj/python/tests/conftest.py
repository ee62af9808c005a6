import guiflow as gf
import pytest

SCREEN = gf.ScreenSize(720, 1280)


def make_element(eid, name, box, clickable=False, scrollable=False,
                 inputtable=False):
    return gf.Element(eid, name, gf.BoundingBox(*box), clickable, scrollable,
                      inputtable)


def make_page(page_id, elements, caption=None):
    return gf.GuiPage(page_id=page_id, xml="", screen=SCREEN,
                      elements=elements, caption=caption)


def build_graph():
    """Five pages around a home screen, with a searchable detour and a trap
    page that nothing leads out of."""
    g = gf.GuiGraph()
    g.add_page(make_page("home", [
        make_element("e1", "Open list", (40, 100, 680, 180), clickable=True),
        make_element("e2", "search box", (40, 200, 680, 280), inputtable=True),
        make_element("e3", "Banner ad", (40, 300, 680, 380), clickable=True),
    ], caption="Home screen. Entry point of the app."))
    g.add_page(make_page("list", [
        make_element("e4", "feed", (0, 0, 720, 1280), scrollable=True),
        make_element("e5", "First item", (40, 100, 680, 200), clickable=True),
        make_element("e6", "Dead end", (40, 300, 680, 400), clickable=True),
    ], caption="List page. Scrollable feed of items."))
    g.add_page(make_page("detail", [
        make_element("e7", "Back home", (40, 100, 680, 180), clickable=True),
    ], caption="Detail page. Shows one item."))
    g.add_page(make_page("results", [
        make_element("e8", "Result entry", (40, 100, 680, 200),
                     clickable=True),
    ], caption="Results page. Matches for the query."))
    g.add_page(make_page("trap", [
        make_element("e9", "Nothing", (40, 100, 680, 200), clickable=True),
    ], caption="Trap page. No way out."))
    g.set_home("home")

    open_list = gf.Action.click("Open list", gf.BoundingBox(40, 100, 680, 180))
    search = gf.Action.input("search box", gf.BoundingBox(40, 200, 680, 280),
                             "alpha")
    first_item = gf.Action.click("First item",
                                 gf.BoundingBox(40, 100, 680, 200))
    dead_end = gf.Action.click("Dead end", gf.BoundingBox(40, 300, 680, 400))
    scroll_feed = gf.Action.scroll("feed", gf.BoundingBox(0, 0, 720, 1280),
                                   gf.ScrollDirection.Down)
    back_home = gf.Action.click("Back home", gf.BoundingBox(40, 100, 680, 180))
    result_entry = gf.Action.click("Result entry",
                                   gf.BoundingBox(40, 100, 680, 200))

    g.add_edge(gf.GraphEdge("home", open_list, "list"))
    g.add_edge(gf.GraphEdge("home", search, "results"))
    g.add_edge(gf.GraphEdge("list", first_item, "detail"))
    g.add_edge(gf.GraphEdge("list", dead_end, "trap"))
    g.add_edge(gf.GraphEdge("list", scroll_feed, "list"))
    g.add_edge(gf.GraphEdge("detail", back_home, "home"))
    g.add_edge(gf.GraphEdge("results", result_entry, "list"))
    return g


def build_golden_flow():
    """Two clicks from home to the detail page, the shortest route there."""
    return gf.GuiFlow(
        task="open the first item on the list page",
        steps=[
            gf.FlowStep("home", gf.Action.click(
                "Open list", gf.BoundingBox(40, 100, 680, 180))),
            gf.FlowStep("list", gf.Action.click(
                "First item", gf.BoundingBox(40, 100, 680, 200))),
        ],
        step_descriptions=[
            "On the home screen, click the \"Open list\" button.",
            "On the list page, click the first item.",
        ],
        terminal_page="detail",
    )


@pytest.fixture
def graph():
    return build_graph()


@pytest.fixture
def golden_flow():
    return build_golden_flow()
