import xml.etree.ElementTree as ET

from bookemb.draw import EXTRA_DASH, PALETTE, page_style, render_svg
from bookemb.embedding import BookEmbedding
from bookemb.gadgets import build_q1
from bookemb.solver import decide_k_pages

NS = "{http://www.w3.org/2000/svg}"


def paths(svg):
    return ET.fromstring(svg).findall(f"{NS}path")


def test_styles_distinguish_pages_without_color():
    dashes = {page_style(p)[1] for p in (1, 2, 3)}
    assert len(dashes) == 3
    assert page_style(4) == (PALETTE[0], EXTRA_DASH)
    assert page_style(4 + len(PALETTE)) == page_style(4)


def test_svg_is_well_formed_and_complete():
    g = build_q1()
    emb = decide_k_pages(g, 3).witness
    svg = render_svg(emb)
    ps = paths(svg)
    assert len(ps) == g.m
    assert {p.get("data-edge") for p in ps} == {f"{u}-{v}" for u, v in g.edges()}
    assert len(ET.fromstring(svg).findall(f"{NS}circle")) == g.n


def test_render_is_deterministic():
    g = build_q1()
    emb = decide_k_pages(g, 3).witness
    assert render_svg(emb) == render_svg(emb)
    labels = {v: r for r, v in g.roles.items()}
    assert render_svg(emb, labels) == render_svg(emb, labels)


def test_labels_and_markers_are_escaped():
    emb = BookEmbedding.from_order((0, 1, 2), {(0, 2): 1}, 1, {'u"<': 0.5, "v": 2.5})
    svg = render_svg(emb, {0: "a&b"})
    root = ET.fromstring(svg)
    texts = [t.text for t in root.findall(f"{NS}text")]
    assert "a&b" in texts and 'u"<' in texts
    ticks = [ln for ln in root.findall(f"{NS}line") if ln.get("data-marker")]
    assert {t.get("data-marker") for t in ticks} == {'u"<', "v"}


def test_same_page_arcs_nest_or_separate():
    # in a valid embedding same-page arcs on the spine never interleave
    g = build_q1()
    emb = decide_k_pages(g, 3).witness
    pos = emb.layout.pos
    spans = {}
    for (u, v), c in emb.pages.items():
        spans.setdefault(c, []).append(tuple(sorted((pos[u], pos[v]))))
    for arcs in spans.values():
        for a, b in arcs:
            for c, d in arcs:
                assert not (a < c < b < d)
