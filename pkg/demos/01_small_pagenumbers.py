# %% exact pagenumbers of a few classic graphs
import itertools
from pathlib import Path

from bookemb.draw import render_svg
from bookemb.graph import Graph
from bookemb.solver import decide_k_pages, pagenumber

OUT = Path(__file__).with_name("out")
OUT.mkdir(exist_ok=True)


def complete(n):
    g = Graph(n)
    g.add_edges(itertools.combinations(range(n), 2))
    return g


cycle = Graph(6)
cycle.add_edges((i, (i + 1) % 6) for i in range(6))
for name, g in [("C6", cycle), ("K4", complete(4)), ("K5", complete(5)), ("K6", complete(6))]:
    res = pagenumber(g)
    print(f"{name}: pagenumber {res.pagenumber}")

# %% K5 needs three pages: two are refuted, three come with a witness
k5 = complete(5)
print(decide_k_pages(k5, 2).status, decide_k_pages(k5, 3).status)
w = decide_k_pages(k5, 3).witness
print("order", w.order)
print("pages", dict(w.pages))

# %% draw it; pages differ by dash pattern as well as hue
(OUT / "k5.svg").write_text(render_svg(w))
print("wrote", OUT / "k5.svg")
