# %% the gadget family: Q1, Q2, the quad and the final graph G
from bookemb.gadgets import build_g, build_q1, build_q2, build_quad, g_counts, innermost_terminal
from bookemb.graph import validate

q1 = build_q1()
print("Q1", q1.n, "nodes", q1.m, "edges")
print({r: v for r, v in sorted(q1.roles.items(), key=lambda kv: kv[1])})

# %% Q2 adds the (c1, c2) edge, two more centers, and stellates 18 faces twice
q2 = build_q2(depth=2)
print("Q2", q2.n, q2.m)

# %% 15 copies of Q2 side by side between the same outer terminals
quad = build_quad(copies=15, depth=2)
terms = sorted(r for r in quad.roles if r.startswith("inner_terminal["))
print("quad", quad.n, "nodes,", len(terms), "inner terminals")
print("terminal wired to each central node:", innermost_terminal(15))

# %% G on a short path; the n=1000 graph is the same thing, only longer
g = build_g(n=3)
print("G(3)", g.n, g.m, validate(g).ok)
print("closed form for n=1000:", g_counts(1000, 15, 2))
