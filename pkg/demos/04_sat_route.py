# %% the same question as CNF
import itertools

from bookemb.embedding import is_valid
from bookemb.gadgets import build_q1
from bookemb.graph import Graph
from bookemb.satenc import decode, dpll_solve, emit_dimacs, encode, parse_dimacs, unconstrained_clause_count

k4 = Graph(4)
k4.add_edges(itertools.combinations(range(4), 2))
cnf = encode(k4, 2)
print(cnf.num_vars, "vars", len(cnf.clauses), "clauses, formula says", unconstrained_clause_count(k4, 2))
print(emit_dimacs(cnf).splitlines()[:6])

# %% solve with the built-in DPLL and decode the model
res = dpll_solve(cnf)
emb = decode(cnf, res.model, k4, 2)
print(res.status, emb.order, dict(emb.pages), is_valid(k4, emb))

# %% DIMACS text round trips exactly
text = emit_dimacs(encode(build_q1(), 2))
print(emit_dimacs(parse_dimacs(text)) == text)

# %% Q1 in one page is refuted, two pages is fine
for k in (1, 2):
    print(k, dpll_solve(encode(build_q1(), k)).status)
