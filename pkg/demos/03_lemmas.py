# %% the named lemma scenarios
from pathlib import Path
import tempfile

from bookemb import lemmas
from bookemb.solver import Budget

for name in sorted(lemmas.SCENARIOS):
    sc = lemmas.SCENARIOS[name]
    print(f"{name:34s} {sc.engine:12s} {sc.expected.value if sc.expected else '-'}")

# %% Q1+ab under the three hypotheses has no 3-page embedding
out = lemmas.run("lemma1_plusAB")
print(out.verdict, "exhausted", out.exhausted, "nodes", out.nodes_expanded)

# %% dropping the center hypothesis makes it embeddable; the witness is checked
ctl = lemmas.run("lemma1_control")
print(ctl.verdict, ctl.witness.order)

# %% a tiny budget gives Unknown, never a fake UNSAT
print(lemmas.run("lemma1_plus12", budget=Budget(max_nodes=50)).outcome)

# %% facts the Lemma 1 argument leans on, read off every normalised embedding of Q1
print(lemmas.lemma1_subclaims())

# %% Lemma 3 instances are exported for an external SAT solver
with tempfile.TemporaryDirectory() as d:
    lemmas.export("lemma3_both_centers_inside", d)
    print(sorted(p.name for p in Path(d).iterdir()))
