"""Exact expected convergence times on small graphs.

Builds the chain of possible valuations (rank-compressed) and solves for the
expected number of rounds to absorption in rational arithmetic.
"""
from maxdyn import exact_convergence_time, generate, harmonic, worst_case_convergence_time
from maxdyn.estimator import two_valued_start

for n in (3, 4, 5):
    path = exact_convergence_time(generate("path", n), two_valued_start(n))
    comp = exact_convergence_time(generate("complete", n), two_valued_start(n))
    print(f"n={n}  path {path} (n(n-2) = {n * (n - 2)})   "
          f"complete {comp} (n*H(n-2) = {n * harmonic(n - 2)})")

print()
for fam in ("path", "complete", "dicycle"):
    rep = worst_case_convergence_time(generate(fam, 5))
    print(f"worst start on {fam}5: {rep.worst_valuation} -> {rep.worst_value} "
          f"= {float(rep.worst_value):.4f} rounds over {len(rep.chain)} classes")
