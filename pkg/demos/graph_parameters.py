"""Vertex expansion, orbit and the resulting bound shapes."""
from maxdyn import bound_report, generate, k_boundary_partition
from maxdyn.graph import random_strongly_connected
import numpy as np

graphs = [("K_8", generate("complete", 8)), ("P_8", generate("path", 8)),
          ("C_8", generate("dicycle", 8)),
          ("random sc n=10", random_strongly_connected(10, 0.25, np.random.default_rng(1)))]
for name, g in graphs:
    r = bound_report(g)
    print(f"{name:>15}: phi_out {r.phi_out}  phi_in {r.phi_in}  b {r.orbit_b}  "
          f"bound(sc) {r.bound_strongly_connected:.1f}")

# layers of vertices at exact distance k from a set
print(k_boundary_partition(generate("path", 8), {3}))
