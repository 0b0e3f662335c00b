"""Absorbing states of the chain of possibilities.

On a strongly connected graph only constant valuations absorb, so every
absorbing component is a single state.  A root pointing at two leaves is
not strongly connected and keeps non-constant absorbing states.
"""
from maxdyn import absorbing_components, build_chain, from_edge_list, generate, period
from maxdyn.valuation import is_constant

for g, name in [(generate("complete", 3), "K_3"), (generate("dicycle", 4), "C_4"),
                (from_edge_list(3, [(0, 1), (0, 2)]), "root -> two leaves")]:
    chain = build_chain(g, mode="raw")
    comps = absorbing_components(chain)
    stuck = [chain.states[i] for c in comps for i in c if not is_constant(chain.states[i])]
    print(f"{name}: {len(chain)} states, period {period(g)}, "
          f"{len(comps)} absorbing, non-constant absorbing e.g. {stuck[:3]}")
