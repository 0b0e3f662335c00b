"""One seeded run and one constructive schedule.

Prints the strong cycle set size and the current maximum per round; both
move monotonically.  The schedule spreads the maximum outwards layer by
layer and finishes in n - |argmax| steps.
"""
from maxdyn import constructive_schedule, generate, simulate
from maxdyn.dynamics import run_schedule

g = generate("dicycle", 6)
f = (3, 1, 4, 1, 5, 2)
tr = simulate(g, f, 42, max_rounds=500)
for r in tr.rounds[:12]:
    print(f"t={r.t:>2} v={r.v} {r.valuation} strong={r.h} max={r.max}")
print(f"absorbed at round {tr.converged_at}")

sched = constructive_schedule(g, f)
print("schedule", sched, "->", run_schedule(g, f, sched).rounds[-1].valuation)
