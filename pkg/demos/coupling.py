"""Coupling a fixed-rate success process under a faster one.

Q waits for the first success at rate q, P' shares Q's coin and adds a
second one so that round j succeeds with probability p_j >= q.  P' never
exceeds Q and has the same law as an independently simulated P.
"""
import numpy as np

from maxdyn.estimator import coupling_test, coupling_trial

rng = np.random.default_rng(0)
for _ in range(3):
    rec = coupling_trial(0.1, [0.2, 0.4, 0.6], rng)
    print(f"Q={rec.Q:>3}  P'={rec.P_prime}  first pairs {rec.pairs[:4]}")

rep = coupling_test(0.1, [0.2, 0.4, 0.6], 50_000, seed=1)
print(f"violations {rep.dominance_violations}, mean Q {rep.mean_Q:.2f}, "
      f"mean P' {rep.mean_P_prime:.3f} vs direct {rep.mean_P_direct:.3f}, p-value {rep.p_value:.3f}")
