"""Large-deviation tails of the diagonal law and their consequences.

Three related tail curves:
  1. Chernoff: P(|S_n/n - rho| > eps) for sums of one log coordinate,
     against the analytic bound 2 e^{-n I(eps)}.
  2. Expansion sets: mass of products failing the gap condition
     a_i - a_j > n beta_ij (empty for narrow laws, so a wide law is shown).
  3. Conjugation growth: mass of words where ||a u a^-1|| / ||u|| fails to
     exceed C^n with C = e^beta.
"""

import numpy as np

from latticewalk import (CurveSpec, DiagonalLawSpec, Dims, UnipotentLawSpec,
                         chernoff_tail, conjugation_growth,
                         expansion_set_mass)

d = Dims(1, 1)
law = DiagonalLawSpec(d, np.array([0.5, -0.5]), np.array([0.2, 0.2]))
uni = UnipotentLawSpec(CurveSpec("moment", d))
rng = lambda tag: np.random.default_rng([0, tag])
ns = (10, 20, 40, 80)

print("== Chernoff tails, eps = 0.05 ==")
cher = chernoff_tail(law, 0, 0.05, ns, 20_000, rng=rng(1))
for n, p, lo, hi, lb in zip(cher.ns, cher.probs, cher.lo, cher.hi,
                            cher.analytic_log_bound):
    print(f"  n={n:<3} p={p:.2e}  wilson=[{lo:.2e}, {hi:.2e}]  "
          f"bound={np.exp(lb):.2e}")
print(f"  fitted log-slope: {cher.slope:.4f}")

print("== expansion-set complement mass (wide law, w = 0.8) ==")
wide = DiagonalLawSpec(d, np.array([0.5, -0.5]), np.array([0.8, 0.8]))
expa = expansion_set_mass(wide, (10, 20, 40), 20_000, rng=rng(2))
for n, p, lo, hi in zip(expa.ns, expa.probs, expa.lo, expa.hi):
    print(f"  n={n:<3} 1-mass(E_n)={p:.2e}  wilson=[{lo:.2e}, {hi:.2e}]")
print(f"  fitted log-slope: {expa.slope:.4f}")
print("  (the default w=0.2 law has empty complement: gaps always exceed "
      "n beta)")

print("== conjugation growth failure mass, C = e^beta ==")
grow = conjugation_growth(law, uni, (10, 20, 40), 20_000,
                          c_probe=float(np.exp(law.beta)), rng=rng(3))
for n, p in zip(grow.ns, grow.probs):
    print(f"  n={n:<3} failure mass = {p:.2e}")
