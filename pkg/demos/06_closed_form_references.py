"""Closed-form and quadrature reference values.

The single-index invariance (partial-effect ratio = coefficient ratio),
the time-linear two-hazards ratio, the erfc independence limits, and the
dependent-copula quadrature, Monte-Carlo-averaged to the design constants.
"""

from relcov import CopulaModel, TwoHazardsDGP, SingleIndexDGP, WeibullMargin
from relcov.oracle import (expected_eta, independence_limit_eta_m, independence_limit_m,
                           quadrature_eta_m, single_index_ratio_check, two_hazards_eta_pi)

print("single-index invariance (ratio of S1 partials vs beta_x/beta_y)")
for kind, bx, by in (("cox", 1.0, 1.0), ("po", 1.0, 3.0), ("aft", 2.0, -1.0)):
    ratio, beta_ratio = single_index_ratio_check(kind, bx, by, t=1.2, x=0.4, y=-0.3)
    print(f"  {kind:4s} beta=({bx:+.0f},{by:+.0f}): partials {ratio:+.10f}  "
          f"coefficients {beta_ratio:+.10f}")

clayton = CopulaModel.from_tau("clayton", 0.8)
two = TwoHazardsDGP(a1=1.0, b1=0.5, a2=1.0, b2=1.0, beta_x=1.0, beta_y=1.0,
                    copula=clayton)
print("\ntwo-hazards model at (x, y) = (0, 0)")
print(f"  eta_pi(t) is linear in t: t=0.5 -> {two_hazards_eta_pi(two, 0.5, 0, 0):.3f}, "
      f"t=2 -> {two_hazards_eta_pi(two, 2.0, 0, 0):.3f}")
print(f"  independence-limit m(0,0)      = {independence_limit_m(two, 0, 0):.6f}")
print(f"  independence-limit eta_m(0,0)  = {independence_limit_eta_m(two, 0, 0):.6f}")
print(f"  eta_m(0,0) under Clayton tau=.8 (quadrature) = {quadrature_eta_m(two, 0, 0):.6f}")

print("\nMonte-Carlo-averaged design constants (2e5 draws here; the "
      "acceptance suite uses 1e6)")
print(f"  two-hazards design:   {expected_eta(two, draws=200_000, seed=3):.4f}")
quad = SingleIndexDGP(WeibullMargin(0.5, 1.0), WeibullMargin(1.0, 1.0),
                      1.0, 1.0, clayton, beta_x2=2.0)
print(f"  quadratic-index design: {expected_eta(quad, draws=200_000, seed=3):.4f}")
