"""Generating dependent competing-risks samples.

Draws from the Weibull single-index design and the additive two-hazards
design, prints the risk composition, and persists one sample as CSV.
"""

import numpy as np

from relcov import (CopulaModel, SingleIndexDGP, TwoHazardsDGP, WeibullMargin,
                    risk_share, sample_single_index, sample_two_hazards)

clayton = CopulaModel.from_tau("clayton", 0.8)

weibull = SingleIndexDGP(margin1=WeibullMargin(0.5, 1.0), margin2=WeibullMargin(1.0, 1.0),
                         beta_x=1.0, beta_y=1.0, copula=clayton)
ds = sample_single_index(weibull, 20_000, seed=1)
print("Weibull single-index design, n = 20 000")
print(f"  risk-1 (covariate margin) share: {risk_share(ds):.3f}")
print(f"  duration quartiles: {np.percentile(ds.t, [25, 50, 75]).round(3)}")

two_hazards = TwoHazardsDGP(a1=1.0, b1=0.5, a2=1.0, b2=1.0,
                            beta_x=1.0, beta_y=1.0, copula=clayton)
ds2 = sample_two_hazards(two_hazards, 20_000, seed=2)
print("\nTwo-hazards design, n = 20 000")
print(f"  risk-1 share: {risk_share(ds2):.3f}")
print(f"  duration quartiles: {np.percentile(ds2.t, [25, 50, 75]).round(3)}")

path = "/tmp/relcov_two_hazards.csv"
ds2.to_csv(path)
print(f"\nsaved {len(ds2)} rows to {path} (header: t,delta,x,y)")

# identical seeds replay bitwise
again = sample_two_hazards(two_hazards, 20_000, seed=2)
print("bitwise reproducible:", bool(np.array_equal(ds2.t, again.t)))
