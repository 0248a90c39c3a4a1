"""Transport between densities, and what shift maps buy you.

With two transforms an iterated step carries samples of one density to
samples of another (source forward, cube map, target inverse).  Shift maps
make the orbit a deterministic quadrature sequence: rational shifts give
exact finite cycles, irrational shifts give low-discrepancy coverage whose
ergodic averages converge much faster than independent sampling.
"""

import math

import numpy as np

import ergomap as em

# --- transport: ramp samples in, triangular samples out ---------------------

t_ramp = em.build_transform(em.ramp())
t_tri = em.build_transform(em.triangular())
carry = em.transport(t_ramp, t_tri, em.Sawtooth(3))

ramp_samples = t_ramp.inverse(em.kronecker_sequence(100_000))
pushed = carry(ramp_samples)
ks = em.ks_uniformity(t_tri.forward(pushed))
print(f"transport ramp -> triangular: per-axis KS vs target = {ks[0]:.2e}")

# --- rational shift: exact periodicity ---------------------------------------

m = em.factorize(t_tri, em.Translation(2.0 / 5.0))
orb = em.orbit(m, 0.3, 5)
print(f"\nshift by 2/5: period {em.period(2, 5)}, "
      f"return distance after 5 steps = {abs(orb.points[-1] - 0.3):.2e}")

# --- irrational shift: quadrature-grade ergodic averages ----------------------

golden = (math.sqrt(5.0) - 1.0) / 2.0
m = em.factorize(t_tri, em.Translation(golden))
orb = em.orbit(m, 0.3, 100_000)
mean = em.ergodic_average(orb, lambda x: x)
print(f"\ngolden-ratio shift, 1e5 steps: orbit mean = {mean:.8f} (target 0.5)")
print(f"  error {abs(mean-0.5):.2e} vs ~1.6e-3 noise of independent sampling")

rng = np.random.default_rng(0)
iid = t_tri.inverse(rng.uniform(0, 1, 100_000))
print(f"  independent-sample mean error for comparison: {abs(iid.mean()-0.5):.2e}")
