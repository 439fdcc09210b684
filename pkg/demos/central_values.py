"""Central L-values from eigen-systems, compared with the exact orbit rank.

Run: python3 demos/central_values.py
"""

from heckewind import build_space
from heckewind.analytic import afe_central_value, central_value_sq, eigen_systems, gram_rank, nonvanishing_bridge

# Level 37 has one form with a zero at the centre and one without.
space = build_space(37, 1)
for f in eigen_systems(space, 600):
    afe = afe_central_value(f)
    sq = central_value_sq(f)
    print(f"a_2 = {f.a(2):+.0f}: L = {afe.value:.12f}, |L|^2 = {sq.value:.3e}, sign {afe.epsilon:+d}")

# The number of nonvanishing values equals the rank of the winding orbit.
for level, k in [(23, 1), (37, 2), (67, 1)]:
    rep = nonvanishing_bridge(build_space(level, k))
    print(f"level {level} weight {2 * k}: exact rank {rep.exact_rank}, nonvanishing {rep.nonvanishing}")

# The same count through a Gram matrix built from harmonic weights.
rep = gram_rank(build_space(23, 2), 4)
print("Gram singular values:", ", ".join(f"{s:.3g}" for s in rep.gram.singular_values))
print(f"numeric rank {rep.gram.rank}, exact rank {rep.exact_rank}")
