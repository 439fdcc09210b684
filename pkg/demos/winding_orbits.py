"""Hecke orbits of the winding element, from one level to a scan over primes.

Run: python3 demos/winding_orbits.py
"""

from heckewind import build_space, independence_certificate, render_symbol_expression, verify_certificate
from heckewind.experiments import magma_transcript, scan_csv, scan_primes

# Weight 2, level 23: the winding element and its images under T_2..T_5.
space = build_space(23, 1)
print(f"level 23: {space.dim_full} symbols, {space.dim_cuspidal} cuspidal")
for name, vec in magma_transcript(space, 5):
    print(f"  {name:5} {render_symbol_expression(space, vec)}")

# Four images in a two-dimensional space cannot be independent; the certificate
# carries the integer relation, and anyone can re-check it.
cert = independence_certificate(space, 4)
print(f"\nD=4: rank {cert.rank}, {cert.verdict}, relation {cert.witness['vector']}")
print("certificate re-verified:", verify_certificate(cert, space))

# Past a certain size the first four images become independent.
rows = scan_primes(1, 4, range(200, 280))
print("\n" + scan_csv(rows), end="")
