"""The weight function G_k and the split of the quadratic form into S_main and S_off.

Run: python3 demos/diagonal_dominance.py   (about a minute)
"""

import numpy as np

from heckewind.analytic import fit_gk_decay, g_k_eval, smain_soff_eval, sum_gk_slope

for k in (1, 2, 3):
    print(f"G_{k}(0.01) = {g_k_eval(k, 0.01):.6f}   G_{k}(1) = {g_k_eval(k, 1.0):.3e}   G_{k}(25) = {g_k_eval(k, 25.0):.3e}")

# sum_A G_k(A^2/X)/A grows like ((k-1)!)^2/2 log X.
for k in (1, 2, 3):
    fit = sum_gk_slope(k, np.logspace(3, 7, 9))
    print(f"k={k}: slope {fit.slope:.5f} (predicted {fit.predicted_slope:.5f}), decay rate c = {fit_gk_decay(k).c:.2f}")

# With enough Kloosterman terms, the diagonal part beats the rest plus its tail bound.
for c_mult in (100, 3000):
    r = smain_soff_eval(199, 1, 3, (0, 0, 1), c_max=c_mult * 199)
    print(
        f"c <= {c_mult}p: S_main {r.s_main:.4f}, |S_off| {abs(r.s_off):.4f}, tail <= {r.tail_bound:.4f},"
        f" dominant: {r.dominant}"
    )
