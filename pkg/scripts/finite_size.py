"""How f_numeric(n) approaches f_recursion at a fixed point.

ln Z_n - beta |V_n| f_recursion is constant in n, so the error is C / (beta |V_n|)
and halves with each level. Eliminating C from two depths recovers the limit.
"""
import math

from ivtree.fixedpoint import fixed_points
from ivtree.model import ModelParams
from ivtree.thermo import f_numeric, free_energy_recursion
from ivtree.tree import n_vertices

p = ModelParams.from_temperature(-13.0, 34.6, 27.5)
for f in fixed_points(p.c, p.d).fields():
    rec = free_energy_recursion(p, f.h1)
    print(f"u = {f.u1:.6g}  f_recursion = {rec:.12g}")
    prev = None
    for n in range(2, 14):
        fn = f_numeric(p, f, n)
        err = fn - rec
        C = p.beta * n_vertices(n) * err
        ratio = "" if prev is None else f"{err / prev:.5f}"
        print(f"  n={n:2d}  err={err: .3e}  C={C:.12g}  ratio={ratio}")
        prev = err
    v12, v13 = n_vertices(12), n_vertices(13)
    lim = (v13 * f_numeric(p, f, 13) - v12 * f_numeric(p, f, 12)) / (v13 - v12)
    print(f"  extrapolated limit - f_recursion = {lim - rec:.2e}")
