"""Fixed points and the three free energies at J = -13, Jp = 34.6, T = 27.5 (beta = 1/T)."""
import math

from ivtree.fixedpoint import fixed_points, map_g_prime, thresholds
from ivtree.model import ModelParams
from ivtree.thermo import free_energy_numeric, free_energy_paper

p = ModelParams.from_temperature(-13.0, 34.6, 27.5)
rep = fixed_points(p.c, p.d)
e1, e2 = thresholds(p.d)
print(f"c = {p.c:.6g}, d = {p.d:.6g}, window ({e1:.6g}, {e2:.6g})")
print(f"{'u':>12} {'g_prime':>10} {'stability':>11} {'f_paper':>12} {'f_numeric13':>12} {'f_recursion':>12}")
for u, st in zip(rep.roots, rep.stability):
    h = math.log(u)
    r = free_energy_numeric(p, rep.fields()[rep.roots.index(u)], 13)
    print(f"{u:12.6g} {map_g_prime(u, p.c, p.d):10.4g} {st:>11} {free_energy_paper(p, h):12.6g} "
          f"{r.f_numeric:12.6g} {r.f_recursion:12.6g}")
