"""How fast does l^d Var(D_l) reach its limit?

The defect variance of a degree-l random harmonic decays like C_d / l^d.
This script tabulates the exact (certified-truncation) variance against
the limit constant and shows the relative defect shrinking like 1/l,
plus the structural zero at every odd degree.
"""

from sphdefect.chaos import constant_estimate, exact_variance

print(__doc__)

for d, degrees in ((2, (10, 20, 40, 80, 160, 320)),
                   (3, (10, 20, 40, 80))):
    c = constant_estimate(d, "series")
    print(f"d = {d}:  C_{d} = {c.value:.10f}  "
          f"(series route, err <= {c.error_estimate:.1e})")
    print(f"  {'l':>5} {'Var(D_l)':>16} {'l^d Var':>12} {'rel. defect':>12} "
          f"{'certified tail':>15}")
    for l in degrees:
        rep = exact_variance(d, l, tol=1e-6)
        scaled = l**d * rep.value
        print(f"  {l:>5} {rep.value:>16.10f} {scaled:>12.6f} "
              f"{abs(scaled - c.value) / c.value:>12.2e} "
              f"{rep.tail_bound:>15.2e}")
    print()

print("odd degrees carry no odd chaos at all; the variance is exactly 0:")
for l in (3, 7, 11):
    print(f"  Var(D_{l}) on S^2 =", exact_variance(2, l).value)
