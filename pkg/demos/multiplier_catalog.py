"""Audit the anisotropic multiplier catalog.

Each entry is a member of the family
m(k) = (1+k3^2)^a (k1^2+k2^2)^b / ((k3^2)^c + (k1^2+k2^2)^d) with exact
rational exponents.  The boundedness hypothesis a/c + b/d <= 1 is decided in
exact arithmetic; the lattice sup and an empirical L^p operator-norm lower
bound are computed numerically.
"""

from rotconv.velocity import CATALOG, empirical_lp_ratio, hypothesis_check, lattice_sup

print(f"{'entry':>14} {'a':>5} {'b':>5} {'c':>3} {'d':>3} "
      f"{'hyp':>5} {'sup(K=64)':>12} {'L3 ratio':>10}")
for entry in CATALOG:
    s = entry.spec
    print(f"{entry.name:>14} {str(s.a):>5} {str(s.b):>5} {str(s.c):>3} {str(s.d):>3} "
          f"{str(hypothesis_check(s)):>5} {lattice_sup(s, 64):12.6f} "
          f"{empirical_lp_ratio(s, 3.0, 10, 42):10.6f}")
