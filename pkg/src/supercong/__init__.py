"""supercong: exact verification of q-supercongruences and their p-adic limits.

The package has three verification lanes:

* symbolic lane (``polys``, ``qobjects``, ``engine``): exact arithmetic in
  Q[q] / (M(q)) for cyclotomic-product moduli, plus a fraction-field lane
  over Q(a) for statements carrying a free parameter;
* p-adic lane (``padic``): exact rational truncated sums compared against
  Morita Gamma values modulo prime powers;
* numeric lane (``analytic``): double-precision confirmation of the
  infinite summation identities the congruences are truncations of.

Cases are data: ``registry`` ships a JSON catalog of every checked
statement, and ``harness``/``cli`` schedule, cache and report runs.
"""

__version__ = "0.1.0"
