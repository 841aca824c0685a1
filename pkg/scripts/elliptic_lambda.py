"""Elliptic warm-up: the lambda function as an inverse period map.

Run:  python3 scripts/elliptic_lambda.py [N]
"""

import sys

from k3lambda import elliptic
from k3lambda.theta import jacobi_theta

N = int(sys.argv[1]) if len(sys.argv) > 1 else 12

# omega_0(z) = sum c(n) z^n with c(n) = (binom(2n, n) / 4^n)^2
pair = elliptic.ell_solutions(N)
print("omega_0 =", pair.omega0.format(["z"], limit=5))
print("PF operator kills omega_0:", elliptic.pf_apply(pair.omega0).is_zero())

# the log-derivative constant is -4 log 2, so q = (z/16) exp(sigma/omega_0)
const, _ = elliptic.mirror_exponent(pair)
print("constant of sigma/omega_0:", const)

# invert q(z) by fixed-point iteration
lam = elliptic.mirror_map(N)
print("lambda(q) =", lam.format(["q"], limit=6))

# compare with the theta quotient
t2, t3 = jacobi_theta(2, N) ** 4, jacobi_theta(3, N) ** 4
print("lambda * theta_3^4 == theta_2^4:", lam * t3 == t2)

rep = elliptic.ell_lambda_identity(N)
for name, c in rep["checks"].items():
    print(f"  {name:16s} {'ok' if c['pass'] else 'FAIL'}")
