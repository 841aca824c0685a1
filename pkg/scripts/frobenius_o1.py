"""Frobenius solutions around o1 and the quadratic period relation.

Run:  python3 scripts/frobenius_o1.py
"""

from k3lambda import gkz, indicial
from k3lambda.gkz import z_policy

# the indicial ring fixes the pairing M used in the second-order solution
ideal = indicial.indicial_ideal("o1")
dims, std = indicial.graded_quotient(ideal)
M = indicial.pairing_matrix(ideal, 2)
print("quotient dimensions:", dims, " degree-2 standard monomial:", std[2])
print("M =", [[int(x) for x in row] for row in M])

# six solutions: omega_0, four log solutions and the M-weighted log^2 solution
basis = gkz.frobenius_basis("o1", z_policy(3), M)
print("omega_0 =", basis.omega0.format(["z1", "z2", "z3", "z4"], limit=8))
print("log2 appears in sigma_1:", any(not c.is_rational() for _, c in basis.sigma[0].terms()))

rep = gkz.verify_annihilation("o1", N=3)
print(f"annihilation: {rep['checked']} operator/solution pairs, pass = {rep['pass']}")

# 2 omega_0 omega_2 + 2 pi^2 omega_0^2 + sum M_ij omega_i omega_j = 0
rel = gkz.quadratic_relation(basis, M, 2)
print("quadratic relation vanishes through degree 3:", rel.is_zero())
