"""Mirror map at o1, the master equation and the search over S6.

Run:  python3 scripts/master_equation.py     (a few seconds to a minute)
"""

from k3lambda import lambda_

N = W = 2
m = lambda_.build_mirror_map("o1", N, W)
print("normalisation z_k = c_k Q_k + ...: c =", [str(c) for c in m.consts])

# in the q variables (q = s Q^P with the branch shift q4 -> -q4)
z1, z2, z3, z4 = m.z_q()
print("z1(q) =", z1.format(limit=4))
print("z3(q) =", z3.format(limit=4))

w2 = lambda_.omega0_of_q(m)
print("omega_0(z(q))^2 =", w2.format(limit=8))

# P_I(z) omega_0^2 = Theta^2_{tau(I)} for the ten partitions I
rep = lambda_.verify_master_equation("o1", lambda_.TAU, N, W)
for part, ok in rep.verdicts.items():
    print(f"  {part}: {'ok' if ok else 'FAIL'}")

# tau is the only permutation that works
print("search:", lambda_.permutation_search("o1", N, W)["found"])
# without the branch shift nothing works
print("search, no shift:", lambda_.permutation_search("o1", N, W, signs=(1, 1, 1, 1))["found"])
