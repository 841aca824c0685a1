"""The ten even genus-2 theta constants and Theta-tilde.

Run:  python3 scripts/theta_constants.py
"""

from k3lambda import theta

pol = theta.theta_policy(2, 2)
for c in theta.CHARACTERISTICS[5:7]:
    print(c.name, c.partition, "=", theta.genus2_theta(c, pol).format(limit=6))

# only five of the ten squares are linearly independent
print("rank of the squares:", theta.theta_square_rank(pol))

tt = theta.theta_tilde(theta.theta_policy(3, 3))
lead = {e: c for e, c in tt.terms() if e[0] + e[1] == 2}
print("leading part of Theta-tilde:", {tuple(map(int, e)): str(c) for e, c in lead.items()})
print("squares back:", tt * tt == theta.theta_tilde_square(theta.theta_policy(3, 3)))
