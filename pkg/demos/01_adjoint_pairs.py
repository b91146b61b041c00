"""Which tableau advances the costate?

For the state tableau (A, b) the adjoint equation is integrated with
a_hat_ij = b_j - b_j a_ji / b_i and the same weights.  Gauss is its own
partner, Lobatto IIIA and IIIB swap, and the map is an involution.
"""

from rkocp.tableau import adjoint_tableau, registry, registry_get

for name in ("gauss-4", "lobatto-iiia-4", "stormer-verlet", "radau-iia-3"):
    t = registry_get(name)
    adj = adjoint_tableau(t)
    partner = next((n for n, u in registry().items() if u == adj), "not in the registry")
    print(f"{name:>16} -> {partner}")
    print(adj)

print("involution holds on the registry:",
      all(adjoint_tableau(adjoint_tableau(t)) == t for t in registry().values()))
