"""An order-4 SDIRK scheme that only delivers order 2 for the control problem.

Its classical order conditions all hold, but the first additional condition,
sum_i d_i^2 / b_i = 1/3, fails exactly.  The coupled solve shows the
reduction, while the plain state equation with a known source keeps order 4.
"""

import numpy as np

from rkocp.conditions import check_simplifying, classify
from rkocp.harness import run_convergence, state_only_convergence
from rkocp.tableau import registry_get
from rkocp.theorems import sdirk_counterexample

t = registry_get("sdirk-4")
print("sum d_i^2/b_i =", sdirk_counterexample(t), "(1/3 would be needed)")
print("(p, eta, zeta) =", check_simplifying(t))
print(classify(t))

rows, est = run_convergence(t, N_list=(10, 20, 40, 80, 160))
print("\ncoupled optimality system")
for r in rows:
    print(f"  N={r.N:4d}  err_y={r.err_y:.3e}  err_p={r.err_p:.3e}")
print(f"  median rates: y {est.median_y:.2f}, p {est.median_p:.2f}")

errs, rates = state_only_convergence(t)
print("\nstate equation only, exact control as source")
print("  errors:", " ".join(f"{e:.2e}" for e in errs))
print(f"  median rate {np.median(rates):.2f}")
