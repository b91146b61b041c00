"""Observed orders for every registry scheme on the single-mode heat problem.

y_t - y_xx = u on (0, 1) with Neumann conditions, v = y_D = sqrt(2) cos(pi x),
nu = 1e-3.  Only the mode k = 1 is excited, so the modal backend isolates the
time discretization error.  Writes convergence.csv next to this script.
"""

from pathlib import Path

from rkocp.conditions import classify
from rkocp.harness import emit_csv, run_many
from rkocp.tableau import SCHEME_NAMES, registry_get

rows, est = run_many(SCHEME_NAMES)
print(f"{'scheme':<16} {'q':>2} {'rate y':>7} {'rate p':>7}")
for name, e in est.items():
    q = classify(registry_get(name)).control_order
    print(f"{name:<16} {q:>2} {e.median_y:7.2f} {e.median_p:7.2f}")

out = emit_csv(rows, est, Path(__file__).with_name("convergence.csv"))
print("\nwrote", out)
