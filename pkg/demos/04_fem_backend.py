"""The same problem on Lagrange finite elements, with M != I.

Cells and steps are refined together (tau ~ h); the observed rate is
limited by whichever of the time and space discretizations is weaker.
"""

from rkocp.harness import BackendSpec, run_convergence

for degree, scheme in ((1, "gauss-4"), (2, "radau-iia-3"), (3, "gauss-4")):
    rows, est = run_convergence(scheme, BackendSpec("fem", degree=degree), 1e-3, (8, 16, 32, 64))
    errs = "  ".join(f"{r.err_y:.2e}" for r in rows)
    print(f"P{degree} + {scheme:<12} err_y: {errs}   rate {est.median_y:.2f}")
