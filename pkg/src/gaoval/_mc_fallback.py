"""Pure-numpy twin of the compiled Monte Carlo kernel.

Selected at import time when the extension is unavailable.  Steps are
vectorized across the path block; update and accumulation mirror the
compiled loop's expressions, so per-path utilities agree with the
extension to rounding noise in the power evaluation (~1e-14 relative).
Ruined paths are flagged and their accumulator left NaN; the estimator
drops them either way.
"""

import numpy as np

BACKEND_NAME = "python"


def step_paths(z, drift_fac, vol, wq, y0, one_minus_gamma, out_util, out_ruined):
    n_paths, n_steps = z.shape
    if drift_fac.shape[0] != n_steps or wq.shape[0] != n_steps + 1:
        raise ValueError("coefficient arrays do not match the step count")
    # Step-major copy keeps each step's draws contiguous in the loop.
    z_by_step = np.ascontiguousarray(z.T)
    y = np.full(n_paths, y0)
    acc = np.full(n_paths, wq[0] * y0**one_minus_gamma)
    ruined = np.zeros(n_paths, dtype=bool)
    any_ruined = False
    for n in range(n_steps):
        y *= drift_fac[n] + vol * z_by_step[n]
        hit = y <= 0.0
        if hit.any():
            ruined |= hit
            y[ruined] = np.nan
            any_ruined = True
        acc += wq[n + 1] * np.power(y, one_minus_gamma)
    if any_ruined:
        acc[ruined] = np.nan
    out_util[:] = acc
    out_ruined[:] = ruined
