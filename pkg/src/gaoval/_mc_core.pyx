# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loop for the wealth Monte Carlo.

One call advances a block of paths through every Euler step and
accumulates the discounted-utility quadrature per path.  The state is
the annuity-inclusive wealth y = x + H/r, which evolves as

    y <- y * (drift_fac[n] + vol * z)

and contributes wq[n] * y**(1-gamma) at each node (trapezoid weights,
discount and survival already folded into wq).  The recursion and the
power accumulation run as separate passes over a per-path buffer so the
compiler can vectorize the power calls.
"""

from libc.math cimport pow

import numpy as np

BACKEND_NAME = "cython"


def step_paths(double[:, ::1] z, double[::1] drift_fac, double vol,
               double[::1] wq, double y0, double one_minus_gamma,
               double[::1] out_util, unsigned char[::1] out_ruined):
    cdef Py_ssize_t n_paths = z.shape[0]
    cdef Py_ssize_t n_steps = z.shape[1]
    cdef Py_ssize_t i, n, stop
    cdef double y, acc
    cdef double head = wq[0] * pow(y0, one_minus_gamma)
    if drift_fac.shape[0] != n_steps or wq.shape[0] != n_steps + 1:
        raise ValueError("coefficient arrays do not match the step count")
    ybuf_arr = np.empty(n_steps)
    cdef double[::1] ybuf = ybuf_arr
    with nogil:
        for i in range(n_paths):
            y = y0
            out_ruined[i] = 0
            stop = n_steps
            for n in range(n_steps):
                y = y * (drift_fac[n] + vol * z[i, n])
                if y <= 0.0:
                    out_ruined[i] = 1
                    stop = n
                    break
                ybuf[n] = y
            acc = head
            for n in range(stop):
                acc = acc + wq[n + 1] * pow(ybuf[n], one_minus_gamma)
            out_util[i] = acc
