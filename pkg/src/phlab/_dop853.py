"""Compiled complex DOP853 stepper along parametrised paths in the z-plane.

Path kinds: 0 is the segment ``z = z0 + s*dz`` and 1 the arc
``z = c + R*exp(i*s)``.  The real parameter ``s`` is the integration variable.

Right-hand-side modes:
  0  full system plus running integrals, state ``[p, q, int H, int p, int pq]``
  1  linear second-order equation ``u'' = z u' - (A + B z^2) u``, state ``[u, u']``,
     renormalised to keep ``|u| + |u'|`` within a factor 100 of 1 (the log scale
     is returned), so ``atol`` acts as a relative tolerance
  2  frozen system ``u' = -v^2 - u``, ``v' = u^2 + v``

The pole trigger fires when ``|y0| + |y1|`` exceeds ``trigger * (1 + |z|)`` in
mode 0 or ``trigger`` in mode 2; a non-positive trigger disables it.

Status codes: 0 done, 1 pole trigger, 2 step-size underflow, 3 step budget,
4 non-finite state.
"""
from __future__ import annotations

import numpy as np
from numba import njit
from scipy.integrate._ivp import dop853_coefficients as _coef

N_STAGES = _coef.N_STAGES
A = np.ascontiguousarray(_coef.A[:N_STAGES, :N_STAGES])
B = np.ascontiguousarray(_coef.B)
C = np.ascontiguousarray(_coef.C[:N_STAGES])
E3 = np.ascontiguousarray(_coef.E3)
E5 = np.ascontiguousarray(_coef.E5)

DONE, TRIGGER, UNDERFLOW, MAXSTEPS, NONFINITE = 0, 1, 2, 3, 4
RING = 48
PI_BETA = 0.04
EXPO1 = 1.0 / 8.0 - 0.2 * PI_BETA


@njit(cache=True, nogil=True)
def _path(kind, s, z0, dz):
    # for arcs z0 is the centre and dz.real the radius
    if kind == 0:
        return z0 + s * dz, dz
    e = dz.real * np.exp(1j * s)
    return z0 + e, 1j * e


@njit(cache=True, nogil=True)
def _f(mode, kind, s, y, z0, dz, alpha, beta, out):
    z, zs = _path(kind, s, z0, dz)
    if mode == 0:
        p = y[0]
        q = y[1]
        out[0] = (-q * q - z * p - alpha) * zs
        out[1] = (p * p + z * q + beta) * zs
        out[2] = ((p * p * p + q * q * q) / 3.0 + z * p * q + beta * p + alpha * q) * zs
        out[3] = p * zs
        out[4] = p * q * zs
    elif mode == 1:
        out[0] = y[1] * zs
        out[1] = (z * y[1] - (alpha + beta * z * z) * y[0]) * zs
    else:
        u = y[0]
        v = y[1]
        out[0] = (-v * v - u) * zs
        out[1] = (u * u + v) * zs


@njit(cache=True, nogil=True)
def integrate_path(mode, kind, z0, dz, s0, targets, y0, alpha, beta, rtol, atol,
                   trigger, max_steps):
    """Integrate from ``s0`` through the increasing (or decreasing) ``targets``.

    Returns ``(status, n_hit, ys, logs, s_last, y_last, ring_s, ring_y, n_ring, nsteps)``.
    ``ys[k]`` is the state at ``targets[k]`` for ``k < n_hit``; in mode 1
    ``logs[k]`` is the accumulated log scale factor of ``ys[k]``.
    """
    n = y0.shape[0]
    nt = targets.shape[0]
    ys = np.zeros((nt, n), dtype=np.complex128)
    logs = np.zeros(nt)
    ring_s = np.zeros(RING)
    ring_y = np.zeros((RING, n), dtype=np.complex128)
    n_ring = 0
    K = np.zeros((N_STAGES + 1, n), dtype=np.complex128)
    y = y0.copy()
    ynew = np.zeros(n, dtype=np.complex128)
    tmp = np.zeros(n, dtype=np.complex128)
    logscale = 0.0
    s = s0
    if nt == 0:
        return DONE, 0, ys, logs, s, y, ring_s, ring_y, n_ring, 0
    direction = 1.0 if targets[nt - 1] >= s0 else -1.0
    span = abs(targets[nt - 1] - s0)
    scale_s = max(1.0, abs(s0), abs(targets[nt - 1]))

    _f(mode, kind, s, y, z0, dz, alpha, beta, K[0])
    # initial step, Hairer's heuristic
    d0 = 0.0
    d1 = 0.0
    for i in range(n):
        sc = atol + rtol * abs(y[i])
        d0 += (abs(y[i]) / sc) ** 2
        d1 += (abs(K[0, i]) / sc) ** 2
    d0 = np.sqrt(d0 / n)
    d1 = np.sqrt(d1 / n)
    if d0 < 1e-5 or d1 < 1e-5:
        h = 1e-6
    else:
        h = 0.01 * d0 / d1
    h = min(h, span if span > 0 else 1.0, 0.1)
    h = max(h, 1e-10 * scale_s)

    k_target = 0
    snap = 4e-15 * scale_s
    while k_target < nt and (targets[k_target] - s) * direction <= snap:
        for i in range(n):
            ys[k_target, i] = y[i]
        logs[k_target] = logscale
        k_target += 1

    nsteps = 0
    status = DONE
    err_old = 1e-4
    while k_target < nt:
        if nsteps >= max_steps:
            status = MAXSTEPS
            break
        s_goal = targets[k_target]
        last = False
        h_try = h
        if h >= abs(s_goal - s):
            h = abs(s_goal - s)
            last = True
        if h < 1e-14 * scale_s:
            status = UNDERFLOW
            break
        hs = h * direction
        for st in range(1, N_STAGES):
            for i in range(n):
                acc = 0j
                for j in range(st):
                    acc += A[st, j] * K[j, i]
                tmp[i] = y[i] + hs * acc
            _f(mode, kind, s + C[st] * hs, tmp, z0, dz, alpha, beta, K[st])
        for i in range(n):
            acc = 0j
            for j in range(N_STAGES):
                acc += B[j] * K[j, i]
            ynew[i] = y[i] + hs * acc
        _f(mode, kind, s + hs, ynew, z0, dz, alpha, beta, K[N_STAGES])
        err5 = 0.0
        err3 = 0.0
        finite = True
        for i in range(n):
            if not (np.isfinite(ynew[i].real) and np.isfinite(ynew[i].imag)):
                finite = False
            sc = atol + rtol * max(abs(y[i]), abs(ynew[i]))
            a5 = 0j
            a3 = 0j
            for j in range(N_STAGES + 1):
                a5 += E5[j] * K[j, i]
                a3 += E3[j] * K[j, i]
            err5 += (abs(a5) / sc) ** 2
            err3 += (abs(a3) / sc) ** 2
        nsteps += 1
        if not finite:
            h *= 0.2
            continue
        denom = err5 + 0.01 * err3
        if denom > 0.0:
            err = h * err5 / np.sqrt(denom * n)
        else:
            err = 0.0
        if err > 1.0:
            h *= max(0.2, 0.9 * err ** (-1.0 / 8.0))
            continue
        # accepted
        s = s_goal if last else s + hs
        for i in range(n):
            y[i] = ynew[i]
            K[0, i] = K[N_STAGES, i]
        if mode == 1:
            m = abs(y[0]) + abs(y[1])
            if m > 1e2 or m < 1e-2:
                for i in range(n):
                    y[i] /= m
                    K[0, i] /= m
                logscale += np.log(m)
        r = n_ring % RING
        ring_s[r] = s
        for i in range(n):
            ring_y[r, i] = y[i]
        n_ring += 1
        # PI controller (Hairer's dop853 form)
        err_c = max(err, 1e-10)
        fac = min(10.0, max(0.2, 0.9 * err_c ** (-EXPO1) * err_old ** PI_BETA))
        err_old = max(err_c, 1e-4)
        h_next = h * fac
        if last:
            h_next = max(h_next, min(h_try, h * 10.0))
        if last:
            while k_target < nt and (targets[k_target] - s) * direction <= snap:
                for i in range(n):
                    ys[k_target, i] = y[i]
                logs[k_target] = logscale
                k_target += 1
        h = h_next
        if mode != 1 and trigger > 0.0:
            z, _ = _path(kind, s, z0, dz)
            lim = trigger * (1.0 + abs(z)) if mode == 0 else trigger
            if abs(y[0]) + abs(y[1]) > lim:
                status = TRIGGER
                break
    return status, k_target, ys, logs, s, y, ring_s, ring_y, n_ring, nsteps


def unroll_ring(ring_s, ring_y, n_ring):
    """Ring buffer contents in chronological order."""
    m = min(n_ring, RING)
    start = n_ring % RING if n_ring > RING else 0
    idx = [(start + k) % RING for k in range(m)]
    return ring_s[idx], ring_y[idx]
