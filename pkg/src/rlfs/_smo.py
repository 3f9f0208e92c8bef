"""Compiled inner loop of Platt's sequential minimal optimization.

Conventions follow Platt (1998): the decision value is
``u_i = sum_j alpha_j y_j K_ij - b`` and ``E_i = u_i - y_i`` is kept for every
training point. ``state`` holds ``[b, step_count, rand_cursor]`` so the
helpers can mutate shared scalars without closures.
"""

import numpy as np
from numba import njit

_B, _STEPS, _CURSOR = 0, 1, 2
# Multipliers within this distance of a bound are snapped onto it.
_SNAP = 1e-10


@njit(cache=True, nogil=True)
def _take_step(i1, i2, K, y, alpha, E, C, eps, state):
    if i1 == i2:
        return 0
    a1 = alpha[i1]
    a2 = alpha[i2]
    y1 = y[i1]
    y2 = y[i2]
    E1 = E[i1]
    E2 = E[i2]
    s = y1 * y2
    if s < 0:
        L = max(0.0, a2 - a1)
        H = min(C, C + a2 - a1)
    else:
        L = max(0.0, a2 + a1 - C)
        H = min(C, a2 + a1)
    if H - L < 1e-14:
        return 0
    k11 = K[i1, i1]
    k12 = K[i1, i2]
    k22 = K[i2, i2]
    eta = k11 + k22 - 2.0 * k12
    if eta > 1e-12:
        a2new = a2 + y2 * (E1 - E2) / eta
        if a2new < L:
            a2new = L
        elif a2new > H:
            a2new = H
    else:
        # Objective restricted to the segment is linear; compare its endpoints.
        b = state[_B]
        f1 = y1 * (E1 + b) - a1 * k11 - s * a2 * k12
        f2 = y2 * (E2 + b) - s * a1 * k12 - a2 * k22
        L1 = a1 + s * (a2 - L)
        H1 = a1 + s * (a2 - H)
        lobj = L1 * f1 + L * f2 + 0.5 * L1 * L1 * k11 + 0.5 * L * L * k22 + s * L * L1 * k12
        hobj = H1 * f1 + H * f2 + 0.5 * H1 * H1 * k11 + 0.5 * H * H * k22 + s * H * H1 * k12
        if lobj < hobj - eps:
            a2new = L
        elif lobj > hobj + eps:
            a2new = H
        else:
            a2new = a2
    if a2new < _SNAP:
        a2new = 0.0
    elif a2new > C - _SNAP:
        a2new = C
    if abs(a2new - a2) < eps * (a2new + a2 + eps):
        return 0
    a1new = a1 + s * (a2 - a2new)
    if a1new < _SNAP:
        a1new = 0.0
    elif a1new > C - _SNAP:
        a1new = C

    b = state[_B]
    d1 = y1 * (a1new - a1)
    d2 = y2 * (a2new - a2)
    b1 = E1 + d1 * k11 + d2 * k12 + b
    b2 = E2 + d1 * k12 + d2 * k22 + b
    if 0.0 < a1new < C:
        bnew = b1
    elif 0.0 < a2new < C:
        bnew = b2
    else:
        bnew = 0.5 * (b1 + b2)
    db = bnew - b
    n = y.shape[0]
    for k in range(n):
        E[k] += d1 * K[i1, k] + d2 * K[i2, k] - db
    alpha[i1] = a1new
    alpha[i2] = a2new
    state[_B] = bnew
    state[_STEPS] += 1.0
    return 1


@njit(cache=True, nogil=True)
def _next_start(starts, state):
    c = int(state[_CURSOR])
    state[_CURSOR] = (c + 1) % starts.shape[0]
    return starts[c]


@njit(cache=True, nogil=True)
def _examine(i2, K, y, alpha, E, C, tol, eps, starts, state):
    y2 = y[i2]
    a2 = alpha[i2]
    E2 = E[i2]
    r2 = E2 * y2
    if not ((r2 < -tol and a2 < C) or (r2 > tol and a2 > 0.0)):
        return 0
    n = y.shape[0]
    # Second-choice heuristic: the non-bound partner with the largest |E1 - E2|.
    best = -1
    best_gap = -1.0
    n_free = 0
    for k in range(n):
        if 0.0 < alpha[k] < C:
            n_free += 1
            gap = abs(E[k] - E2)
            if gap > best_gap:
                best_gap = gap
                best = k
    if n_free > 1 and best >= 0:
        if _take_step(best, i2, K, y, alpha, E, C, eps, state):
            return 1
    start = _next_start(starts, state)
    for k in range(n):
        i1 = (start + k) % n
        if 0.0 < alpha[i1] < C:
            if _take_step(i1, i2, K, y, alpha, E, C, eps, state):
                return 1
    start = _next_start(starts, state)
    for k in range(n):
        i1 = (start + k) % n
        if _take_step(i1, i2, K, y, alpha, E, C, eps, state):
            return 1
    return 0


@njit(cache=True, nogil=True)
def _dual_objective(y, alpha, E, b):
    # W = sum(alpha) - 1/2 sum_i alpha_i y_i (u_i + b), with u_i = E_i + y_i - b.
    total = 0.0
    quad = 0.0
    for i in range(y.shape[0]):
        total += alpha[i]
        quad += alpha[i] * y[i] * (E[i] + y[i])
    return total - 0.5 * quad


@njit(cache=True, nogil=True)
def smo_solve(K, y, C, tol, eps, max_passes, max_steps, starts):
    """Run SMO to completion.

    Returns ``(alpha, b, steps, status)`` where status is 0 when a full sweep
    found no violator, 1 when the dual objective stalled for ``max_passes``
    consecutive full sweeps and 2 when ``max_steps`` pair updates were spent.
    """
    n = y.shape[0]
    alpha = np.zeros(n)
    E = -y.astype(np.float64)
    state = np.zeros(3)
    examine_all = True
    num_changed = 0
    stalled = 0
    last_obj = 0.0
    status = 0
    while num_changed > 0 or examine_all:
        num_changed = 0
        if examine_all:
            for i in range(n):
                num_changed += _examine(i, K, y, alpha, E, C, tol, eps, starts, state)
                if state[_STEPS] >= max_steps:
                    break
        else:
            for i in range(n):
                if 0.0 < alpha[i] < C:
                    num_changed += _examine(i, K, y, alpha, E, C, tol, eps, starts, state)
                    if state[_STEPS] >= max_steps:
                        break
        if state[_STEPS] >= max_steps:
            status = 2
            break
        if examine_all:
            obj = _dual_objective(y, alpha, E, state[_B])
            if num_changed > 0 and obj - last_obj <= 1e-12 * max(1.0, abs(obj)):
                stalled += 1
                if stalled >= max_passes:
                    status = 1
                    break
            else:
                stalled = 0
            last_obj = obj
            examine_all = False
        elif num_changed == 0:
            examine_all = True
    return alpha, state[_B], int(state[_STEPS]), status
