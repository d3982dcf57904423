"""numba-compiled kernels; see :mod:`circleifs._kernels_numpy` for the encoding."""

from __future__ import annotations

import math

import numpy as np
from numba import njit

TWO_PI = 2.0 * math.pi
MAX_BISECT = 200

_jit = njit(cache=True, nogil=True)


@_jit
def _sine_inverse_scalar(a, b, y, tol):
    c = b / TWO_PI
    lo = y - a - abs(c)
    hi = y - a + abs(c)
    for _ in range(MAX_BISECT):
        mid = 0.5 * (lo + hi)
        if tol <= 0.0 and (mid == lo or mid == hi):
            break
        if mid + a + c * math.sin(TWO_PI * mid) < y:
            lo = mid
        else:
            hi = mid
        if tol > 0.0 and hi - lo <= tol:
            break
    return 0.5 * (lo + hi)


@_jit
def _interp(x, xp, fp):
    # matches np.interp on the interior; x is clamped to [xp[0], xp[-1]]
    m = xp.shape[0]
    if x <= xp[0]:
        return fp[0]
    if x >= xp[m - 1]:
        return fp[m - 1]
    lo = 0
    hi = m - 1
    while hi - lo > 1:
        mid = (lo + hi) >> 1
        if xp[mid] <= x:
            lo = mid
        else:
            hi = mid
    slope = (fp[hi] - fp[lo]) / (xp[hi] - xp[lo])
    return slope * (x - xp[lo]) + fp[lo]


@_jit
def _lift_scalar(kind, row, t):
    if kind == 0:
        return t + row[0]
    if kind == 1:
        return t + row[0] + row[1] / TWO_PI * math.sin(TWO_PI * t)
    if kind == 2:
        m = int(row[0])
        n = math.floor(t)
        return n + _interp(t - n, row[1 : 1 + m], row[1 + m : 1 + 2 * m])
    return _sine_inverse_scalar(row[0], row[1], t, 0.0)


@_jit
def _lift_inverse_scalar(kind, row, y, tol):
    if kind == 0:
        return y - row[0]
    if kind == 1:
        return _sine_inverse_scalar(row[0], row[1], y, tol)
    if kind == 2:
        m = int(row[0])
        fs = row[1 + m : 1 + 2 * m]
        n = math.floor(y - fs[0])
        return n + _interp(y - n, fs, row[1 : 1 + m])
    return y + row[0] + row[1] / TWO_PI * math.sin(TWO_PI * y)


@_jit
def _wrap_scalar(y):
    x = y - math.floor(y)
    if x >= 1.0:
        x = 0.0
    return x


@_jit
def lift(kind, row, t):
    out = np.empty(t.shape[0])
    for i in range(t.shape[0]):
        out[i] = _lift_scalar(kind, row, t[i])
    return out


@_jit
def lift_inverse(kind, row, y, tol):
    out = np.empty(y.shape[0])
    for i in range(y.shape[0]):
        out[i] = _lift_inverse_scalar(kind, row, y[i], tol)
    return out


@_jit
def apply_indexed(kinds, params, idx, x):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        g = idx[i]
        out[i] = _wrap_scalar(_lift_scalar(kinds[g], params[g], x[i]))
    return out


@_jit
def orbit(kinds, params, word, x0):
    out = np.empty(word.shape[0] + 1)
    x = x0
    out[0] = x
    for j in range(word.shape[0]):
        g = word[j]
        x = _wrap_scalar(_lift_scalar(kinds[g], params[g], x))
        out[j + 1] = x
    return out


@_jit
def _map_wrap_into(kind, row, src, dst):
    # one generator over a whole array; per-kind loops keep the inner loop tight
    if kind == 0:
        a = row[0]
        for i in range(src.shape[0]):
            dst[i] = _wrap_scalar(src[i] + a)
    elif kind == 1:
        a = row[0]
        c = row[1] / TWO_PI
        for i in range(src.shape[0]):
            t = src[i]
            dst[i] = _wrap_scalar(t + a + c * math.sin(TWO_PI * t))
    else:
        for i in range(src.shape[0]):
            dst[i] = _wrap_scalar(_lift_scalar(kind, row, src[i]))


@_jit
def backward(kinds, params, word, xs):
    out = xs.copy()
    for j in range(word.shape[0] - 1, -1, -1):
        g = word[j]
        _map_wrap_into(kinds[g], params[g], out, out)
    return out


@_jit
def iterate_lift(kind, row, x0, n):
    winding = 0
    x = x0
    for _ in range(n):
        y = _lift_scalar(kind, row, x)
        k = math.floor(y)
        winding += int(k)
        x = y - k
        if x >= 1.0:
            x -= 1.0
            winding += 1
    return winding, x


@_jit
def orbit_net(kind, row, x0, ncells, budget):
    hit = np.zeros(ncells, dtype=np.bool_)
    x = x0
    hit[min(int(x * ncells), ncells - 1)] = True
    count = 1
    if count >= ncells:
        return 0
    for step in range(budget):
        x = _wrap_scalar(_lift_scalar(kind, row, x))
        c = min(int(x * ncells), ncells - 1)
        if not hit[c]:
            hit[c] = True
            count += 1
            if count >= ncells:
                return step + 1
    return -1


@_jit
def branch_sorted(kinds, params, probs, xs, ws):
    # An orientation-preserving map sends a circularly sorted array to a
    # cyclic shift of a sorted array, so k-fold branching is a k-way merge.
    k = kinds.shape[0]
    m = xs.shape[0]
    imgs = np.empty((k, m))
    heads = np.empty(k, dtype=np.int64)
    for g in range(k):
        _map_wrap_into(kinds[g], params[g], xs, imgs[g])
        heads[g] = np.argmin(imgs[g])
    pos = np.empty(k * m)
    w = np.empty(k * m)
    taken = np.zeros(k, dtype=np.int64)
    for out in range(k * m):
        sel = -1
        val = 0.0
        for g in range(k):
            if taken[g] < m:
                i = (heads[g] + taken[g]) % m
                if sel < 0 or imgs[g, i] < val:
                    sel = g
                    val = imgs[g, i]
        i = (heads[sel] + taken[sel]) % m
        pos[out] = val
        w[out] = ws[i] * probs[sel]
        taken[sel] += 1
    return pos, w


@_jit
def systematic_indices(cumw, u, n):
    idx = np.empty(n, dtype=np.int64)
    total = cumw[-1]
    j = 0
    last = cumw.shape[0] - 1
    for i in range(n):
        c = (u + i) / n * total
        while j < last and cumw[j] <= c:
            j += 1
        idx[i] = j
    return idx


@_jit
def arc_power_orbit(kind, row, s0, e0, n):
    s_out = np.empty(n + 1)
    e_out = np.empty(n + 1)
    s = s0
    e = e0
    s_out[0] = s
    e_out[0] = e
    for j in range(n):
        fs = _lift_scalar(kind, row, s)
        fe = _lift_scalar(kind, row, e)
        k = math.floor(fs)
        s = fs - k
        e = fe - k
        if s >= 1.0:
            s -= 1.0
            e -= 1.0
        s_out[j + 1] = s
        e_out[j + 1] = e
    return s_out, e_out
