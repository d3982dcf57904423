"""Pure-numpy kernels.

Same signatures and semantics as :mod:`circleifs._kernels_numba`; used when
numba is disabled or unavailable. Generator indices are 0-based here.

Generator encoding (``kind``, parameter ``row``):

* ``0`` rotation: ``row[0]`` = angle
* ``1`` sine: ``row[0] = a``, ``row[1] = b``
* ``2`` piecewise linear: ``row[0] = m``, then ``m`` knot abscissae, then ``m`` ordinates
* ``3`` inverse of sine: ``row[0] = a``, ``row[1] = b``
"""

from __future__ import annotations

import math

import numpy as np

TWO_PI = 2.0 * math.pi
MAX_BISECT = 200


def _wrap(x):
    r = x - np.floor(x)
    r[r >= 1.0] = 0.0
    return r


def _pl_parts(row):
    m = int(row[0])
    return row[1 : 1 + m], row[1 + m : 1 + 2 * m]


def _sine_inverse(a, b, y, tol):
    c = b / TWO_PI
    y = np.asarray(y, dtype=np.float64)
    lo = y - a - abs(c)
    hi = y - a + abs(c)
    for _ in range(MAX_BISECT):
        mid = 0.5 * (lo + hi)
        if tol <= 0.0 and np.all((mid == lo) | (mid == hi)):
            break
        below = mid + a + c * np.sin(TWO_PI * mid) < y
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if tol > 0.0 and np.all(hi - lo <= tol):
            break
    return 0.5 * (lo + hi)


def lift(kind, row, t):
    t = np.asarray(t, dtype=np.float64)
    if kind == 0:
        return t + row[0]
    if kind == 1:
        return t + row[0] + row[1] / TWO_PI * np.sin(TWO_PI * t)
    if kind == 2:
        ts, fs = _pl_parts(row)
        n = np.floor(t)
        return n + np.interp(t - n, ts, fs)
    return _sine_inverse(row[0], row[1], t, 0.0)


def lift_inverse(kind, row, y, tol):
    y = np.asarray(y, dtype=np.float64)
    if kind == 0:
        return y - row[0]
    if kind == 1:
        return _sine_inverse(row[0], row[1], y, tol)
    if kind == 2:
        ts, fs = _pl_parts(row)
        n = np.floor(y - fs[0])
        return n + np.interp(y - n, fs, ts)
    c = row[1] / TWO_PI
    return y + row[0] + c * np.sin(TWO_PI * y)


def apply_indexed(kinds, params, idx, x):
    """Map ``x[i]`` by generator ``idx[i]``; returns wrapped positions."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    for g in range(len(kinds)):
        sel = idx == g
        if sel.any():
            out[sel] = lift(kinds[g], params[g], x[sel])
    return _wrap(out)


def _sine_inverse_scalar(a, b, y):
    c = b / TWO_PI
    lo = y - a - abs(c)
    hi = y - a + abs(c)
    for _ in range(MAX_BISECT):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if mid + a + c * math.sin(TWO_PI * mid) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _lift_scalar(kind, row, t):
    if kind == 0:
        return t + row[0]
    if kind == 1:
        return t + row[0] + row[1] / TWO_PI * math.sin(TWO_PI * t)
    if kind == 3:
        return _sine_inverse_scalar(row[0], row[1], t)
    return float(lift(kind, row, np.array([t]))[0])


def orbit(kinds, params, word, x0):
    """Forward orbit ``x0, g_{w1}(x0), g_{w2} g_{w1}(x0), ...`` (wrapped)."""
    out = np.empty(len(word) + 1)
    x = float(x0)
    out[0] = x
    for j, g in enumerate(word):
        y = _lift_scalar(kinds[g], params[g], x)
        x = y - math.floor(y)
        if x >= 1.0:
            x = 0.0
        out[j + 1] = x
    return out


def backward(kinds, params, word, xs):
    """Apply ``g_{w1} o g_{w2} o ... o g_{wn}`` to every point (last letter first)."""
    x = np.array(xs, dtype=np.float64, copy=True)
    for g in word[::-1]:
        x = _wrap(lift(kinds[g], params[g], x))
    return x


def iterate_lift(kind, row, x0, n):
    """Iterate the lift ``n`` times from ``x0``; returns (winding, fractional part)."""
    winding = 0
    x = float(x0)
    for _ in range(n):
        y = _lift_scalar(kind, row, x)
        k = math.floor(y)
        winding += k
        x = y - k
        if x >= 1.0:
            x -= 1.0
            winding += 1
    return winding, x


def orbit_net(kind, row, x0, ncells, budget):
    """Steps until the orbit of ``x0`` has visited all ``ncells`` cells; -1 if not within budget."""
    hit = np.zeros(ncells, dtype=bool)
    x = float(x0)
    hit[min(int(x * ncells), ncells - 1)] = True
    count = 1
    if count >= ncells:
        return 0
    done = 0
    while done < budget:
        m = min(4096, budget - done)
        pts = np.empty(m)
        for j in range(m):
            y = _lift_scalar(kind, row, x)
            x = y - math.floor(y)
            if x >= 1.0:
                x = 0.0
            pts[j] = x
        cells = np.minimum((pts * ncells).astype(np.int64), ncells - 1)
        uniq, first = np.unique(cells, return_index=True)
        fresh = np.sort(first[~hit[uniq]])
        if count + len(fresh) >= ncells:
            return done + int(fresh[ncells - count - 1]) + 1
        hit[uniq] = True
        count += len(fresh)
        done += m
    return -1


def branch_sorted(kinds, params, probs, xs, ws):
    """One exact Markov step: every atom splits into ``k`` images; output sorted by position."""
    k = len(kinds)
    pos = np.concatenate([_wrap(lift(kinds[g], params[g], xs)) for g in range(k)])
    w = np.concatenate([ws * probs[g] for g in range(k)])
    order = np.argsort(pos, kind="stable")
    return pos[order], w[order]


def systematic_indices(cumw, u, n):
    """Systematic resampling: indices hit by the comb ``(u + j) / n``."""
    total = cumw[-1]
    comb = (u + np.arange(n)) / n * total
    idx = np.searchsorted(cumw, comb, side="right")
    return np.minimum(idx, len(cumw) - 1)


def arc_power_orbit(kind, row, s0, e0, n):
    """Iterate an arc (lifted endpoints) ``n`` times under one generator.

    Both endpoints are shifted by the same integer each step, so ``e - s``
    stays the arc length and ``s`` stays in ``[0, 1)``.
    """
    s_out = np.empty(n + 1)
    e_out = np.empty(n + 1)
    s, e = float(s0), float(e0)
    s_out[0], e_out[0] = s, e
    for j in range(n):
        fs = _lift_scalar(kind, row, s)
        fe = _lift_scalar(kind, row, e)
        k = math.floor(fs)
        s, e = fs - k, fe - k
        if s >= 1.0:
            s, e = s - 1.0, e - 1.0
        s_out[j + 1], e_out[j + 1] = s, e
    return s_out, e_out
