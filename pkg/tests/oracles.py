"""Independent reference computations used only by the tests."""

import itertools
import math

import numpy as np
from scipy.optimize import linprog


def circ(x, y):
    d = abs(x - y) % 1.0
    return min(d, 1.0 - d)


def w1_linprog(xa, wa, xb, wb):
    """Circular W1 as a transport linear program with the geodesic ground cost."""
    m, n = len(xa), len(xb)
    cost = np.array([[circ(a, b) for b in xb] for a in xa]).ravel()
    a_eq = []
    for i in range(m):
        row = np.zeros(m * n)
        row[i * n:(i + 1) * n] = 1
        a_eq.append(row)
    for j in range(n):
        row = np.zeros(m * n)
        row[j::n] = 1
        a_eq.append(row)
    res = linprog(cost, A_eq=np.array(a_eq), b_eq=np.concatenate([wa, wb]), bounds=(0, None), method="highs")
    assert res.success
    return res.fun


def w1_matching(xa, xb):
    """Equal-weight atoms: best assignment by brute force over all permutations."""
    n = len(xa)
    return min(sum(circ(xa[i], xb[p[i]]) for i in range(n)) for p in itertools.permutations(range(n))) / n


def cos_second_derivative_bound(coeffs):
    return sum(abs(a) * (2 * math.pi * m) ** 2 for m, a in enumerate(coeffs, start=1))
