"""Single-coordinate Metropolis sweeps for the ordered log-gas.

Target density on the ordered support (type A: -1 < y_1 < ... < y_k < 1,
type C: 0 < y_1 < ... < y_k < 1), up to normalization:

    exp( beta * [ sum_{i<j} log w(y_i, y_j) + field ] )

with pair term log|y_j - y_i| (A) or log|y_j^2 - y_i^2| (C) and field
sum_i log y_i for C only.  beta = 1 samples the endpoint ensemble; other
beta values drive the thermodynamic-integration estimate of the
normalizing constant.

Proposals that break the ordering or leave the support are rejected, which
preserves detailed balance on the ordered region.  The kernel also returns
the accumulated acceptance count; the pair/field log-density of the final
state is recomputed by the caller when needed.

Draw layout: sweep s move i uses normals[c, s, i] and unifs[c, s, i] for
chain c; indexing (not consumption order) fixes the mapping, so both
backends read the same numbers.
"""

import math

import numpy as np

from .._backend import USE_NUMBA, njit


def _loggas_sweeps_numpy(y, normals, unifs, ztag, beta, scale, lo, hi):
    n_chains, n_sweeps, k = normals.shape
    acc = 0
    for s in range(n_sweeps):
        for i in range(k):
            yi = y[:, i]
            prop = yi + scale * normals[:, s, i]
            lo_i = y[:, i - 1] if i > 0 else np.full(n_chains, lo)
            hi_i = y[:, i + 1] if i < k - 1 else np.full(n_chains, hi)
            ok = (prop > lo_i) & (prop < hi_i)
            if ztag == 1:
                ok &= prop > 0.0
            delta = np.zeros(n_chains)
            rows = np.nonzero(ok)[0]
            if rows.size == 0:
                continue
            yr = y[rows]
            pr = prop[rows]
            cur = yi[rows]
            if ztag == 0:
                num = np.abs(pr[:, None] - yr)
                den = np.abs(cur[:, None] - yr)
            else:
                num = np.abs(pr[:, None] ** 2 - yr**2)
                den = np.abs(cur[:, None] ** 2 - yr**2)
            num[:, i] = 1.0
            den[:, i] = 1.0
            d = np.sum(np.log(num) - np.log(den), axis=1)
            if ztag == 1:
                d = d + (np.log(pr) - np.log(cur))
            delta[rows] = beta * d
            accept = ok & (np.log(unifs[:, s, i]) < delta)
            y[accept, i] = prop[accept]
            acc += int(np.count_nonzero(accept))
    return acc


@njit(cache=True, nogil=True)
def _loggas_sweeps_numba(y, normals, unifs, ztag, beta, scale, lo, hi):  # pragma: no cover - exercised via dispatch
    n_chains, n_sweeps, k = normals.shape
    acc = 0
    for c in range(n_chains):
        for s in range(n_sweeps):
            for i in range(k):
                yi = y[c, i]
                prop = yi + scale * normals[c, s, i]
                lo_i = y[c, i - 1] if i > 0 else lo
                hi_i = y[c, i + 1] if i < k - 1 else hi
                if prop <= lo_i or prop >= hi_i:
                    continue
                if ztag == 1 and prop <= 0.0:
                    continue
                d = 0.0
                if ztag == 0:
                    for j in range(k):
                        if j == i:
                            continue
                        d += math.log(abs(prop - y[c, j])) - math.log(abs(yi - y[c, j]))
                else:
                    for j in range(k):
                        if j == i:
                            continue
                        d += math.log(abs(prop * prop - y[c, j] * y[c, j])) - math.log(
                            abs(yi * yi - y[c, j] * y[c, j])
                        )
                    d += math.log(prop) - math.log(yi)
                if math.log(unifs[c, s, i]) < beta * d:
                    y[c, i] = prop
                    acc += 1
    return acc


loggas_sweeps = _loggas_sweeps_numba if USE_NUMBA else _loggas_sweeps_numpy
