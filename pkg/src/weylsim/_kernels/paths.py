"""Hot loop of the Monte Carlo routes: step paths through one chunk of increments.

Two interchangeable implementations (numba scalar loops / vectorized numpy)
with identical semantics; `.._backend` picks one at import time.

Shared contract
---------------
``step_chunk(pos, run, box_ok, normals, unifs, ztag, mode, L, sqrt_dt, dt, bridge)``

* pos (n, k): current positions, updated in place for rows with run=True
* run (n,): path still being stepped; cleared in place when the path dies
* box_ok (n,): joint-event flag for mode 1, in place
* normals (n, S, k): pre-generated standard normals (chunk of S steps)
* unifs (n, S): pre-generated uniforms for the box bridge test (unused
  entries are simply never indexed, so layouts stay reproducible)
* ztag: 0 = A, 1 = C, 2 = D chamber ordering constraints
* mode: 0 = kill on chamber-or-box exit (plain survival);
        1 = kill on chamber exit only, record box exits in box_ok
* L: box half-width; bridge: apply the exact one-dimensional crossing
  probability exp(-2(L-a)(L-b)/dt) on every box face between step endpoints.

A path dies at the first step whose endpoint (or bridged excursion) leaves
the domain; ordering constraints are endpoint-only by design.
"""

import math

import numpy as np

from .._backend import USE_NUMBA, njit


def _chamber_ok_rows(new, ztag):
    """Vectorized ordering test; new is (m, k)."""
    k = new.shape[1]
    if ztag == 0:  # A
        if k == 1:
            return np.ones(new.shape[0], dtype=bool)
        return np.all(new[:, :-1] < new[:, 1:], axis=1)
    if ztag == 1:  # C
        ok = new[:, 0] > 0.0
        if k > 1:
            ok &= np.all(new[:, :-1] < new[:, 1:], axis=1)
        return ok
    # D
    if k == 1:
        return np.ones(new.shape[0], dtype=bool)
    ok = np.abs(new[:, 0]) < new[:, 1]
    if k > 2:
        ok &= np.all(new[:, 1:-1] < new[:, 2:], axis=1)
    return ok


def _step_chunk_numpy(pos, run, box_ok, normals, unifs, ztag, mode, L, sqrt_dt, dt, bridge):
    n_steps = normals.shape[1]
    for s in range(n_steps):
        ii = np.nonzero(run)[0]
        if ii.size == 0:
            return
        prev = pos[ii]
        new = prev + sqrt_dt * normals[ii, s, :]
        inside = np.all(np.abs(new) < L, axis=1)
        box_exit = ~inside
        if bridge:
            both = inside  # bridge only where both endpoints are inside
            if np.any(both):
                a = prev[both]
                b = new[both]
                p_up = np.exp(-2.0 * (L - a) * (L - b) / dt)
                p_dn = np.exp(-2.0 * (L + a) * (L + b) / dt)
                p_surv = np.prod((1.0 - p_up) * (1.0 - p_dn), axis=1)
                crossed = unifs[ii[both], s] >= p_surv
                tmp = box_exit.copy()
                tmp[both] |= crossed
                box_exit = tmp
        chamber_exit = ~_chamber_ok_rows(new, ztag)
        pos[ii] = new
        if mode == 0:
            run[ii[box_exit | chamber_exit]] = False
        else:
            box_ok[ii[box_exit]] = False
            run[ii[chamber_exit]] = False


@njit(cache=True, nogil=True)
def _step_chunk_numba(pos, run, box_ok, normals, unifs, ztag, mode, L, sqrt_dt, dt, bridge):  # pragma: no cover - exercised via dispatch
    n, n_steps, k = normals.shape
    for p in range(n):
        if not run[p]:
            continue
        for s in range(n_steps):
            box_exit = False
            chamber_exit = False
            p_surv = 1.0
            inside = True
            for j in range(k):
                a = pos[p, j]
                b = a + sqrt_dt * normals[p, s, j]
                pos[p, j] = b
                if abs(b) >= L:
                    inside = False
                elif bridge and inside:
                    p_surv *= (1.0 - math.exp(-2.0 * (L - a) * (L - b) / dt)) * (
                        1.0 - math.exp(-2.0 * (L + a) * (L + b) / dt)
                    )
            if not inside:
                box_exit = True
            elif bridge and unifs[p, s] >= p_surv:
                box_exit = True
            if ztag == 0:
                for j in range(k - 1):
                    if pos[p, j] >= pos[p, j + 1]:
                        chamber_exit = True
                        break
            elif ztag == 1:
                if pos[p, 0] <= 0.0:
                    chamber_exit = True
                else:
                    for j in range(k - 1):
                        if pos[p, j] >= pos[p, j + 1]:
                            chamber_exit = True
                            break
            else:
                if k > 1:
                    if abs(pos[p, 0]) >= pos[p, 1]:
                        chamber_exit = True
                    else:
                        for j in range(1, k - 1):
                            if pos[p, j] >= pos[p, j + 1]:
                                chamber_exit = True
                                break
            if mode == 0:
                if box_exit or chamber_exit:
                    run[p] = False
                    break
            else:
                if box_exit:
                    box_ok[p] = False
                if chamber_exit:
                    run[p] = False
                    break


step_chunk = _step_chunk_numba if USE_NUMBA else _step_chunk_numpy
