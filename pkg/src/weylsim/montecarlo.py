"""Monte Carlo oracle: killed Brownian paths in truncated chambers.

Paths take independent Gaussian increments of step dt; exit from the box
faces optionally gets the exact one-dimensional bridge crossing correction,
exit from the ordering constraints is detected per step (documented O(sqrt dt)
bias, controlled by dt).  Work is split into fixed-size path batches, each
drawing from its own Philox sub-stream, so estimates are bit-reproducible
for any thread count.
"""

import csv
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._kernels import step_chunk
from ._rng import batch_sizes, stream
from .chambers import ChamberSpec, WeylType
from .spectral import _check_point

__all__ = [
    "McConfig",
    "McEstimate",
    "InsufficientStatistics",
    "simulate_survival",
    "sample_conditioned_endpoints",
    "write_endpoints_csv",
]

BATCH = 4096
CHUNK_STEPS = 256
_ZTAG = {WeylType.A: 0, WeylType.C: 1, WeylType.D: 2}


class InsufficientStatistics(RuntimeError):
    """Raised when too few paths survive to support the requested estimate."""


@dataclass(frozen=True)
class McConfig:
    """Path-simulation settings.

    dt=None resolves to min(1e-3, t/1000) at run time; dt must stay below
    t/10.  With antithetic on, odd trailing paths are dropped so every
    batch pairs path i with its mirrored partner.
    """

    paths: int = 100_000
    dt: float | None = None
    seed: int = 0
    bridge_correction: bool = True
    antithetic: bool = False
    threads: int = 1

    def __post_init__(self):
        if self.paths < 1:
            raise ValueError("paths must be >= 1")
        if self.dt is not None and not self.dt > 0:
            raise ValueError("dt must be > 0")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    def resolve_dt(self, t: float) -> float:
        dt = self.dt if self.dt is not None else min(1e-3, t / 1000.0)
        if dt > t / 10.0 + 1e-15:
            raise ValueError(f"dt={dt} too coarse for horizon t={t} (need dt <= t/10)")
        return dt


@dataclass(frozen=True)
class McEstimate:
    value: float
    std_error: float
    paths: int
    survivors: int


def _run_batch(spec, t, x0, cfg, mode, batch_index, n_batch, collect_endpoints, stream_key):
    k = spec.k
    ztag = _ZTAG[spec.weyl_type]
    L = spec.half_width
    dt = cfg.resolve_dt(t)
    n_steps = max(10, int(round(t / dt)))
    dt = t / n_steps
    sqrt_dt = math.sqrt(dt)
    rng = stream(cfg.seed, *stream_key, batch_index)

    pos = np.tile(np.asarray(x0, dtype=float), (n_batch, 1))
    run = np.ones(n_batch, dtype=np.bool_)
    box_ok = np.ones(n_batch, dtype=np.bool_)
    done = 0
    empty_u = np.zeros((0, 0))
    while done < n_steps:
        s = min(CHUNK_STEPS, n_steps - done)
        if cfg.antithetic:
            half = n_batch // 2
            z = rng.standard_normal((half, s, k))
            normals = np.concatenate([z, -z], axis=0)
            unifs = rng.random((n_batch, s)) if cfg.bridge_correction else empty_u
            step_chunk(pos, run, box_ok, normals, unifs, ztag, mode, L, sqrt_dt, dt, cfg.bridge_correction)
        else:
            ii = np.nonzero(run)[0]
            if ii.size == 0:
                break
            normals = rng.standard_normal((ii.size, s, k))
            unifs = rng.random((ii.size, s)) if cfg.bridge_correction else empty_u
            pos_s = pos[ii].copy()
            run_s = np.ones(ii.size, dtype=np.bool_)
            box_s = box_ok[ii].copy()
            step_chunk(pos_s, run_s, box_s, normals, unifs, ztag, mode, L, sqrt_dt, dt, cfg.bridge_correction)
            pos[ii] = pos_s
            run[ii] = run_s
            box_ok[ii] = box_s
        done += s

    out = {}
    if mode == 0:
        out["survivors"] = int(np.count_nonzero(run))
        if cfg.antithetic:
            half = n_batch // 2
            out["pair_values"] = 0.5 * (
                run[:half].astype(float) + run[half : 2 * half].astype(float)
            )
        if collect_endpoints:
            out["endpoints"] = pos[run].copy()
    else:
        out["chamber"] = int(np.count_nonzero(run))
        out["joint"] = int(np.count_nonzero(run & box_ok))
    return out


def _run_all(spec, t, x0, cfg, mode, collect_endpoints=False, stream_key=(0,)):
    n_paths = cfg.paths
    if cfg.antithetic:
        n_paths -= n_paths % 2
        if n_paths == 0:
            raise ValueError("antithetic runs need at least 2 paths")
    sizes = batch_sizes(n_paths, BATCH)
    if cfg.antithetic:
        sizes = [s - s % 2 for s in sizes]
        sizes = [s for s in sizes if s > 0]

    def work(args):
        b, n = args
        return _run_batch(spec, t, x0, cfg, mode, b, n, collect_endpoints, stream_key)

    jobs = list(enumerate(sizes))
    if cfg.threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(work, jobs))
    else:
        results = [work(j) for j in jobs]
    return sum(s for s in sizes), results


def simulate_survival(spec: ChamberSpec, t: float, x, cfg: McConfig) -> McEstimate:
    """Fraction of discretized paths never leaving the truncated chamber by t."""
    x0 = _check_point(spec, x, "x")
    if not t > 0:
        raise ValueError("t must be > 0")
    total, results = _run_all(spec, t, x0, cfg, mode=0)
    survivors = sum(r["survivors"] for r in results)
    value = survivors / total
    if cfg.antithetic:
        pv = np.concatenate([r["pair_values"] for r in results])
        se = float(np.std(pv, ddof=1) / math.sqrt(len(pv))) if len(pv) > 1 else 0.0
    else:
        se = math.sqrt(value * (1.0 - value) / total)
    return McEstimate(value=value, std_error=se, paths=total, survivors=survivors)


def sample_conditioned_endpoints(spec: ChamberSpec, t: float, x, cfg: McConfig, want: int):
    """Endpoints of surviving paths (rows are chamber points), at most ``want``.

    Plain rejection: runs cfg.paths paths and keeps survivors; fewer than
    ``want`` rows come back when survival is rare.
    """
    x0 = _check_point(spec, x, "x")
    if want < 1:
        raise ValueError("want must be >= 1")
    total, results = _run_all(spec, t, x0, cfg, mode=0, collect_endpoints=True)
    ends = [r["endpoints"] for r in results if r["endpoints"].size]
    endpoints = np.concatenate(ends, axis=0) if ends else np.empty((0, spec.k))
    if endpoints.shape[0] == 0:
        warnings.warn(
            f"no surviving paths out of {total}; returning an empty endpoint set",
            stacklevel=2,
        )
    return endpoints[:want]


def conditional_box_survival(spec: ChamberSpec, t: float, x, cfg: McConfig):
    """Estimate P(box survival | chamber survival) on common paths.

    Returns (estimate, se, chamber_survivors, joint_survivors).  The chamber
    exit detection cancels between numerator and denominator; only box faces
    (bridge corrected) contribute detection bias.
    """
    x0 = _check_point(spec, x, "x")
    total, results = _run_all(spec, t, x0, cfg, mode=1, stream_key=(1,))
    n_chamber = sum(r["chamber"] for r in results)
    n_joint = sum(r["joint"] for r in results)
    if n_chamber < 50:
        raise InsufficientStatistics(
            f"only {n_chamber} of {total} paths survived the chamber; "
            "increase paths or the starting offset"
        )
    c = n_joint / n_chamber
    se = max(math.sqrt(c * (1.0 - c) / n_chamber), 3.0 / n_chamber)
    return c, se, n_chamber, n_joint


def write_endpoints_csv(path, endpoints, spec: ChamberSpec, cfg: McConfig, t: float):
    """One row per surviving path, k coordinate columns, metadata comment first."""
    endpoints = np.asarray(endpoints, dtype=float)
    with open(path, "w", newline="") as fh:
        fh.write(
            f"# weylsim endpoints type={spec.weyl_type.value} k={spec.k} r={spec.r!r} "
            f"t={t!r} seed={cfg.seed} paths={cfg.paths} dt={cfg.dt!r} "
            f"bridge={cfg.bridge_correction} antithetic={cfg.antithetic}\n"
        )
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"x{i+1}" for i in range(spec.k)])
        for row in endpoints:
            writer.writerow([f"{v:.17g}" for v in row])
