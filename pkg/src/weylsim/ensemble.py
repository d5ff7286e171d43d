"""Endpoint ensemble in sine coordinates: sampling, rate functions, limits.

The sine-transformed endpoints of the surviving paths follow the density
proportional to h_Z on the ordered unit box (types A and C; D has no usable
ensemble normalization).  This module samples that density by Metropolis
sweeps, evaluates the discrete logarithmic-energy rate functional, estimates
the normalization constant d_Z from the ordered-box integrals of h_Z, and
measures distances to the closed-form limit laws.
"""

import json
import math
import os
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate as _sciint

from . import integrals
from ._kernels import loggas_sweeps
from ._rng import stream
from .chambers import WeylType

__all__ = [
    "EmpiricalMeasure",
    "RateValue",
    "DEstimate",
    "sample_h_ensemble",
    "rate_function",
    "h_sequence_value",
    "estimate_dZ",
    "lln_check",
    "arcsine_cdf",
    "arcsine_quantiles",
    "mu_c_cdf",
    "mu_c_quantiles",
    "measures_to_csv",
    "measures_from_csv",
    "cache_path",
    "load_d_constant",
    "store_d_constant",
]

_SUPPORT = {WeylType.A: (-1.0, 1.0), WeylType.C: (0.0, 1.0)}


def _ensemble_type(weyl_type) -> WeylType:
    weyl_type = WeylType.parse(weyl_type)
    if weyl_type is WeylType.D:
        raise ValueError(
            "the type-D ensemble is not exposed: its density involves a signed "
            "square root and has no usable log-gas normalization"
        )
    return weyl_type


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Uniformly weighted atoms on the ensemble support, sorted on ingestion."""

    atoms: np.ndarray
    weyl_type: WeylType

    def __post_init__(self):
        wt = _ensemble_type(self.weyl_type)
        object.__setattr__(self, "weyl_type", wt)
        atoms = np.sort(np.asarray(self.atoms, dtype=float))
        lo, hi = _SUPPORT[wt]
        if atoms.size == 0:
            raise ValueError("empirical measure needs at least one atom")
        if atoms[0] < lo or atoms[-1] > hi:
            raise ValueError(f"atoms outside the support [{lo}, {hi}]")
        atoms.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)

    @property
    def k(self) -> int:
        return self.atoms.size


@dataclass(frozen=True)
class RateValue:
    """Discrete rate functional split into its pieces; rate = energy + field - d."""

    energy: float
    external_field: float
    d_z: float
    rate: float


def _equilibrium_init(weyl_type: WeylType, k: int) -> np.ndarray:
    u = (np.arange(k) + 0.5) / k
    if weyl_type is WeylType.A:
        return np.sin(math.pi * (u - 0.5))
    return np.sin(math.pi * u / 2.0)


def _run_chain(weyl_type, k, n_keep, burn_sweeps, thin_sweeps, scale, seed, chain_id, beta):
    lo, hi = _SUPPORT[weyl_type]
    ztag = 0 if weyl_type is WeylType.A else 1
    rng = stream(seed, 2, chain_id)
    y = _equilibrium_init(weyl_type, k)[None, :].copy()
    total = burn_sweeps + n_keep * thin_sweeps
    keep = []
    done = 0
    chunk_max = max(1, 2_000_000 // max(k, 1))
    next_keep = burn_sweeps + thin_sweeps
    while done < total:
        s = min(chunk_max, total - done)
        # align chunk ends with sample points so states are captured exactly
        if done + s > next_keep > done:
            s = next_keep - done
        normals = rng.standard_normal((1, s, k))
        unifs = rng.random((1, s, k))
        loggas_sweeps(y, normals, unifs, ztag, beta, scale, lo, hi)
        done += s
        if done == next_keep and len(keep) < n_keep:
            keep.append(y[0].copy())
            next_keep += thin_sweeps
    return keep


def sample_h_ensemble(
    weyl_type,
    k: int,
    n_samples: int,
    burnin: int | None = None,
    thin: int | None = None,
    proposal_scale: float | None = None,
    seed: int = 0,
    chains: int = 1,
):
    """Metropolis samples of the density proportional to h_Z on the ordered box.

    burnin and thin count single-coordinate steps (defaults 10 k^2 and k);
    proposal is a centered Gaussian of scale 0.5/k per coordinate.  Samples
    are split round-robin over independent seeded chains.
    """
    weyl_type = _ensemble_type(weyl_type)
    if k < 1 or n_samples < 1 or chains < 1:
        raise ValueError("k, n_samples and chains must be >= 1")
    burn_steps = 10 * k * k if burnin is None else int(burnin)
    thin_steps = k if thin is None else int(thin)
    if burn_steps < 0 or thin_steps < 1:
        raise ValueError("burnin must be >= 0 and thin >= 1")
    scale = 0.5 / k if proposal_scale is None else float(proposal_scale)
    if not scale > 0:
        raise ValueError("proposal_scale must be > 0")
    burn_sweeps = max(1, math.ceil(burn_steps / k))
    thin_sweeps = max(1, math.ceil(thin_steps / k))
    chains = min(chains, n_samples)
    per_chain = [n_samples // chains + (1 if c < n_samples % chains else 0) for c in range(chains)]
    out = []
    for c, n_keep in enumerate(per_chain):
        states = _run_chain(
            weyl_type, k, n_keep, burn_sweeps, thin_sweeps, scale, seed, c, 1.0
        )
        out.extend(EmpiricalMeasure(s, weyl_type) for s in states)
    return out


def rate_function(weyl_type, mu: EmpiricalMeasure, d_z: float) -> RateValue:
    """Discrete logarithmic-energy rate of an atomic measure.

    Energy is the off-diagonal U-statistic (1/(2k(k-1))) sum_{i != j} of
    log 1/|x_i - x_j| (A) or log 1/|x_i^2 - x_j^2| (C); type C adds the
    external field -(1/k) sum log x_i.  Coincident atoms give +inf.
    """
    weyl_type = _ensemble_type(weyl_type)
    if mu.weyl_type is not weyl_type:
        raise ValueError("measure type does not match the requested type")
    x = mu.atoms
    k = x.size
    if k < 2:
        raise ValueError("the discrete energy needs at least two atoms")
    if weyl_type is WeylType.C and x[0] <= 0.0:
        raise ValueError("type C atoms must be strictly positive")
    v = x * x if weyl_type is WeylType.C else x
    diff = np.abs(v[:, None] - v[None, :])
    iu = np.triu_indices(k, 1)
    gaps = diff[iu]
    if np.any(gaps == 0.0):
        energy = math.inf
    else:
        energy = -float(np.sum(np.log(gaps))) / (k * (k - 1))
    if weyl_type is WeylType.C:
        ext = -float(np.mean(np.log(x)))
    else:
        ext = 0.0
    rate = energy + ext - d_z if math.isfinite(energy) else math.inf
    return RateValue(energy=energy, external_field=ext, d_z=d_z, rate=rate)


def _log_h(weyl_type: WeylType, y: np.ndarray) -> float:
    v = y * y if weyl_type is WeylType.C else y
    iu = np.triu_indices(y.size, 1)
    total = float(np.sum(np.log(np.abs(v[:, None] - v[None, :])[iu])))
    if weyl_type is WeylType.C:
        total += float(np.sum(np.log(y)))
    return total


def _log_ordered_box_volume(weyl_type: WeylType, k: int) -> float:
    side = 2.0 if weyl_type is WeylType.A else 1.0
    return k * math.log(side) - math.lgamma(k + 1)


def _thermo_log_integral(weyl_type, k, seed, nodes=12, burn_sweeps=None, sample_sweeps=None):
    """log int h_Z over the ordered box by thermodynamic integration in beta."""
    lo, hi = _SUPPORT[weyl_type]
    ztag = 0 if weyl_type is WeylType.A else 1
    burn_sweeps = burn_sweeps or (400 + 10 * k)
    sample_sweeps = sample_sweeps or (1200 + 30 * k)
    bnodes, bweights = np.polynomial.legendre.leggauss(nodes)
    bnodes = 0.5 * (bnodes + 1.0)
    bweights = 0.5 * bweights
    scale = 1.0 / k
    total = 0.0
    for i, (beta, w) in enumerate(zip(bnodes, bweights)):
        rng = stream(seed, 3, k, i)
        y = _equilibrium_init(weyl_type, k)[None, :].copy()
        normals = rng.standard_normal((1, burn_sweeps, k))
        unifs = rng.random((1, burn_sweeps, k))
        loggas_sweeps(y, normals, unifs, ztag, beta, scale, lo, hi)
        acc = 0.0
        for s in range(sample_sweeps):
            normals = rng.standard_normal((1, 1, k))
            unifs = rng.random((1, 1, k))
            loggas_sweeps(y, normals, unifs, ztag, beta, scale, lo, hi)
            acc += _log_h(weyl_type, y[0])
        total += w * (acc / sample_sweeps)
    return _log_ordered_box_volume(weyl_type, k) + total


def h_sequence_value(weyl_type, k: int, seed: int = 0, **thermo_kwargs) -> float:
    """(1/k^2) log of the ordered-box integral of h_Z.

    Exact polynomial iterated integration for k <= 4, thermodynamic-
    integration Monte Carlo above.
    """
    weyl_type = _ensemble_type(weyl_type)
    if k < 2:
        raise ValueError("the sequence starts at k = 2")
    if k <= 4:
        return math.log(integrals.nested_poly_integral(weyl_type.value, k)) / k**2
    return _thermo_log_integral(weyl_type, k, seed, **thermo_kwargs) / k**2


@dataclass(frozen=True)
class DEstimate:
    """Extrapolated normalization constant with its supporting sequence."""

    value: float
    points: dict
    model: dict
    converged: bool
    weyl_type: WeylType = field(default=WeylType.A)


def estimate_dZ(weyl_type, k_list=(8, 12, 16, 24, 32), seed: int = 0, **thermo_kwargs) -> DEstimate:
    """Normalization constant of the rate functional.

    Computes s_k = (1/k^2) log int h_Z for each k, fits
    s_k = s_inf + a log(k)/k + b/k, and returns -s_inf (the sign that makes
    the rate functional vanish at its minimizer; the raw sequence limit is
    -d_Z).
    """
    weyl_type = _ensemble_type(weyl_type)
    k_list = sorted(set(int(k) for k in k_list))
    if len(k_list) < 3:
        raise ValueError("need at least three k values to extrapolate")
    points = {k: h_sequence_value(weyl_type, k, seed=seed, **thermo_kwargs) for k in k_list}
    ks = np.array(k_list, dtype=float)
    vals = np.array([points[k] for k in k_list])
    design = np.column_stack([np.ones_like(ks), np.log(ks) / ks, 1.0 / ks])
    coef, residuals, *_ = np.linalg.lstsq(design, vals, rcond=None)
    fitted = design @ coef
    resid = float(np.max(np.abs(fitted - vals)))
    spread = float(np.max(vals) - np.min(vals))
    converged = resid <= max(0.02, 0.25 * spread)
    if not converged:
        warnings.warn(
            f"d_{weyl_type.value} extrapolation looks nonconvergent "
            f"(max residual {resid:.3g})",
            stacklevel=2,
        )
    model = {"s_inf": float(coef[0]), "a_logk_over_k": float(coef[1]), "b_over_k": float(coef[2]), "max_residual": resid}
    return DEstimate(
        value=-float(coef[0]),
        points={int(k): float(points[k]) for k in k_list},
        model=model,
        converged=converged,
        weyl_type=weyl_type,
    )


# ---------------------------------------------------------------------------
# limit laws


def arcsine_cdf(x):
    x = np.clip(np.asarray(x, dtype=float), -1.0, 1.0)
    return 0.5 + np.arcsin(x) / math.pi


def arcsine_quantiles(k: int) -> np.ndarray:
    u = (np.arange(k) + 0.5) / k
    return np.sin(math.pi * (u - 0.5))


def _mu_c_density(x):
    return 3.0 / (2.0 * math.pi * x) * np.sqrt((x - 1.0 / 9.0) / (1.0 - x))


_MU_C_GRID = None


def _mu_c_table():
    global _MU_C_GRID
    if _MU_C_GRID is None:
        xs = np.linspace(1.0 / 9.0, 1.0, 2001)
        cdf = np.zeros_like(xs)
        for i in range(1, xs.size):
            seg, _ = _sciint.quad(_mu_c_density, xs[i - 1], min(xs[i], 1.0 - 1e-13))
            cdf[i] = cdf[i - 1] + seg
        cdf /= cdf[-1]
        _MU_C_GRID = (xs, cdf)
    return _MU_C_GRID


def mu_c_cdf(x):
    xs, cdf = _mu_c_table()
    x = np.asarray(x, dtype=float)
    return np.interp(x, xs, cdf, left=0.0, right=1.0)


def mu_c_quantiles(k: int) -> np.ndarray:
    xs, cdf = _mu_c_table()
    u = (np.arange(k) + 0.5) / k
    return np.interp(u, cdf, xs)


def lln_check(weyl_type, samples) -> dict:
    """Distances from the averaged empirical law to the closed-form limit.

    ks_to_limit: sup distance between the sample-averaged empirical CDF and
    the limit CDF; wasserstein1: average sorted-quantile L1 distance.
    """
    weyl_type = _ensemble_type(weyl_type)
    if not samples:
        raise ValueError("samples must be nonempty")
    lo, hi = _SUPPORT[weyl_type]
    grid = np.linspace(lo, hi, 4001)
    emp = np.zeros_like(grid)
    w1 = 0.0
    for mu in samples:
        atoms = mu.atoms
        emp += np.searchsorted(atoms, grid, side="right") / atoms.size
        if weyl_type is WeylType.A:
            q = arcsine_quantiles(atoms.size)
        else:
            q = mu_c_quantiles(atoms.size)
        w1 += float(np.mean(np.abs(atoms - q)))
    emp /= len(samples)
    limit = arcsine_cdf(grid) if weyl_type is WeylType.A else mu_c_cdf(grid)
    return {
        "ks_to_limit": float(np.max(np.abs(emp - limit))),
        "wasserstein1": w1 / len(samples),
    }


# ---------------------------------------------------------------------------
# CSV / JSON plumbing


def measures_to_csv(path, samples):
    with open(path, "w") as fh:
        wt = samples[0].weyl_type.value if samples else "A"
        k = samples[0].k if samples else 0
        fh.write(f"# weylsim ensemble type={wt} k={k} samples={len(samples)}\n")
        fh.write(",".join(f"x{i+1}" for i in range(k)) + "\n")
        for mu in samples:
            fh.write(",".join(f"{v:.17g}" for v in mu.atoms) + "\n")


def measures_from_csv(path, weyl_type):
    weyl_type = _ensemble_type(weyl_type)
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("x1"):
                continue
            out.append(EmpiricalMeasure(np.array([float(v) for v in line.split(",")]), weyl_type))
    return out


def cache_path() -> str:
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return os.path.join(base, "weylsim", "d_constants.json")


def load_d_constant(weyl_type) -> dict | None:
    weyl_type = _ensemble_type(weyl_type)
    try:
        with open(cache_path()) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError):
        return None
    return data.get(weyl_type.value)


def store_d_constant(est: DEstimate) -> str:
    path = cache_path()
    os.makedirs(os.path.dirname(path), exist_ok=True)
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError):
        data = {}
    data[est.weyl_type.value] = {
        "value": est.value,
        "points": {str(k): v for k, v in est.points.items()},
        "model": est.model,
        "converged": est.converged,
    }
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
