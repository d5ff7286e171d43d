"""Dirichlet eigen-system of -(1/2)Laplacian on truncated chambers.

One-dimensional modes on I = (-pi/2, pi/2), k-dimensional eigenpairs indexed
by strictly increasing multi-indices, and the truncated expansion of the
killed transition density / survival probability with a certified error
budget: an explicit product-geometric tail bound always, sharpened by the
e^{k*gamma(t)} remainder bound when t/r^2 > 14.
"""

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from . import integrals
from .chambers import ChamberSpec, WeylType, in_closure

__all__ = [
    "MultiIndex",
    "EigenPair",
    "SeriesBudget",
    "SurvivalResult",
    "eigen1d",
    "eigen1d_scaled",
    "enumerate_indices",
    "eigenfunction",
    "principal_index",
    "principal_eigenvalue",
    "principal_eigenfunction",
    "integrate_eigenfunction",
    "gamma_bound",
    "transition_density_spectral",
    "survival_spectral",
    "eigenfunction_sup_bound",
]

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


def eigen1d(l: int, x):
    """Mode l on (-pi/2, pi/2): sqrt(2/pi) * sin(lx) for even l, cos(lx) for odd.

    Accepts scalars or arrays; x must lie in the closed interval.
    """
    if l < 1:
        raise ValueError(f"mode index must be >= 1, got {l}")
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > math.pi / 2 + 1e-15):
        raise ValueError("argument outside the closed interval [-pi/2, pi/2]")
    vals = SQRT_2_OVER_PI * (np.sin(l * x) if l % 2 == 0 else np.cos(l * x))
    return float(vals) if vals.ndim == 0 else vals


def eigen1d_scaled(l: int, r: float, x: float):
    """(eigenvalue, value) of mode l on the interval scaled by r."""
    if not r > 0:
        raise ValueError(f"interval scale r must be > 0, got {r}")
    lam = l * l / (2.0 * r * r)
    return lam, eigen1d(l, np.asarray(x, dtype=float) / r) / math.sqrt(r)


@dataclass(frozen=True)
class MultiIndex:
    """Strictly increasing mode vector selecting one k-dimensional eigenpair."""

    l: tuple
    weyl_type: WeylType

    def __post_init__(self):
        object.__setattr__(self, "weyl_type", WeylType.parse(self.weyl_type))
        l = tuple(int(v) for v in self.l)
        object.__setattr__(self, "l", l)
        if not l or any(v < 1 for v in l):
            raise ValueError(f"multi-index entries must be positive integers, got {l}")
        if any(a >= b for a, b in zip(l, l[1:])):
            raise ValueError(f"multi-index must be strictly increasing, got {l}")
        wt = self.weyl_type
        if wt is WeylType.C and any(v % 2 for v in l):
            raise ValueError(f"type C multi-index must be all even, got {l}")
        if wt is WeylType.D and len({v % 2 for v in l}) > 1:
            raise ValueError(f"type D multi-index must be all odd or all even, got {l}")

    @property
    def k(self) -> int:
        return len(self.l)

    @property
    def eigenvalue(self) -> float:
        return 0.5 * sum(v * v for v in self.l)

    @property
    def prefactor(self) -> float:
        if self.weyl_type is WeylType.A:
            return 1.0
        if self.weyl_type is WeylType.C:
            return 2.0 ** (self.k / 2.0)
        return 2.0 ** ((self.k - 1) / 2.0)


@dataclass(frozen=True)
class EigenPair:
    index: MultiIndex
    lam: float
    prefactor: float


def principal_index(weyl_type, k: int) -> MultiIndex:
    weyl_type = WeylType.parse(weyl_type)
    if weyl_type is WeylType.A:
        l = tuple(range(1, k + 1))
    elif weyl_type is WeylType.C:
        l = tuple(range(2, 2 * k + 1, 2))
    else:
        l = tuple(range(1, 2 * k, 2))
    return MultiIndex(l, weyl_type)


def principal_eigenvalue(weyl_type, k: int) -> float:
    """lambda^A = (1/2) sum i^2, lambda^C = 4 lambda^A, lambda^D = (1/2) sum (2i-1)^2."""
    weyl_type = WeylType.parse(weyl_type)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    lam_a = 0.5 * sum(i * i for i in range(1, k + 1))
    if weyl_type is WeylType.A:
        return lam_a
    if weyl_type is WeylType.C:
        return 4.0 * lam_a
    return 0.5 * sum((2 * i - 1) ** 2 for i in range(1, k + 1))


def _mode_step(weyl_type: WeylType) -> int:
    return 2 if weyl_type is not WeylType.A else 1


def _dfs_indices(out, prefix, k, budget_sq, prev, step):
    depth = len(prefix)
    if depth == k:
        out.append(tuple(prefix))
        return
    v = prev + step
    while True:
        rem = k - depth - 1
        # cheapest completion above v: v+step, v+2*step, ...
        tail_min = sum((v + (j + 1) * step) ** 2 for j in range(rem))
        if v * v + tail_min > budget_sq:
            break
        prefix.append(v)
        _dfs_indices(out, prefix, k, budget_sq - v * v, v, step)
        prefix.pop()
        v += step


@lru_cache(maxsize=None)
def _enumerate_cached(tag: str, k: int, cutoff: float):
    wt = WeylType(tag)
    budget_sq = 2.0 * cutoff
    families = []
    if wt is WeylType.A:
        families.append((1, 1))
    elif wt is WeylType.C:
        families.append((2, 2))
    else:
        families.extend([(1, 2), (2, 2)])  # all odd, all even
    raw = []
    for first, step in families:
        out = []
        v = first
        while True:
            rem = k - 1
            tail_min = sum((v + (j + 1) * step) ** 2 for j in range(rem))
            if v * v + tail_min > budget_sq:
                break
            _dfs_indices(out, [v], k, budget_sq - v * v, v, step)
            v += step
        raw.extend(out)
    raw.sort(key=lambda l: (0.5 * sum(x * x for x in l), l))
    return tuple(MultiIndex(l, wt) for l in raw)


def enumerate_indices(weyl_type, k: int, energy_cutoff: float):
    """All multi-indices of the type with eigenvalue <= cutoff.

    Sorted by eigenvalue ascending, ties broken lexicographically.
    """
    weyl_type = WeylType.parse(weyl_type)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return list(_enumerate_cached(weyl_type.value, k, float(energy_cutoff)))


def _mode_values(modes, u):
    """Stack of f_m(u_j) rows for the 1-d modes in ``modes``; u of shape (n, k)."""
    rows = np.empty((len(modes), u.shape[0], u.shape[1]))
    for i, m in enumerate(modes):
        rows[i] = SQRT_2_OVER_PI * (np.sin(m * u) if m % 2 == 0 else np.cos(m * u))
    return rows


def _batched(x, k):
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 1
    if scalar:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != k:
        raise ValueError(f"points must have shape (n, {k}) or ({k},), got {x.shape}")
    return x, scalar


def eigenfunction(index: MultiIndex, x, validate: bool = True):
    """f_l^Z at x (unit box): prefactor times det[f_{l_i}(x_j)].

    Accepts a single point or an (n, k) batch; x must lie in the closed
    truncated chamber with r = 1.
    """
    k = index.k
    x, scalar = _batched(x, k)
    if validate:
        spec1 = ChamberSpec(index.weyl_type, k, 1.0)
        for row in x:
            if not in_closure(spec1, row):
                raise ValueError(f"point {row.tolist()} outside the closed domain")
    mats = np.transpose(_mode_values(index.l, x), (1, 0, 2))
    vals = index.prefactor * np.linalg.det(mats)
    return float(vals[0]) if scalar else vals


def principal_eigenfunction(weyl_type, x, validate: bool = True):
    """Closed form of the positive ground state on the unit truncated chamber.

    (2^{k^2/2} | 2^{k(k+1)} | 2^{(2k^2-1)/2}) / pi^{k/2} * h_Z(sin x) * prod cos x_i.
    """
    weyl_type = WeylType.parse(weyl_type)
    x = np.asarray(x, dtype=float)
    k = x.shape[-1]
    x, scalar = _batched(x, k)
    if validate:
        spec1 = ChamberSpec(weyl_type, k, 1.0)
        for row in x:
            if not in_closure(spec1, row):
                raise ValueError(f"point {row.tolist()} outside the closed domain")
    s = np.sin(x)
    v = s * s if weyl_type is not WeylType.A else s
    h = np.ones(x.shape[0])
    for i in range(k):
        for j in range(i + 1, k):
            h = h * (v[:, j] - v[:, i])
    if weyl_type is WeylType.C:
        h = h * np.prod(s, axis=1)
    vals = _principal_constant(weyl_type, k) * h * np.prod(np.cos(x), axis=1)
    return float(vals[0]) if scalar else vals


def _principal_constant(weyl_type: WeylType, k: int) -> float:
    return math.exp(_log_principal_constant(weyl_type, k))


def _log_principal_constant(weyl_type: WeylType, k: int) -> float:
    if weyl_type is WeylType.A:
        p = k * k / 2.0
    elif weyl_type is WeylType.C:
        p = float(k * (k + 1))
    else:
        p = (2.0 * k * k - 1.0) / 2.0
    return p * math.log(2.0) - 0.5 * k * math.log(math.pi)


def eigenfunction_sup_bound(weyl_type, k: int) -> float:
    """Crude uniform bound on |f_l^Z|: prefactor * k! * (2/pi)^{k/2}."""
    weyl_type = WeylType.parse(weyl_type)
    pref = MultiIndex(principal_index(weyl_type, k).l, weyl_type).prefactor
    return pref * math.factorial(k) * (2.0 / math.pi) ** (k / 2.0)


@lru_cache(maxsize=None)
def _eigen_integral(tag: str, l: tuple):
    """(integral of f_l^Z over the unit truncated chamber, error estimate)."""
    k = len(l)
    pref = MultiIndex(l, WeylType(tag)).prefactor
    if k <= 4:
        return pref * integrals.nested_eigen_integral(tag, l), 0.0
    if k > 6:
        raise ValueError(f"eigenfunction integrals implemented for k <= 6, got k={k}")
    idx = MultiIndex(l, WeylType(tag))
    vals = []
    for order in (24, 34):
        y, w = integrals.ordered_region_nodes(tag, k, math.pi / 2, order)
        vals.append(float(w @ eigenfunction(idx, y, validate=False)))
    return vals[1], abs(vals[1] - vals[0])


def integrate_eigenfunction(index: MultiIndex) -> float:
    """Integral of f_l^Z over W_Z cap I^k (exact antiderivatives for k <= 4)."""
    return _eigen_integral(index.weyl_type.value, index.l)[0]


def gamma_bound(t: float) -> float:
    """-ln(1 - e^{-(t/2-7)}) - (t/2 - 7) for t > 14 (remainder bound exponent)."""
    if not t > 14:
        raise ValueError(f"the remainder bound needs t > 14, got {t}")
    c = t / 2.0 - 7.0
    return -math.log1p(-math.exp(-c)) - c


@dataclass
class SeriesBudget:
    """Energy cutoff for the expansion plus the resulting certified tail data."""

    energy_cutoff: float
    tail_bound: float | None = None
    terms_used: int | None = None

    @classmethod
    def default(cls, spec: ChamberSpec, t: float) -> "SeriesBudget":
        lam = principal_eigenvalue(spec.weyl_type, spec.k)
        return cls(energy_cutoff=lam + max(20.0, 40.0 * spec.r**2 / t))


@dataclass(frozen=True)
class SurvivalResult:
    """Probability estimate with a certified bound (or MC confidence half-width)."""

    value: float
    error_bound: float
    method: str
    budget: SeriesBudget | None = None

    def agrees_with(self, other: "SurvivalResult") -> bool:
        return abs(self.value - other.value) <= self.error_bound + other.error_bound


def _geom_mode_sum(weyl_type: WeylType, s: float) -> float:
    """g_Z(s) = sum over the 1-d mode menu of e^{-s m^2 / 2}."""
    step = 2 if weyl_type is WeylType.C else 1
    total = 0.0
    m = step
    while True:
        term = math.exp(-s * m * m / 2.0)
        total += term
        if term < 1e-300 or (total > 0 and term / total < 1e-18):
            break
        m += step
        if m > 100000:
            break
    return total


def _domain_volume(weyl_type: WeylType, k: int) -> float:
    if weyl_type is WeylType.A:
        return math.pi**k / math.factorial(k)
    if weyl_type is WeylType.C:
        return (math.pi / 2.0) ** k / math.factorial(k)
    if k == 1:
        return math.pi
    return 2.0 * (math.pi / 2.0) ** k / math.factorial(k)


def _check_point(spec: ChamberSpec, x, name: str) -> np.ndarray:
    arr = np.asarray(getattr(x, "coords", x), dtype=float)
    if arr.shape != (spec.k,):
        raise ValueError(f"{name} must have length k={spec.k}")
    if not in_closure(spec, arr):
        raise ValueError(
            f"{name}={arr.tolist()} outside the closed type-{spec.weyl_type.value} "
            f"domain (k={spec.k}, r={spec.r})"
        )
    return arr


def _prepare(spec, t, budget):
    if not t > 0:
        raise ValueError(f"time must be > 0, got {t}")
    if budget is None:
        budget = SeriesBudget.default(spec, t)
    lam0 = principal_eigenvalue(spec.weyl_type, spec.k)
    if budget.energy_cutoff < lam0:
        raise ValueError(
            f"energy cutoff {budget.energy_cutoff} below the principal eigenvalue {lam0}"
        )
    idx = enumerate_indices(spec.weyl_type, spec.k, budget.energy_cutoff)
    return budget, lam0, idx


def transition_density_spectral(spec: ChamberSpec, t, x, y, budget=None):
    """Killed transition density by the truncated expansion.

    Returns (value, certified_error_bound).
    """
    xa = _check_point(spec, x, "x")
    ya = _check_point(spec, y, "y")
    budget, lam0, idx = _prepare(spec, t, budget)
    tp = t / spec.r**2
    u = xa / spec.r
    v = ya / spec.r
    total = 0.0
    for mi in idx:
        fu = eigenfunction(mi, u, validate=False)
        fv = eigenfunction(mi, v, validate=False)
        # grouping keeps x <-> y symmetry exact, not just up to rounding
        total += math.exp(-tp * mi.eigenvalue) * (fu * fv)
    rk = spec.r ** (-spec.k)
    value = rk * total

    bound_f = eigenfunction_sup_bound(spec.weyl_type, spec.k)
    tail = (
        bound_f**2
        * math.exp(-tp * budget.energy_cutoff / 2.0)
        * _geom_mode_sum(spec.weyl_type, tp / 2.0) ** spec.k
    )
    if tp > 14:
        lead = (
            math.exp(-tp * lam0)
            * principal_eigenfunction(spec.weyl_type, u, validate=False)
            * principal_eigenfunction(spec.weyl_type, v, validate=False)
        )
        tail = min(tail, abs(lead) * math.exp(spec.k * gamma_bound(tp)))
    return value, rk * tail


def survival_spectral(spec: ChamberSpec, t, x, budget=None) -> SurvivalResult:
    """Non-exit probability by the integrated truncated expansion."""
    xa = _check_point(spec, x, "x")
    budget, lam0, idx = _prepare(spec, t, budget)
    tp = t / spec.r**2
    u = xa / spec.r
    total = 0.0
    int_err = 0.0
    for mi in idx:
        integral, ierr = _eigen_integral(mi.weyl_type.value, mi.l)
        fx = eigenfunction(mi, u, validate=False)
        w = math.exp(-tp * mi.eigenvalue)
        total += w * fx * integral
        int_err += w * abs(fx) * ierr

    bound_f = eigenfunction_sup_bound(spec.weyl_type, spec.k)
    vol = _domain_volume(spec.weyl_type, spec.k)
    tail = (
        bound_f
        * math.sqrt(vol)
        * math.exp(-tp * budget.energy_cutoff / 2.0)
        * _geom_mode_sum(spec.weyl_type, tp / 2.0) ** spec.k
    )
    if tp > 14:
        pidx = principal_index(spec.weyl_type, spec.k)
        lead = (
            math.exp(-tp * lam0)
            * principal_eigenfunction(spec.weyl_type, u, validate=False)
            * abs(integrate_eigenfunction(pidx))
        )
        tail = min(tail, abs(lead) * math.exp(spec.k * gamma_bound(tp)))
    err = tail + int_err
    done = replace(
        budget, tail_bound=err / max(abs(total), 1e-300), terms_used=len(idx)
    )
    return SurvivalResult(value=total, error_bound=err, method="spectral", budget=done)
