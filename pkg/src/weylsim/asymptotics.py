"""Long-time regime machinery: decay exponents, constants, predictions.

Four growth regimes for the box half-width multiplier r(t):

    constant        r(t) = r        survival ~ e^{-t lam/r^2} f(x/r) * int f
    intermediate    1 << r(t) << sqrt(t)   ~ K_0 r(t)^{-alpha} h(x) e^{-t lam/r(t)^2}
    diffusive       r(t) ~ r sqrt(t)       ~ K_r h(x) t^{-alpha/2}
    superdiffusive  sqrt(t) << r(t)        ~ K_inf h(x) t^{-alpha/2}

K_0 and K_inf have closed forms (evaluated in log space so every k up to ~50
stays finite); K_r has none and is estimated by Monte Carlo through the
conditional probability of staying in the box given the chamber was never
left, extrapolated to a zero starting point.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import integrals
from .chambers import ChamberSpec, WeylType, reduite
from .montecarlo import McConfig, conditional_box_survival
from .spectral import (
    integrate_eigenfunction,
    principal_eigenfunction,
    principal_eigenvalue,
    principal_index,
    survival_spectral,
)

__all__ = [
    "alpha",
    "k_zero",
    "log_k_zero",
    "k_infinity",
    "log_k_infinity",
    "k_r_estimate",
    "GrowthRegime",
    "RegimeReport",
    "predict",
    "regime_report",
]


def alpha(weyl_type, k: int) -> float:
    """Polynomial decay exponent: A: k(k-1)/2, C: k^2, D: k(k-1)."""
    weyl_type = WeylType.parse(weyl_type)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if weyl_type is WeylType.A:
        return 0.5 * k * (k - 1)
    if weyl_type is WeylType.C:
        return float(k * k)
    return float(k * (k - 1))


def log_integral_principal(weyl_type, k: int) -> float:
    """log of the (positive) integral of the ground state over the unit domain."""
    weyl_type = WeylType.parse(weyl_type)
    if k <= 4:
        return math.log(abs(integrate_eigenfunction(principal_index(weyl_type, k))))
    # substitute u = sin(x): the integral reduces to the ordered-box integral
    # of the reduite, which has a Gamma-product value for every k
    if weyl_type is WeylType.A:
        logc = (k * k / 2.0) * math.log(2.0)
    elif weyl_type is WeylType.C:
        logc = k * (k + 1.0) * math.log(2.0)
    else:
        logc = ((2.0 * k * k - 1.0) / 2.0) * math.log(2.0)
    logc -= 0.5 * k * math.log(math.pi)
    return logc + integrals.log_reduite_box_integral(weyl_type.value, k)


def log_k_zero(weyl_type, k: int) -> float:
    weyl_type = WeylType.parse(weyl_type)
    if weyl_type is WeylType.A:
        logc = (k * k / 2.0) * math.log(2.0)
    elif weyl_type is WeylType.C:
        logc = k * (k + 1.0) * math.log(2.0)
    else:
        logc = ((2.0 * k * k - 1.0) / 2.0) * math.log(2.0)
    logc -= 0.5 * k * math.log(math.pi)
    return logc + log_integral_principal(weyl_type, k)


def k_zero(weyl_type, k: int) -> float:
    """Intermediate-regime constant: ground-state normalization times its integral."""
    return math.exp(log_k_zero(weyl_type, k))


def log_k_infinity(weyl_type, k: int) -> float:
    weyl_type = WeylType.parse(weyl_type)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    i = np.arange(1, k + 1, dtype=float)
    if weyl_type is WeylType.A:
        out = k * math.log(2.0) + float(np.sum([math.lgamma(v / 2 + 1) for v in i]))
        out -= 0.5 * k * math.log(math.pi) + math.lgamma(k + 1)
        out -= sum(math.log(j - m) for m in range(1, k + 1) for j in range(m + 1, k + 1))
        return out
    odd = 2.0 * i - 1.0
    logpairs = sum(
        math.log(odd[j] ** 2 - odd[m] ** 2) for m in range(k) for j in range(m + 1, k)
    )
    if weyl_type is WeylType.C:
        out = 1.5 * k * k * math.log(2.0)
        out += float(np.sum([math.lgamma(v / 2 + 1) + math.lgamma((v + 1) / 2) for v in i]))
        out -= k * math.log(math.pi) + math.lgamma(k + 1) + logpairs
        out -= sum(math.log(2.0 * k + 1.0 - 2.0 * m) for m in range(1, k + 1))
        return out
    out = ((3.0 * k * k - 3.0 * k + 2.0) / 2.0) * math.log(2.0)
    out += float(np.sum([math.lgamma(v / 2 + 1) + math.lgamma(v / 2) for v in i]))
    out -= k * math.log(math.pi) + math.lgamma(k + 1) + logpairs
    return out


def k_infinity(weyl_type, k: int) -> float:
    """Unbounded-chamber decay constant (closed Gamma-product form)."""
    return math.exp(log_k_infinity(weyl_type, k))


def _reject_degenerate(weyl_type: WeylType, k: int):
    if weyl_type is WeylType.D and k == 1:
        raise ValueError(
            "type D with k=1 is degenerate (no ordering constraint); "
            "regime constants are exposed for A and C only at k=1"
        )


def k_r_estimate(
    weyl_type,
    k: int,
    r: float,
    mc_paths: int = 1_000_000,
    seed: int = 0,
    dt: float = 1e-3,
    deltas: tuple = (0.08, 0.16),
    threads: int = 1,
):
    """Monte Carlo estimate of the diffusive-regime constant K_r.

    Estimates P(stay in the box to time 1 | never leave the chamber) from a
    small starting point delta*(1, ..., k), extrapolates the two-point values
    linearly in delta^2 to delta = 0, and multiplies by K_inf.  Returns
    (value, ci_halfwidth).
    """
    weyl_type = WeylType.parse(weyl_type)
    _reject_degenerate(weyl_type, k)
    if not r > 0:
        raise ValueError("r must be > 0")
    if mc_paths < 10_000:
        raise ValueError("mc_paths must be >= 10^4")
    spec = ChamberSpec(weyl_type, k, r)
    base = np.arange(1, k + 1, dtype=float)
    ests = []
    for j, d in enumerate(deltas):
        cfg = McConfig(paths=mc_paths // len(deltas), dt=dt, seed=seed + j, threads=threads)
        c, se, _, _ = conditional_box_survival(spec, 1.0, d * base, cfg)
        ests.append((d, c, se))
    (d1, c1, s1), (d2, c2, s2) = ests
    w1 = d2**2 / (d2**2 - d1**2)
    w2 = -(d1**2) / (d2**2 - d1**2)
    c0 = w1 * c1 + w2 * c2
    se0 = math.sqrt((w1 * s1) ** 2 + (w2 * s2) ** 2)
    kinf = k_infinity(weyl_type, k)
    return c0 * kinf, se0 * kinf


@dataclass(frozen=True)
class GrowthRegime:
    """Growth law of the box half-width multiplier r(t).

    kind 'constant' uses ``r``; 'intermediate' uses r(t) = t^beta with
    beta in (0, 1/2); 'diffusive' uses r(t) = coef * sqrt(t);
    'superdiffusive' uses r(t) = t^exponent with exponent > 1/2.
    """

    kind: str
    r: float | None = None
    beta: float | None = None
    coef: float | None = None
    exponent: float | None = None

    def __post_init__(self):
        if self.kind == "constant":
            if self.r is None or not self.r > 0:
                raise ValueError("constant regime needs r > 0")
        elif self.kind == "intermediate":
            if self.beta is None or not 0.0 < self.beta < 0.5:
                raise ValueError("intermediate regime needs beta in (0, 1/2)")
        elif self.kind == "diffusive":
            if self.coef is None or not self.coef > 0:
                raise ValueError("diffusive regime needs coef > 0")
        elif self.kind == "superdiffusive":
            exponent = 1.0 if self.exponent is None else self.exponent
            object.__setattr__(self, "exponent", exponent)
            if not exponent > 0.5:
                raise ValueError("superdiffusive regime needs exponent > 1/2")
        else:
            raise ValueError(f"unknown regime kind {self.kind!r}")

    def r_of(self, t: float) -> float:
        if self.kind == "constant":
            return self.r
        if self.kind == "intermediate":
            return t**self.beta
        if self.kind == "diffusive":
            return self.coef * math.sqrt(t)
        return t**self.exponent


def predict(weyl_type, k: int, regime: GrowthRegime, t: float, x, k_r_value: float | None = None) -> float:
    """Case-appropriate asymptotic survival value at time t from point x."""
    weyl_type = WeylType.parse(weyl_type)
    _reject_degenerate(weyl_type, k)
    x = np.asarray(x, dtype=float)
    if x.shape != (k,):
        raise ValueError(f"x must have length k={k}")
    if not t > 0:
        raise ValueError("t must be > 0")
    lam = principal_eigenvalue(weyl_type, k)
    a = alpha(weyl_type, k)
    if regime.kind == "constant":
        r = regime.r
        fx = principal_eigenfunction(weyl_type, x / r)
        intf = math.exp(log_integral_principal(weyl_type, k))
        return math.exp(-t * lam / r**2) * fx * intf
    h = reduite(weyl_type, x)
    if regime.kind == "intermediate":
        rt = regime.r_of(t)
        return k_zero(weyl_type, k) * rt ** (-a) * h * math.exp(-t * lam / rt**2)
    if regime.kind == "diffusive":
        if k_r_value is None:
            raise ValueError("the diffusive regime needs a K_r value (see k_r_estimate)")
        return k_r_value * h * t ** (-a / 2.0)
    return k_infinity(weyl_type, k) * h * t ** (-a / 2.0)


@dataclass(frozen=True)
class RegimeReport:
    """Predicted vs exact-route survival along a time grid."""

    weyl_type: WeylType
    k: int
    regime: GrowthRegime
    alpha: float
    lambda_principal: float
    constants: dict
    rows: list = field(default_factory=list)  # (t, r_t, predicted, observed, ratio)


def regime_report(
    weyl_type,
    k: int,
    regime: GrowthRegime,
    t_grid,
    x,
    k_r_value: float | None = None,
    budget=None,
) -> RegimeReport:
    """Evaluate predicted and observed survival over a time grid."""
    weyl_type = WeylType.parse(weyl_type)
    constants = {
        "lambda": principal_eigenvalue(weyl_type, k),
        "alpha": alpha(weyl_type, k),
        "K0": k_zero(weyl_type, k),
        "Kinf": k_infinity(weyl_type, k),
    }
    if k_r_value is not None:
        constants["Kr"] = k_r_value
    rows = []
    x = np.asarray(x, dtype=float)
    for t in t_grid:
        rt = regime.r_of(float(t))
        pred = predict(weyl_type, k, regime, float(t), x, k_r_value)
        spec = ChamberSpec(weyl_type, k, rt)
        obs = survival_spectral(spec, float(t), x, budget).value
        ratio = obs / pred if pred != 0 else math.inf
        rows.append((float(t), rt, pred, obs, ratio))
    return RegimeReport(
        weyl_type=weyl_type,
        k=k,
        regime=regime,
        alpha=constants["alpha"],
        lambda_principal=constants["lambda"],
        constants=constants,
        rows=rows,
    )
