"""Chamber geometry: membership tests, reduites, Vandermonde products.

The three chamber types on R^k:

    A:  x_1 < x_2 < ... < x_k
    C:  0 < x_1 < ... < x_k
    D:  |x_1| < x_2 < ... < x_k

A truncated chamber additionally confines every coordinate to the open box
(-r*pi/2, r*pi/2).  Chambers are open sets; points where any constraint holds
with equality are classified as outside.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "WeylType",
    "ChamberSpec",
    "ChamberPoint",
    "contains",
    "in_closure",
    "reduite",
    "log_abs_reduite",
    "vandermonde",
]


class WeylType(str, Enum):
    A = "A"
    C = "C"
    D = "D"

    @classmethod
    def parse(cls, value) -> "WeylType":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ValueError(f"Weyl type must be one of A, C, D, got {value!r}") from None


@dataclass(frozen=True)
class ChamberSpec:
    """Chamber type, dimension and box half-width multiplier r.

    The domain is the chamber intersected with (-r*pi/2, r*pi/2)^k.
    """

    weyl_type: WeylType
    k: int
    r: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "weyl_type", WeylType.parse(self.weyl_type))
        if self.k < 1:
            raise ValueError(f"dimension k must be >= 1, got {self.k}")
        if not self.r > 0:
            raise ValueError(f"box half-width multiplier r must be > 0, got {self.r}")

    @property
    def half_width(self) -> float:
        return self.r * math.pi / 2.0

    def rescaled(self) -> "ChamberSpec":
        """The unit-box spec (r=1) this spec maps onto under Brownian scaling."""
        return ChamberSpec(self.weyl_type, self.k, 1.0)


def _as_coords(spec: ChamberSpec, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size != spec.k:
        raise ValueError(f"point must have length k={spec.k}, got shape {x.shape}")
    return x


def _ordering_ok(weyl_type: WeylType, x: np.ndarray, strict: bool) -> bool:
    def lt(a, b):
        return bool(a < b) if strict else bool(a <= b)

    if weyl_type is WeylType.A:
        pairs = zip(x[:-1], x[1:])
    elif weyl_type is WeylType.C:
        if not lt(0.0, x[0]):
            return False
        pairs = zip(x[:-1], x[1:])
    else:  # D: |x_1| < x_2 < ... < x_k (no ordering constraint at k=1)
        if x.size == 1:
            return True
        if not lt(abs(x[0]), x[1]):
            return False
        pairs = zip(x[1:], x[2:])
    return all(lt(a, b) for a, b in pairs)


def contains(spec: ChamberSpec, x) -> bool:
    """True iff x lies strictly inside the truncated chamber of ``spec``."""
    x = _as_coords(spec, x)
    if not np.all(np.abs(x) < spec.half_width):
        return False
    return _ordering_ok(spec.weyl_type, x, strict=True)


def in_closure(spec: ChamberSpec, x) -> bool:
    """True iff x lies in the closure of the truncated chamber."""
    x = _as_coords(spec, x)
    if not np.all(np.abs(x) <= spec.half_width):
        return False
    return _ordering_ok(spec.weyl_type, x, strict=False)


@dataclass(frozen=True)
class ChamberPoint:
    """A validated point strictly inside its truncated chamber."""

    coords: tuple
    spec: ChamberSpec

    def __post_init__(self):
        coords = tuple(float(c) for c in self.coords)
        object.__setattr__(self, "coords", coords)
        if not contains(self.spec, coords):
            raise ValueError(
                f"point {coords} is not strictly inside the type-{self.spec.weyl_type.value} "
                f"chamber with k={self.spec.k}, r={self.spec.r}"
            )

    def array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)


def vandermonde(x) -> float:
    """prod_{i<j} (x_j - x_i); antisymmetric, zero iff two coordinates coincide."""
    x = np.asarray(x, dtype=float)
    k = x.size
    out = 1.0
    for i in range(k):
        for j in range(i + 1, k):
            out *= x[j] - x[i]
    return float(out)


def reduite(weyl_type, x) -> float:
    """Positive harmonic function h_Z vanishing on the chamber boundary.

    h_A is the Vandermonde product, h_D(x) = h_A(x^2), h_C(x) = h_D(x) * prod x_i.
    Defined on all of R^k.
    """
    weyl_type = WeylType.parse(weyl_type)
    x = np.asarray(x, dtype=float)
    if weyl_type is WeylType.A:
        return vandermonde(x)
    hd = vandermonde(x * x)
    if weyl_type is WeylType.D:
        return hd
    return float(hd * np.prod(x))


def log_abs_reduite(weyl_type, x) -> float:
    """log |h_Z(x)|, summed in log space; -inf at zeros of h_Z."""
    weyl_type = WeylType.parse(weyl_type)
    x = np.asarray(x, dtype=float)
    v = x * x if weyl_type is not WeylType.A else x
    k = x.size
    total = 0.0
    for i in range(k):
        for j in range(i + 1, k):
            d = abs(v[j] - v[i])
            if d == 0.0:
                return -math.inf
            total += math.log(d)
    if weyl_type is WeylType.C:
        if np.any(x == 0.0):
            return -math.inf
        total += float(np.sum(np.log(np.abs(x))))
    return total
