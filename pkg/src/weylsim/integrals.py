"""Exact and numerical integration over ordered regions.

Three layers:

* a tiny closed algebra of functions  sum_j c_j * y^d * {cos,sin}(n y)
  (closed under products with sin/cos/monomials and under antiderivatives),
  driving exact iterated integration of determinants of 1-d eigenfunctions
  over simplex-ordered limits for k <= 4;
* tensor Gauss-Legendre rules over the ordered regions (Duffy-style map of
  the ordered box onto the unit cube), used as the medium-k fallback and by
  the determinant-route survival integrator;
* log-space Gamma-product values of the ordered-box integrals of the
  reduites (Selberg integrals), exact for every k.

Terms are keyed by (degree, frequency, kind) with kind 0 = cos, 1 = sin;
frequency 0 with kind 0 encodes the plain monomial y^degree.
"""

import math
from itertools import permutations

import numpy as np

__all__ = [
    "nested_eigen_integral",
    "ordered_region_nodes",
    "log_selberg",
    "log_reduite_box_integral",
    "nested_poly_integral",
]

_COS, _SIN = 0, 1


def _tp_add(dst, key, coef):
    if coef == 0.0:
        return
    if key[1] == 0 and key[2] == _SIN:
        return  # sin(0) == 0
    dst[key] = dst.get(key, 0.0) + coef


def _tp_mul_trig(poly, n, kind):
    """Multiply by cos(n y) (kind 0) or sin(n y) (kind 1), n >= 1."""
    out = {}
    for (d, m, k), c in poly.items():
        h = 0.5 * c
        if k == _COS and kind == _COS:
            _tp_add(out, (d, abs(m - n), _COS), h)
            _tp_add(out, (d, m + n, _COS), h)
        elif k == _COS and kind == _SIN:
            # cos(m) sin(n) = [sin(n+m) + sin(n-m)] / 2
            _tp_add(out, (d, m + n, _SIN), h)
            _tp_add(out, (d, abs(n - m), _SIN), h if n >= m else -h)
        elif k == _SIN and kind == _COS:
            # sin(m) cos(n) = [sin(m+n) + sin(m-n)] / 2
            _tp_add(out, (d, m + n, _SIN), h)
            _tp_add(out, (d, abs(m - n), _SIN), h if m >= n else -h)
        else:
            # sin(m) sin(n) = [cos(m-n) - cos(m+n)] / 2
            _tp_add(out, (d, abs(m - n), _COS), h)
            _tp_add(out, (d, m + n, _COS), -h)
    return out


def _tp_mul_monomial(poly, d_extra):
    return {(d + d_extra, m, k): c for (d, m, k), c in poly.items()}


def _tp_antiderivative(poly):
    out = {}
    for (d, m, k), c in poly.items():
        if m == 0:
            _tp_add(out, (d + 1, 0, _COS), c / (d + 1))
            continue
        # integrate y^d cos/sin(m y) by parts until the power is gone
        deg, coef, kind = d, c, k
        while True:
            if kind == _COS:
                _tp_add(out, (deg, m, _SIN), coef / m)
                nxt_kind, nxt_coef = _SIN, -coef * deg / m
            else:
                _tp_add(out, (deg, m, _COS), -coef / m)
                nxt_kind, nxt_coef = _COS, coef * deg / m
            if deg == 0:
                break
            deg, coef, kind = deg - 1, nxt_coef, nxt_kind
    return out


def _tp_eval(poly, y):
    total = 0.0
    for (d, m, k), c in poly.items():
        trig = math.cos(m * y) if k == _COS else math.sin(m * y)
        total += c * y**d * trig
    return total


def _tp_reflect(poly):
    """The trig poly of y -> f(-y)."""
    out = {}
    for (d, m, k), c in poly.items():
        sign = (-1.0) ** d * (-1.0 if k == _SIN else 1.0)
        _tp_add(out, (d, m, k), sign * c)
    return out


def _basis(m):
    """Bare 1-d Dirichlet mode on (-pi/2, pi/2) without the sqrt(2/pi) factor."""
    return (m, _SIN) if m % 2 == 0 else (m, _COS)


def _nested_product_integral(ms, weyl_tag):
    """Integral of prod_j f_{ms[j]}(y_j) over the ordered region of the given type.

    Region: A: -pi/2 < y_1 < ... < y_k < pi/2; C: 0 < y_1 < ...;
    D: |y_1| < y_2 < ... < y_k < pi/2.  Bare sin/cos modes (no 2/pi factors).
    """
    k = len(ms)
    hi = math.pi / 2
    # D with k=1 degenerates to the full interval (no |y_1| < y_2 constraint)
    lo = -hi if weyl_tag == "A" or (weyl_tag == "D" and k == 1) else 0.0
    cur = {(0, 0, _COS): 1.0}  # constant 1
    for j, m in enumerate(ms):
        n, kind = _basis(m)
        term = _tp_mul_trig(cur, n, kind)
        anti = _tp_antiderivative(term)
        if weyl_tag == "D" and j == 0 and k > 1:
            refl = _tp_reflect(anti)
            cur = {key: c for key, c in anti.items()}
            for key, c in refl.items():
                _tp_add(cur, key, -c)
        else:
            const = _tp_eval(anti, lo)
            cur = dict(anti)
            _tp_add(cur, (0, 0, _COS), -const)
    return _tp_eval(cur, hi)


def nested_eigen_integral(weyl_tag, l):
    """Exact integral of det[f_{l_i}(y_j)] over W_Z cap I^k, incl. (2/pi)^{k/2}.

    Expands the determinant over row permutations (use only for k <= ~5) and
    integrates each product term by iterated antiderivatives.
    """
    k = len(l)
    total = 0.0
    for perm in permutations(range(k)):
        sign = _perm_sign(perm)
        ms = [l[perm[j]] for j in range(k)]
        total += sign * _nested_product_integral(ms, weyl_tag)
    return total * (2.0 / math.pi) ** (k / 2.0)


def _perm_sign(perm):
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, clen = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            clen += 1
        if clen % 2 == 0:
            sign = -sign
    return sign


# ---------------------------------------------------------------------------
# ordered-region Gauss-Legendre rules


def ordered_region_nodes(weyl_tag, k, half_width, order):
    """Nodes (N, k) and weights (N,) for the ordered region of one chamber type.

    Maps the region onto the unit cube: the outermost coordinate spans its full
    range, each inner coordinate spans (lo, next) scaled by a GL node, the
    first D coordinate spans (-y_2, y_2).
    """
    u, w = np.polynomial.legendre.leggauss(order)
    u = 0.5 * (u + 1.0)
    w = 0.5 * w
    L = half_width
    if k == 1:
        lo = 0.0 if weyl_tag == "C" else -L
        y = lo + (L - lo) * u
        return y[:, None], w * (L - lo)

    grids = np.meshgrid(*([u] * k), indexing="ij")
    wgrids = np.meshgrid(*([w] * k), indexing="ij")
    U = np.stack([g.ravel() for g in grids], axis=1)
    W = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)

    y = np.empty_like(U)
    jac = np.ones(U.shape[0])
    lo = -L if weyl_tag == "A" else 0.0
    y[:, k - 1] = lo + (L - lo) * U[:, k - 1]
    jac *= L - lo
    for j in range(k - 2, -1, -1):
        if weyl_tag == "D" and j == 0:
            y[:, 0] = y[:, 1] * (2.0 * U[:, 0] - 1.0)
            jac *= 2.0 * y[:, 1]
        else:
            y[:, j] = lo + (y[:, j + 1] - lo) * U[:, j]
            jac *= y[:, j + 1] - lo
    return y, W * jac


# ---------------------------------------------------------------------------
# log-space closed forms


def log_selberg(k, a, b, g):
    """log of the Selberg integral S_k(a, b, g) on [0,1]^k."""
    s = 0.0
    for j in range(k):
        s += math.lgamma(a + j * g) + math.lgamma(b + j * g) + math.lgamma(1 + (j + 1) * g)
        s -= math.lgamma(a + b + (k + j - 1) * g) + math.lgamma(1 + g)
    return s


def log_reduite_box_integral(weyl_tag, k):
    """log of the reduite's integral over its ordered unit box.

    A: int_{-1<y_1<...<y_k<1} h_A,  C/D: int over the ordered region in (0,1)^k
    (for D including the symmetric y_1 range, i.e. over W_D cap (-1,1)^k).
    """
    lkf = math.lgamma(k + 1)
    if weyl_tag == "A":
        return log_selberg(k, 1.0, 1.0, 0.5) + (k + k * (k - 1) / 2.0) * math.log(2.0) - lkf
    if weyl_tag == "C":
        return log_selberg(k, 1.0, 1.0, 0.5) - k * math.log(2.0) - lkf
    if weyl_tag == "D":
        return log_selberg(k, 0.5, 1.0, 0.5) + (1 - k) * math.log(2.0) - lkf
    raise ValueError(f"unknown chamber tag {weyl_tag!r}")


# ---------------------------------------------------------------------------
# exact polynomial iterated integration (reduites over ordered unit boxes)


def _nested_monomial_integral(exps, lo, symmetric_first):
    """Integral of prod_j y_j^{exps[j]} over lo < y_1 < ... < y_k < 1.

    With symmetric_first, y_1 instead spans (-y_2, y_2).
    """
    cur = {(0, 0, _COS): 1.0}
    k = len(exps)
    for j, e in enumerate(exps):
        term = _tp_mul_monomial(cur, e)
        anti = _tp_antiderivative(term)
        if symmetric_first and j == 0 and k > 1:
            refl = _tp_reflect(anti)
            cur = dict(anti)
            for key, c in refl.items():
                _tp_add(cur, key, -c)
        else:
            const = _tp_eval(anti, lo)
            cur = dict(anti)
            _tp_add(cur, (0, 0, _COS), -const)
    return _tp_eval(cur, 1.0)


def nested_poly_integral(weyl_tag, k):
    """Exact ordered-box integral of h_Z by permutation expansion (k <= ~5)."""
    if weyl_tag == "A":
        rows = list(range(k))  # exponents 0..k-1, region (-1,1)
        lo, sym = -1.0, False
    elif weyl_tag == "C":
        rows = [2 * i + 1 for i in range(k)]  # h_C = det[y_j^{2i-1}]
        lo, sym = 0.0, False
    elif weyl_tag == "D":
        rows = [2 * i for i in range(k)]  # h_D = det[y_j^{2i}]
        lo, sym = (0.0, True) if k > 1 else (-1.0, False)
    else:
        raise ValueError(f"unknown chamber tag {weyl_tag!r}")
    total = 0.0
    for perm in permutations(range(k)):
        exps = [rows[perm[j]] for j in range(k)]
        total += _perm_sign(perm) * _nested_monomial_integral(exps, lo, sym)
    return total
