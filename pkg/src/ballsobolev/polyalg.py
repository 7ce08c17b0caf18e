"""Sparse multivariate polynomial arithmetic with closed-form moments.

A polynomial in d variables is a map from exponent tuples to float
coefficients.  Monomial integrals over the unit sphere S^{d-1} and the unit
ball B^d have closed forms in terms of Gamma functions, so every polynomial
can be integrated exactly (up to float rounding).  This is the exact
integration path that every inner product in the package is checked against.
"""

from __future__ import annotations

import json
import math
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

Exponent = tuple[int, ...]


class DimensionMismatchError(ValueError):
    """Operands live in different ambient dimensions."""


class MultiPoly:
    """Sparse polynomial: exponent tuple -> coefficient, no zero terms stored."""

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Mapping[Exponent, float] | None = None):
        if dim < 1:
            raise ValueError(f"dimension must be >= 1, got {dim}")
        clean: dict[Exponent, float] = {}
        if terms:
            for expo, coef in terms.items():
                if len(expo) != dim:
                    raise ValueError(f"exponent {expo} has length != dim={dim}")
                if any(e < 0 for e in expo):
                    raise ValueError(f"negative exponent in {expo}")
                if coef != 0.0:
                    expo = tuple(int(e) for e in expo)
                    clean[expo] = clean.get(expo, 0.0) + float(coef)
                    if clean[expo] == 0.0:
                        del clean[expo]
        self.dim = dim
        self.terms = clean

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, dim: int) -> "MultiPoly":
        return cls(dim, {})

    @classmethod
    def constant(cls, dim: int, value: float) -> "MultiPoly":
        return cls(dim, {(0,) * dim: float(value)})

    @classmethod
    def variable(cls, dim: int, i: int) -> "MultiPoly":
        """The coordinate polynomial x_i (0-based index)."""
        if not 0 <= i < dim:
            raise ValueError(f"variable index {i} out of range for dim {dim}")
        expo = [0] * dim
        expo[i] = 1
        return cls(dim, {tuple(expo): 1.0})

    @classmethod
    def norm2(cls, dim: int) -> "MultiPoly":
        """The squared Euclidean norm x_1^2 + ... + x_d^2."""
        terms = {}
        for i in range(dim):
            expo = [0] * dim
            expo[i] = 2
            terms[tuple(expo)] = 1.0
        return cls(dim, terms)

    # -- basic queries -----------------------------------------------------

    def degree(self) -> int:
        """Total degree; the zero polynomial has degree 0 by convention."""
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, expo: Sequence[int]) -> float:
        return self.terms.get(tuple(expo), 0.0)

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    # -- arithmetic --------------------------------------------------------

    def _check_dim(self, other: "MultiPoly") -> None:
        if self.dim != other.dim:
            raise DimensionMismatchError(
                f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = MultiPoly.constant(self.dim, other)
        self._check_dim(other)
        out = dict(self.terms)
        for expo, coef in other.terms.items():
            s = out.get(expo, 0.0) + coef
            if s == 0.0:
                out.pop(expo, None)
            else:
                out[expo] = s
        p = MultiPoly.__new__(MultiPoly)
        p.dim, p.terms = self.dim, out
        return p

    __radd__ = __add__

    def __neg__(self):
        p = MultiPoly.__new__(MultiPoly)
        p.dim = self.dim
        p.terms = {e: -c for e, c in self.terms.items()}
        return p

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            other = MultiPoly.constant(self.dim, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            if other == 0:
                return MultiPoly.zero(self.dim)
            p = MultiPoly.__new__(MultiPoly)
            p.dim = self.dim
            p.terms = {e: c * other for e, c in self.terms.items()}
            return p
        self._check_dim(other)
        out: dict[Exponent, float] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                expo = tuple(a + b for a, b in zip(ea, eb))
                s = out.get(expo, 0.0) + ca * cb
                out[expo] = s
        p = MultiPoly.__new__(MultiPoly)
        p.dim = self.dim
        p.terms = {e: c for e, c in out.items() if c != 0.0}
        return p

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers not supported")
        result = MultiPoly.constant(self.dim, 1.0)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    # -- calculus ----------------------------------------------------------

    def partial(self, i: int) -> "MultiPoly":
        """Exact partial derivative with respect to x_i."""
        out: dict[Exponent, float] = {}
        for expo, coef in self.terms.items():
            e = expo[i]
            if e == 0:
                continue
            lowered = list(expo)
            lowered[i] = e - 1
            key = tuple(lowered)
            out[key] = out.get(key, 0.0) + coef * e
        p = MultiPoly.__new__(MultiPoly)
        p.dim = self.dim
        p.terms = {e: c for e, c in out.items() if c != 0.0}
        return p

    def gradient(self) -> list["MultiPoly"]:
        return [self.partial(i) for i in range(self.dim)]

    def laplacian(self) -> "MultiPoly":
        out = MultiPoly.zero(self.dim)
        for i in range(self.dim):
            out = out + self.partial(i).partial(i)
        return out

    def radial_derivative(self) -> "MultiPoly":
        """x . grad(p); restricted to the sphere this is d/dr."""
        out = MultiPoly.zero(self.dim)
        for i in range(self.dim):
            out = out + MultiPoly.variable(self.dim, i) * self.partial(i)
        return out

    # -- evaluation --------------------------------------------------------

    def eval(self, x: Sequence[float]) -> float:
        """Value of the polynomial at a point, by direct term summation."""
        if len(x) != self.dim:
            raise ValueError(f"point has length {len(x)}, expected {self.dim}")
        total = 0.0
        for expo, coef in self.terms.items():
            term = coef
            for xi, e in zip(x, expo):
                if e:
                    term *= xi ** e
            total += term
        return total

    def eval_many(self, points: np.ndarray) -> np.ndarray:
        """Vectorized evaluation at an (m, d) array of points."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[None, :]
        if pts.shape[1] != self.dim:
            raise ValueError(f"points have dim {pts.shape[1]}, expected {self.dim}")
        out = np.zeros(pts.shape[0])
        for expo, coef in self.terms.items():
            term = np.full(pts.shape[0], coef)
            for i, e in enumerate(expo):
                if e:
                    term *= pts[:, i] ** e
            out += term
        return out

    def __call__(self, x):
        return self.eval(x)

    # -- comparison helpers --------------------------------------------------

    def coeff_distance(self, other: "MultiPoly") -> float:
        """Max absolute coefficient difference between two polynomials."""
        self._check_dim(other)
        keys = set(self.terms) | set(other.terms)
        return max(
            (abs(self.terms.get(k, 0.0) - other.terms.get(k, 0.0)) for k in keys),
            default=0.0,
        )

    def prune(self, rel_tol: float) -> "MultiPoly":
        """Drop coefficients below rel_tol * max|coeff|."""
        cut = rel_tol * self.max_abs_coeff()
        p = MultiPoly.__new__(MultiPoly)
        p.dim = self.dim
        p.terms = {e: c for e, c in self.terms.items() if abs(c) > cut}
        return p

    def __repr__(self):
        if not self.terms:
            return f"MultiPoly({self.dim}, 0)"
        parts = []
        for expo in sorted(self.terms, key=lambda e: (sum(e), e)):
            mono = "*".join(f"x{i + 1}^{e}" for i, e in enumerate(expo) if e)
            parts.append(f"{self.terms[expo]:+g}{'*' + mono if mono else ''}")
        return f"MultiPoly({self.dim}, {' '.join(parts)})"

    # -- serialization -------------------------------------------------------

    def to_json_dict(self) -> dict:
        terms = sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]))
        return {"dim": self.dim, "terms": [[list(e), c] for e, c in terms]}

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "MultiPoly":
        dim = int(data["dim"])
        return cls(dim, {tuple(int(x) for x in e): float(c)
                         for e, c in data["terms"]})

    def to_text(self) -> str:
        """One term per line: `coef e1 e2 ... ed` (repr round-trips floats)."""
        lines = []
        for expo in sorted(self.terms, key=lambda e: (sum(e), e)):
            lines.append(" ".join([repr(self.terms[expo])] + [str(e) for e in expo]))
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text: str, dim: int | None = None) -> "MultiPoly":
        terms: dict[Exponent, float] = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split()
            coef = float(fields[0])
            expo = tuple(int(f) for f in fields[1:])
            if dim is None:
                dim = len(expo)
            elif len(expo) != dim:
                raise ValueError(f"inconsistent dimension in line {line!r}")
            terms[expo] = terms.get(expo, 0.0) + coef
        if dim is None:
            raise ValueError("cannot infer dimension from empty input")
        return cls(dim, terms)

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json(cls, text: str) -> "MultiPoly":
        return cls.from_json_dict(json.loads(text))


# -- closed-form moments ----------------------------------------------------


def surface_area(d: int) -> float:
    """Area of S^{d-1}: 2 pi^{d/2} / Gamma(d/2)."""
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


@lru_cache(maxsize=None)
def sphere_moment(alpha: Exponent, d: int) -> float:
    """Integral of x^alpha over S^{d-1} (unnormalized surface measure).

    Zero when any exponent is odd; otherwise
    2 * prod_i Gamma((alpha_i+1)/2) / Gamma((|alpha|+d)/2),
    evaluated through log-Gamma to stay finite for large |alpha|.
    """
    if d < 2:
        raise ValueError("sphere moments require d >= 2")
    if len(alpha) != d:
        raise ValueError(f"exponent length {len(alpha)} != d={d}")
    if any(a % 2 for a in alpha):
        return 0.0
    total = sum(alpha)
    log_num = sum(math.lgamma((a + 1) / 2.0) for a in alpha)
    log_den = math.lgamma((total + d) / 2.0)
    return 2.0 * math.exp(log_num - log_den)


@lru_cache(maxsize=None)
def ball_moment(alpha: Exponent, d: int) -> float:
    """Integral of x^alpha over the unit ball B^d (radial factorization)."""
    s = sphere_moment(alpha, d)
    if s == 0.0:
        return 0.0
    return s / (sum(alpha) + d)


@lru_cache(maxsize=None)
def weighted_ball_moment(alpha: Exponent, d: int, mu: float) -> float:
    """Integral of x^alpha (1-|x|^2)^mu over B^d, mu > -1.

    Radial part is a Beta integral: int_0^1 r^{|a|+d-1}(1-r^2)^mu dr
    = Gamma((|a|+d)/2) Gamma(mu+1) / (2 Gamma((|a|+d)/2 + mu + 1)).
    """
    if mu <= -1:
        raise ValueError("weight exponent must exceed -1")
    s = sphere_moment(alpha, d)
    if s == 0.0:
        return 0.0
    a = (sum(alpha) + d) / 2.0
    log_radial = math.lgamma(a) + math.lgamma(mu + 1.0) - math.lgamma(a + mu + 1.0)
    return s * 0.5 * math.exp(log_radial)


def integrate_sphere(p: MultiPoly) -> float:
    """Exact integral of p over S^{d-1} by term-wise moment summation."""
    return math.fsum(c * sphere_moment(e, p.dim) for e, c in p.terms.items())


def integrate_ball(p: MultiPoly, mu: float = 0.0) -> float:
    """Exact integral of p (1-|x|^2)^mu over B^d; mu=0 is the plain ball."""
    if mu == 0.0:
        return math.fsum(c * ball_moment(e, p.dim) for e, c in p.terms.items())
    return math.fsum(
        c * weighted_ball_moment(e, p.dim, mu) for e, c in p.terms.items())


# -- monomial index helpers (used by the vectorized Gram/expansion paths) ----


@lru_cache(maxsize=None)
def monomials(d: int, max_degree: int) -> tuple[Exponent, ...]:
    """All exponent tuples with |alpha| <= max_degree, graded lex order."""
    out: list[Exponent] = []
    for n in range(max_degree + 1):
        out.extend(homogeneous_monomials(d, n))
    return tuple(out)


@lru_cache(maxsize=None)
def homogeneous_monomials(d: int, n: int) -> tuple[Exponent, ...]:
    """Exponent tuples with |alpha| = n, lexicographically descending."""
    if d == 1:
        return ((n,),)
    out = []
    for first in range(n, -1, -1):
        for rest in homogeneous_monomials(d - 1, n - first):
            out.append((first,) + rest)
    return tuple(out)


def coeff_vector(p: MultiPoly, index: Mapping[Exponent, int], size: int) -> np.ndarray:
    v = np.zeros(size)
    for expo, coef in p.terms.items():
        v[index[expo]] = coef
    return v


def coeff_matrix(polys: Iterable[MultiPoly], d: int, max_degree: int) -> np.ndarray:
    """Rows are coefficient vectors over the graded monomial index."""
    monos = monomials(d, max_degree)
    index = {m: i for i, m in enumerate(monos)}
    rows = [coeff_vector(p, index, len(monos)) for p in polys]
    return np.array(rows) if rows else np.zeros((0, len(monos)))


def poly_from_vector(v: np.ndarray, d: int, max_degree: int) -> MultiPoly:
    monos = monomials(d, max_degree)
    return MultiPoly(d, {m: float(c) for m, c in zip(monos, v) if c != 0.0})
