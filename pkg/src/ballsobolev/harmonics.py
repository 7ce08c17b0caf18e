"""Orthonormal bases of homogeneous harmonic polynomials in d variables.

The degree-n harmonic subspace is computed as the null space of the Laplacian
on homogeneous coefficient space, then orthonormalized against the normalized
surface measure on S^{d-1} using exact monomial moments.  The construction is
uniform in the dimension and deterministic for a fixed (n, d).
"""

from __future__ import annotations

import json
import math
import os
import threading
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .onevar import chebyshev_eval, gegenbauer_eval
from .polyalg import (
    MultiPoly,
    homogeneous_monomials,
    integrate_sphere,
    sphere_moment,
    surface_area,
)

CACHE_ENV_VAR = "SOBOLEV_BALL_CACHE"

_NULLSPACE_RCOND = 1e-10


class RankError(RuntimeError):
    """Gram matrix of the harmonic candidate basis is not positive definite."""


def dim_harmonic(n: int, d: int) -> int:
    """Dimension of the space of degree-n homogeneous harmonics."""
    if n < 0 or d < 2:
        raise ValueError("need n >= 0 and d >= 2")

    def comb0(a, b):
        return math.comb(a, b) if a >= b else 0

    return comb0(n + d - 1, d - 1) - comb0(n + d - 3, d - 1)


@dataclass(frozen=True)
class HarmonicBasis:
    """Orthonormal basis of degree-n harmonics for (1/omega_d) int_S Y Y'."""

    d: int
    n: int
    elements: tuple[MultiPoly, ...]

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    def to_json_dict(self) -> dict:
        return {
            "d": self.d,
            "n": self.n,
            "elements": [
                {"d": self.d, "n": self.n, "nu": i + 1, "poly": p.to_json_dict()}
                for i, p in enumerate(self.elements)
            ],
        }

    @classmethod
    def from_json_dict(cls, data) -> "HarmonicBasis":
        elements = tuple(
            MultiPoly.from_json_dict(e["poly"]) for e in data["elements"])
        return cls(int(data["d"]), int(data["n"]), elements)


_cache: dict[tuple[int, int], HarmonicBasis] = {}
_cache_lock = threading.Lock()


def harmonic_basis(n: int, d: int) -> HarmonicBasis:
    """Deterministic orthonormal basis of degree-n harmonics (cached)."""
    key = (n, d)
    basis = _cache.get(key)
    if basis is not None:
        return basis
    with _cache_lock:
        basis = _cache.get(key)
        if basis is None:
            basis = _load_from_disk(n, d)
            if basis is None:
                basis = _build_basis(n, d)
                _store_to_disk(basis)
            _cache[key] = basis
    return basis


def _cache_path(n: int, d: int) -> str | None:
    root = os.environ.get(CACHE_ENV_VAR)
    if not root:
        return None
    return os.path.join(root, f"harmonics_d{d}_n{n}.json")


def _load_from_disk(n: int, d: int) -> HarmonicBasis | None:
    path = _cache_path(n, d)
    if path is None or not os.path.exists(path):
        return None
    with open(path, "r", encoding="utf-8") as fh:
        return HarmonicBasis.from_json_dict(json.load(fh))


def _store_to_disk(basis: HarmonicBasis) -> None:
    path = _cache_path(basis.n, basis.d)
    if path is None:
        return
    os.makedirs(os.path.dirname(path), exist_ok=True)
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(basis.to_json_dict(), fh)
    os.replace(tmp, path)


def _build_basis(n: int, d: int) -> HarmonicBasis:
    monos = homogeneous_monomials(d, n)
    count = len(monos)
    expected = dim_harmonic(n, d)

    if n < 2:
        null = np.eye(count)
    else:
        lower = homogeneous_monomials(d, n - 2)
        low_index = {m: i for i, m in enumerate(lower)}
        lap = np.zeros((len(lower), count))
        for col, expo in enumerate(monos):
            for i in range(d):
                e = expo[i]
                if e >= 2:
                    key = list(expo)
                    key[i] = e - 2
                    lap[low_index[tuple(key)], col] += e * (e - 1)
        null = scipy.linalg.null_space(lap, rcond=_NULLSPACE_RCOND)

    if null.shape[1] != expected:
        raise RankError(
            f"harmonic null space has dimension {null.shape[1]}, expected {expected}")

    omega = surface_area(d)
    moment = np.empty((count, count))
    for a, ea in enumerate(monos):
        for b in range(a, count):
            val = sphere_moment(tuple(x + y for x, y in zip(ea, monos[b])), d) / omega
            moment[a, b] = val
            moment[b, a] = val
    gram = null.T @ moment @ null
    try:
        chol = np.linalg.cholesky(gram)
    except np.linalg.LinAlgError as exc:
        raise RankError("harmonic Gram matrix is not positive definite") from exc
    coeffs = null @ np.linalg.inv(chol).T

    elements = []
    for col in range(expected):
        vec = coeffs[:, col]
        cut = 1e-14 * np.max(np.abs(vec))
        poly = MultiPoly(d, {m: float(c) for m, c in zip(monos, vec) if abs(c) > cut})
        elements.append(poly)
    return HarmonicBasis(d, n, tuple(elements))


def zonal_kernel(n: int, d: int, x, y) -> float:
    """Sum over nu of Y_nu^n(x) Y_nu^n(y) for y on the sphere, in closed form.

    Equals |x|^n (n+a)/a C_n^a(x'.y) with a = (d-2)/2 for d >= 3; the d = 2
    case is the Chebyshev limit 2 T_n(x'.y) |x|^n (n >= 1).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if abs(np.linalg.norm(y) - 1.0) > 1e-12:
        raise ValueError("second argument must lie on the unit sphere")
    if n == 0:
        return 1.0
    rx = float(np.linalg.norm(x))
    if rx == 0.0:
        return 0.0
    t = float(np.dot(x / rx, y))
    t = min(1.0, max(-1.0, t))
    if d == 2:
        return rx ** n * 2.0 * chebyshev_eval(n, t)
    a = (d - 2) / 2.0
    return rx ** n * ((n + a) / a) * gegenbauer_eval(n, a, t)


def sphere_pairing(f: MultiPoly, g: MultiPoly) -> float:
    """(1/omega_d) int_S f g, by exact moments."""
    return integrate_sphere(f * g) / surface_area(f.dim)


def project_Yn(f: MultiPoly, n: int, d: int) -> MultiPoly:
    """Degree-n harmonic component of the sphere restriction of f.

    Returns sum_nu <f, Y_nu^n>_{L2(S)} Y_nu^n as a polynomial, computed with
    exact sphere moments.
    """
    basis = harmonic_basis(n, d)
    out = MultiPoly.zero(d)
    for el in basis:
        out = out + sphere_pairing(f, el) * el
    return out
