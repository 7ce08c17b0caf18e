"""One-variable building blocks: Jacobi and Gegenbauer polynomials, the
integrated boundary-anchored Sobolev polynomials q_k, the second-order
operator behind the Laplacian of separable forms, and Gauss-Jacobi rules.

Polynomial coefficient vectors are dense ascending-degree numpy arrays; all
evaluations on [-1, 1] use stable three-term recurrences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi


class InvalidParameterError(ValueError):
    """Jacobi parameters outside the supported range."""


def _check_jacobi_params(j: int, alpha: float, beta: float) -> None:
    if beta <= -1:
        raise InvalidParameterError(f"beta must exceed -1, got {beta}")
    if alpha == -1:
        if j < 1:
            raise InvalidParameterError("alpha = -1 requires degree >= 1")
    elif alpha <= -1:
        raise InvalidParameterError(f"alpha must exceed -1 (or equal -1), got {alpha}")


def pochhammer(a: float, k: int) -> float:
    """Shifted factorial (a)_k = a (a+1) ... (a+k-1)."""
    out = 1.0
    for i in range(k):
        out *= a + i
    return out


# -- Jacobi polynomials -------------------------------------------------------


def jacobi_eval(j: int, alpha: float, beta: float, s: float) -> float:
    """Value of the classical Jacobi polynomial P_j^{(alpha,beta)} at s.

    alpha = -1 is supported for j >= 1 through the integrated form (see
    jacobi_coeffs), which avoids the recurrence breakdown there.
    """
    if j < 0:
        raise InvalidParameterError("degree must be nonnegative")
    _check_jacobi_params(j, alpha, beta)
    if alpha == -1:
        return float(np.polynomial.polynomial.polyval(s, jacobi_coeffs(j, alpha, beta)))
    if j == 0:
        return 1.0
    p_prev = 1.0
    p = (alpha + 1.0) + (alpha + beta + 2.0) * (s - 1.0) / 2.0
    for k in range(2, j + 1):
        a = 2.0 * k * (k + alpha + beta) * (2.0 * k + alpha + beta - 2.0)
        b = (2.0 * k + alpha + beta - 1.0) * (
            (2.0 * k + alpha + beta) * (2.0 * k + alpha + beta - 2.0) * s
            + alpha * alpha - beta * beta)
        c = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * (2.0 * k + alpha + beta)
        p, p_prev = (b * p - c * p_prev) / a, p
    return p


@lru_cache(maxsize=None)
def jacobi_coeffs(j: int, alpha: float, beta: float) -> tuple[float, ...]:
    """Dense ascending coefficient vector of P_j^{(alpha,beta)}.

    For alpha = -1 (j >= 1) the polynomial is reconstructed from its
    derivative relation: antidifferentiate (j+beta)/2 * P_{j-1}^{(0,beta+1)}
    from -1 and anchor the value P_j^{(-1,beta)}(-1) = (-1)^j (beta+1)_j / j!.
    """
    _check_jacobi_params(j, alpha, beta)
    if alpha == -1:
        inner = np.array(jacobi_coeffs(j - 1, 0.0, beta + 1.0))
        anti = _antiderivative_from_minus_one(inner) * ((j + beta) / 2.0)
        anti[0] += (-1.0) ** j * pochhammer(beta + 1.0, j) / math.factorial(j)
        return tuple(anti)
    if j == 0:
        return (1.0,)
    prev = np.array([1.0])
    # P_1 = (alpha+1) + (alpha+beta+2)(s-1)/2 in ascending coefficients
    cur = np.array([(alpha + 1.0) - (alpha + beta + 2.0) / 2.0,
                    (alpha + beta + 2.0) / 2.0])
    if j == 1:
        return tuple(cur)
    for k in range(2, j + 1):
        a = 2.0 * k * (k + alpha + beta) * (2.0 * k + alpha + beta - 2.0)
        b0 = (2.0 * k + alpha + beta - 1.0) * (alpha * alpha - beta * beta)
        b1 = (2.0 * k + alpha + beta - 1.0) * (2.0 * k + alpha + beta) \
            * (2.0 * k + alpha + beta - 2.0)
        c = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * (2.0 * k + alpha + beta)
        nxt = np.zeros(k + 1)
        nxt[: k] += b0 * cur
        nxt[1: k + 1] += b1 * cur
        nxt[: k - 1] -= c * prev
        nxt /= a
        prev, cur = cur, nxt
    return tuple(cur)


def _antiderivative_from_minus_one(coeffs: np.ndarray) -> np.ndarray:
    """Antiderivative of a coefficient vector, normalized to vanish at -1."""
    out = np.zeros(len(coeffs) + 1)
    for i, c in enumerate(coeffs):
        out[i + 1] = c / (i + 1.0)
    out[0] = -float(np.polynomial.polynomial.polyval(-1.0, out))
    return out


def jacobi_deriv(j: int, alpha: float, beta: float, s: float) -> float:
    """Derivative of P_j^{(alpha,beta)} via the degree-lowering relation
    d/ds P_j^{(a,b)} = (j+a+b+1)/2 * P_{j-1}^{(a+1,b+1)}; valid at alpha = -1,
    where it reduces to (j+beta)/2 * P_{j-1}^{(0,beta+1)}.
    """
    if j < 1:
        if j == 0:
            return 0.0
        raise InvalidParameterError("degree must be nonnegative")
    return (j + alpha + beta + 1.0) / 2.0 * jacobi_eval(j - 1, alpha + 1.0, beta + 1.0, s)


def jacobi_norm(j: int, alpha: float, beta: float) -> float:
    """int_{-1}^1 [P_j^{(a,b)}]^2 (1-s)^a (1+s)^b ds (classical formula)."""
    log = ((alpha + beta + 1.0) * math.log(2.0)
           + math.lgamma(j + alpha + 1.0) + math.lgamma(j + beta + 1.0)
           - math.lgamma(j + alpha + beta + 1.0) - math.lgamma(j + 1.0))
    return math.exp(log) / (2.0 * j + alpha + beta + 1.0)


# -- Gegenbauer and Chebyshev -------------------------------------------------


def gegenbauer_eval(n: int, lam: float, t: float) -> float:
    """C_n^lam(t) by the standard three-term recurrence, lam > 0."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    if lam <= 0:
        raise ValueError("gegenbauer parameter must be positive")
    if n == 0:
        return 1.0
    c_prev = 1.0
    c = 2.0 * lam * t
    for k in range(2, n + 1):
        c, c_prev = (2.0 * (k + lam - 1.0) * t * c
                     - (k + 2.0 * lam - 2.0) * c_prev) / k, c
    return c


def chebyshev_eval(n: int, t: float) -> float:
    """First-kind Chebyshev T_n(t) by recurrence."""
    if n == 0:
        return 1.0
    c_prev, c = 1.0, t
    for _ in range(2, n + 1):
        c, c_prev = 2.0 * t * c - c_prev, c
    return c


# -- boundary-anchored one-variable Sobolev polynomials ----------------------


@lru_cache(maxsize=None)
def qk_coeffs(k: int, d: int) -> tuple[float, ...]:
    """Coefficients of q_k: q_0 = 1 and q_k(x) = int_{-1}^x P_{k-1}^{(0,d/2)}.

    Equivalently 2/(k+(d-2)/2) * [P_k^{(-1,(d-2)/2)}(x) - (-1)^k (d/2)_k / k!].
    """
    if k < 0:
        raise ValueError("degree must be nonnegative")
    if k == 0:
        return (1.0,)
    inner = np.array(jacobi_coeffs(k - 1, 0.0, d / 2.0))
    return tuple(_antiderivative_from_minus_one(inner))


def qk_eval(k: int, d: int, x: float) -> float:
    """Value of q_k at x."""
    return float(np.polynomial.polynomial.polyval(x, qk_coeffs(k, d)))


# -- the radial second-order operator -----------------------------------------


def apply_Jbeta(coeffs, beta: float) -> np.ndarray:
    """Apply (1-s^2) q'' + (beta-1-(beta+3)s) q' - (beta+1) q to a
    coefficient vector; this is the radial factor of the Laplacian acting on
    (1-|x|^2) q(2|x|^2-1) Y with Y harmonic of matching degree.
    """
    c = np.asarray(coeffs, dtype=float)
    d1 = np.polynomial.polynomial.polyder(c) if len(c) > 1 else np.zeros(1)
    d2 = np.polynomial.polynomial.polyder(c, 2) if len(c) > 2 else np.zeros(1)
    out = np.zeros(max(len(c), len(d1) + 1, len(d2) + 2))

    def acc(vec, shift, scale):
        out[shift: shift + len(vec)] += scale * vec

    acc(d2, 0, 1.0)            # q''
    acc(d2, 2, -1.0)           # -s^2 q''
    acc(d1, 0, beta - 1.0)     # (beta-1) q'
    acc(d1, 1, -(beta + 3.0))  # -(beta+3) s q'
    acc(c, 0, -(beta + 1.0))   # -(beta+1) q
    while len(out) > 1 and out[-1] == 0.0:
        out = out[:-1]
    return out


# -- Gauss-Jacobi quadrature ---------------------------------------------------


@dataclass(frozen=True)
class GaussRule:
    """Nodes/weights on (-1,1) for the weight (1-t)^alpha (1+t)^beta."""

    nodes: np.ndarray
    weights: np.ndarray
    alpha: float
    beta: float
    exactness_degree: int

    def integrate(self, f) -> float:
        return float(np.dot(self.weights, f(self.nodes)))

    def integrate_poly(self, coeffs) -> float:
        vals = np.polynomial.polynomial.polyval(self.nodes, np.asarray(coeffs))
        return float(np.dot(self.weights, vals))


@lru_cache(maxsize=None)
def gauss_jacobi_rule(m: int, alpha: float, beta: float) -> GaussRule:
    """m-point Gauss-Jacobi rule, exact for polynomial degree <= 2m-1."""
    if m < 1:
        raise ValueError("node count must be positive")
    if alpha <= -1 or beta <= -1:
        raise InvalidParameterError("Gauss-Jacobi requires alpha, beta > -1")
    nodes, weights = roots_jacobi(m, alpha, beta)
    if alpha == beta:
        # enforce exact symmetry so odd integrands cancel bitwise
        nodes = (nodes - nodes[::-1]) / 2.0
        weights = (weights + weights[::-1]) / 2.0
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return GaussRule(nodes, weights, alpha, beta, 2 * m - 1)
