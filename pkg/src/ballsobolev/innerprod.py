"""The five inner products on polynomial spaces over the unit ball.

Families (all bilinear, symmetric, positive definite on polynomials):

    I(lambda)  : lambda/omega_d int_B grad f . grad g  +  1/omega_d int_S f g
    II(lambda) : lambda/omega_d int_B grad f . grad g  +  f(0) g(0)
    S(lambda)  : lambda/omega_d int_S (df/dr)(dg/dr)   +  1/omega_d int_S f g
    Delta(c)   : c int_B Lap[(1-|x|^2) f] Lap[(1-|x|^2) g]
    Wmu(mu)    : c_mu int_B f g (1-|x|^2)^mu

Each is evaluated by two independent paths: exact monomial moments and a
product Gauss quadrature, and the two are required to agree.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .onevar import gauss_jacobi_rule
from .polyalg import (
    MultiPoly,
    ball_moment,
    integrate_ball,
    integrate_sphere,
    monomials,
    sphere_moment,
    surface_area,
    weighted_ball_moment,
)

log = logging.getLogger(__name__)

DEFAULT_DELTA_NORMALIZATION = 1.0 / math.pi


@dataclass(frozen=True)
class InnerProductSpec:
    """Which inner product, with its parameters."""

    family: str
    d: int
    lam: float | None = None
    mu: float | None = None
    c: float | None = None

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("d must be >= 2")
        if self.family in ("I", "II"):
            if self.lam is None or self.lam <= 0:
                raise ValueError(f"family {self.family} requires lambda > 0")
        elif self.family == "S":
            if self.lam is None or self.lam < 0:
                raise ValueError("family S requires lambda >= 0")
        elif self.family == "Delta":
            if self.c is not None and self.c <= 0:
                raise ValueError("Delta normalization must be positive")
        elif self.family == "Wmu":
            if self.mu is None or self.mu <= -1:
                raise ValueError("family Wmu requires mu > -1")
        else:
            raise ValueError(f"unknown family {self.family!r}")

    @property
    def delta_c(self) -> float:
        return DEFAULT_DELTA_NORMALIZATION if self.c is None else self.c


def weight_normalization(d: int, mu: float) -> float:
    """c_mu with c_mu int_B (1-|x|^2)^mu dx = 1; equals d(d/2+1)/omega_d at
    mu = 1."""
    return 1.0 / weighted_ball_moment((0,) * d, d, mu)


# -- product quadrature on sphere and ball ------------------------------------


@dataclass(frozen=True)
class BallQuadrature:
    """Product rule: sphere nodes/weights plus a radial rule against
    r^{d-1} (1-r^2)^{radial_mu} dr on [0,1]; ball nodes are their product."""

    d: int
    exactness_degree: int
    radial_mu: float
    sphere_nodes: np.ndarray
    sphere_weights: np.ndarray
    ball_nodes: np.ndarray
    ball_weights: np.ndarray

    def integrate_sphere(self, p: MultiPoly) -> float:
        return float(np.dot(self.sphere_weights, p.eval_many(self.sphere_nodes)))

    def integrate_ball(self, p: MultiPoly) -> float:
        return float(np.dot(self.ball_weights, p.eval_many(self.ball_nodes)))


def _sphere_product_rule(d: int, degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights on S^{d-1} exact for polynomial restrictions of total
    degree <= degree: Gauss-Gegenbauer in the polar angles, trapezoid in the
    periodic angle."""
    n_phi = degree + 1
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    nodes = np.stack([np.cos(phi), np.sin(phi)], axis=1)
    weights = np.full(n_phi, 2.0 * math.pi / n_phi)
    # build up from S^1 by adding polar angles; coordinate k has weight
    # exponent (d-2-k)/2 in t = cos(theta_k), k = 1..d-2 counted from the end
    for k in range(d - 2, 0, -1):
        exponent = (d - 2 - k) / 2.0
        m = degree // 2 + 1
        rule = gauss_jacobi_rule(m, exponent, exponent)
        t = rule.nodes
        sin_t = np.sqrt(1.0 - t * t)
        new_nodes = np.empty((len(t) * nodes.shape[0], nodes.shape[1] + 1))
        new_weights = np.empty(len(t) * nodes.shape[0])
        for i, (ti, wi) in enumerate(zip(t, rule.weights)):
            lo = i * nodes.shape[0]
            hi = lo + nodes.shape[0]
            new_nodes[lo:hi, 0] = ti
            new_nodes[lo:hi, 1:] = sin_t[i] * nodes
            new_weights[lo:hi] = wi * weights
        nodes, weights = new_nodes, new_weights
    return nodes, weights


@lru_cache(maxsize=None)
def build_quadrature(d: int, target_degree: int, radial_mu: float = 0.0) -> BallQuadrature:
    """Product quadrature integrating every monomial of degree <=
    target_degree over B^d (with radial weight (1-r^2)^radial_mu) and over
    S^{d-1}."""
    if d < 2 or target_degree < 0:
        raise ValueError("need d >= 2 and target_degree >= 0")
    sphere_nodes, sphere_weights = _sphere_product_rule(d, target_degree)

    # radial rule: r^2 = (1+t)/2 turns int_0^1 g(r) r^{d-1} (1-r^2)^mu dr into
    # a Gauss-Jacobi(mu, (d-2)/2) integral; even powers of r become
    # polynomials in t, odd powers carry odd sphere parity and cancel there.
    m = target_degree // 2 + 1
    rule = gauss_jacobi_rule(m, radial_mu, (d - 2) / 2.0)
    r = np.sqrt((1.0 + rule.nodes) / 2.0)
    radial_weights = rule.weights * 2.0 ** (-radial_mu - (d - 2) / 2.0 - 2.0)

    ball_nodes = np.empty((len(r) * len(sphere_weights), d))
    ball_weights = np.empty(len(r) * len(sphere_weights))
    for i, (ri, wi) in enumerate(zip(r, radial_weights)):
        lo = i * len(sphere_weights)
        hi = lo + len(sphere_weights)
        ball_nodes[lo:hi] = ri * sphere_nodes
        ball_weights[lo:hi] = wi * sphere_weights
    for arr in (sphere_nodes, sphere_weights, ball_nodes, ball_weights):
        arr.setflags(write=False)
    return BallQuadrature(d, target_degree, radial_mu,
                          sphere_nodes, sphere_weights, ball_nodes, ball_weights)


# -- inner product evaluation --------------------------------------------------


def _required_degree(spec: InnerProductSpec, f: MultiPoly, g: MultiPoly) -> int:
    n = f.degree() + g.degree()
    return 2 * max(f.degree(), g.degree()) + 6 if spec.family == "Delta" else n


def _annihilate(p: MultiPoly) -> MultiPoly:
    """Lap[(1-|x|^2) p]."""
    return ((1.0 - MultiPoly.norm2(p.dim)) * p).laplacian()


def ip(spec: InnerProductSpec, f: MultiPoly, g: MultiPoly,
       path: str = "exact", quad: BallQuadrature | None = None) -> float:
    """Inner product of two polynomials along the requested path."""
    if f.dim != g.dim or f.dim != spec.d:
        raise ValueError("dimension mismatch between spec and operands")
    if path == "exact":
        return _ip_exact(spec, f, g)
    if path == "quadrature":
        return _ip_quadrature(spec, f, g, quad)
    raise ValueError(f"unknown path {path!r}")


def _ip_exact(spec: InnerProductSpec, f: MultiPoly, g: MultiPoly) -> float:
    d = spec.d
    omega = surface_area(d)
    fam = spec.family
    if fam in ("I", "II"):
        grad = math.fsum(
            integrate_ball(df * dg) for df, dg in zip(f.gradient(), g.gradient()))
        if fam == "I":
            boundary = integrate_sphere(f * g) / omega
        else:
            boundary = f.eval((0.0,) * d) * g.eval((0.0,) * d)
        return spec.lam / omega * grad + boundary
    if fam == "S":
        radial = integrate_sphere(f.radial_derivative() * g.radial_derivative())
        plain = integrate_sphere(f * g)
        return (spec.lam * radial + plain) / omega
    if fam == "Delta":
        return spec.delta_c * integrate_ball(_annihilate(f) * _annihilate(g))
    if fam == "Wmu":
        return weight_normalization(d, spec.mu) * integrate_ball(f * g, mu=spec.mu)
    raise AssertionError(fam)


def _ip_quadrature(spec: InnerProductSpec, f: MultiPoly, g: MultiPoly,
                   quad: BallQuadrature | None) -> float:
    d = spec.d
    omega = surface_area(d)
    fam = spec.family
    needed = _required_degree(spec, f, g)
    radial_mu = spec.mu if fam == "Wmu" else 0.0
    if quad is None or quad.exactness_degree < needed or quad.radial_mu != radial_mu:
        if quad is not None:
            log.info("quadrature exactness %d below required %d; upgrading",
                     quad.exactness_degree, needed)
        quad = build_quadrature(d, needed, radial_mu)
    if fam in ("I", "II"):
        grad = math.fsum(
            quad.integrate_ball(df * dg) for df, dg in zip(f.gradient(), g.gradient()))
        if fam == "I":
            boundary = quad.integrate_sphere(f * g) / omega
        else:
            boundary = f.eval((0.0,) * d) * g.eval((0.0,) * d)
        return spec.lam / omega * grad + boundary
    if fam == "S":
        radial = quad.integrate_sphere(f.radial_derivative() * g.radial_derivative())
        plain = quad.integrate_sphere(f * g)
        return (spec.lam * radial + plain) / omega
    if fam == "Delta":
        return spec.delta_c * quad.integrate_ball(_annihilate(f) * _annihilate(g))
    if fam == "Wmu":
        # weight is carried by the radial rule
        return weight_normalization(d, spec.mu) * quad.integrate_ball(f * g)
    raise AssertionError(fam)


def ip_I_green(f: MultiPoly, g: MultiPoly, lam: float, d: int) -> float:
    """Boundary-trace inner product rewritten through Green's identity:
    1/omega int_S f [lam dg/dr + g] - lam/omega int_B f Lap(g)."""
    if f.dim != d or g.dim != d:
        raise ValueError("dimension mismatch")
    omega = surface_area(d)
    boundary = integrate_sphere(f * (lam * g.radial_derivative() + g)) / omega
    interior = integrate_ball(f * g.laplacian()) / omega
    return boundary - lam * interior


# -- vectorized Gram machinery -------------------------------------------------


@lru_cache(maxsize=None)
def _moment_matrices(d: int, max_degree: int) -> tuple[np.ndarray, np.ndarray]:
    """(sphere, ball) moment matrices over the graded monomial index."""
    monos = monomials(d, max_degree)
    size = len(monos)
    ms = np.empty((size, size))
    mb = np.empty((size, size))
    for a in range(size):
        for b in range(a, size):
            expo = tuple(x + y for x, y in zip(monos[a], monos[b]))
            ms[a, b] = ms[b, a] = sphere_moment(expo, d)
            mb[a, b] = mb[b, a] = ball_moment(expo, d)
    return ms, mb


@lru_cache(maxsize=None)
def _weighted_moment_matrix(d: int, max_degree: int, mu: float) -> np.ndarray:
    monos = monomials(d, max_degree)
    size = len(monos)
    mw = np.empty((size, size))
    for a in range(size):
        for b in range(a, size):
            expo = tuple(x + y for x, y in zip(monos[a], monos[b]))
            mw[a, b] = mw[b, a] = weighted_ball_moment(expo, d, mu)
    return mw


@lru_cache(maxsize=None)
def _partial_ops(d: int, max_degree: int) -> tuple[np.ndarray, ...]:
    """Matrices of d/dx_i on coefficient vectors over the monomial index."""
    monos = monomials(d, max_degree)
    index = {m: i for i, m in enumerate(monos)}
    size = len(monos)
    ops = []
    for i in range(d):
        op = np.zeros((size, size))
        for col, expo in enumerate(monos):
            e = expo[i]
            if e:
                key = list(expo)
                key[i] = e - 1
                op[index[tuple(key)], col] = e
        ops.append(op)
    return tuple(ops)


def gram(spec: InnerProductSpec, polys, path: str = "exact") -> np.ndarray:
    """Gram matrix of a list of polynomials, vectorized over a shared
    monomial basis (exact path) or shared quadrature nodes."""
    polys = list(polys)
    if not polys:
        return np.zeros((0, 0))
    d = spec.d
    deg = max(p.degree() for p in polys)
    from .polyalg import coeff_matrix  # local import avoids a cycle warning

    if path == "quadrature":
        needed = 2 * deg + 6 if spec.family == "Delta" else 2 * deg
        radial_mu = spec.mu if spec.family == "Wmu" else 0.0
        quad = build_quadrature(d, needed, radial_mu)
        return _gram_quadrature(spec, polys, quad)
    if path != "exact":
        raise ValueError(f"unknown path {path!r}")

    omega = surface_area(d)
    fam = spec.family
    if fam == "Delta":
        polys_t = [_annihilate(p) for p in polys]
        b = coeff_matrix(polys_t, d, deg)
        _, mb = _moment_matrices(d, deg)
        return spec.delta_c * b @ mb @ b.T
    b = coeff_matrix(polys, d, deg)
    ms, mb = _moment_matrices(d, deg)
    if fam == "Wmu":
        mw = _weighted_moment_matrix(d, deg, spec.mu)
        return weight_normalization(d, spec.mu) * b @ mw @ b.T
    if fam == "S":
        monos = monomials(d, deg)
        scale = np.array([sum(m) for m in monos], dtype=float)
        rb = b * scale[None, :]
        return (spec.lam * rb @ ms @ rb.T + b @ ms @ b.T) / omega
    # families I and II share the gradient part
    ops = _partial_ops(d, deg)
    grad = np.zeros((len(polys), len(polys)))
    for op in ops:
        db = b @ op.T
        grad += db @ mb @ db.T
    if fam == "I":
        boundary = b @ ms @ b.T / omega
    else:
        zero_idx = 0  # constant monomial is first in graded order
        v = b[:, zero_idx]
        boundary = np.outer(v, v)
    return spec.lam / omega * grad + boundary


def _gram_quadrature(spec: InnerProductSpec, polys, quad: BallQuadrature) -> np.ndarray:
    omega = surface_area(spec.d)
    fam = spec.family
    if fam == "Delta":
        vals = np.stack([_annihilate(p).eval_many(quad.ball_nodes) for p in polys])
        return spec.delta_c * (vals * quad.ball_weights) @ vals.T
    if fam == "Wmu":
        vals = np.stack([p.eval_many(quad.ball_nodes) for p in polys])
        return weight_normalization(spec.d, spec.mu) * (vals * quad.ball_weights) @ vals.T
    if fam == "S":
        rv = np.stack([p.radial_derivative().eval_many(quad.sphere_nodes) for p in polys])
        pv = np.stack([p.eval_many(quad.sphere_nodes) for p in polys])
        return (spec.lam * (rv * quad.sphere_weights) @ rv.T
                + (pv * quad.sphere_weights) @ pv.T) / omega
    grad = np.zeros((len(polys), len(polys)))
    for i in range(spec.d):
        dv = np.stack([p.partial(i).eval_many(quad.ball_nodes) for p in polys])
        grad += (dv * quad.ball_weights) @ dv.T
    if fam == "I":
        pv = np.stack([p.eval_many(quad.sphere_nodes) for p in polys])
        boundary = (pv * quad.sphere_weights) @ pv.T / omega
    else:
        v = np.array([p.eval((0.0,) * spec.d) for p in polys])
        boundary = np.outer(v, v)
    return spec.lam / omega * grad + boundary


def gram_report(spec: InnerProductSpec, elements, path: str = "exact") -> dict:
    """Gram matrix of labeled basis elements plus diagnostics: largest
    off-diagonal entry and the diagonal against the stored closed norms.

    For the Delta family the report carries diagonal/nominal ratios instead
    of errors, since the stored constants are normalization-dependent.
    """
    elements = list(elements)
    polys = [el.to_multipoly() for el in elements]
    matrix = gram(spec, polys, path=path)
    n = len(elements)
    off = 0.0
    for a in range(n):
        for b in range(n):
            if a != b:
                off = max(off, abs(matrix[a, b]))
    diag = np.diag(matrix) if n else np.zeros(0)

    report: dict = {
        "family": spec.family,
        "d": spec.d,
        "path": path,
        "count": n,
        "max_offdiag": float(off),
        "labels": [[el.n, el.j, el.nu] for el in elements],
        "matrix": [float(v) for v in matrix.ravel()],
        "diagonal": [float(v) for v in diag],
    }
    if spec.lam is not None:
        report["lambda"] = spec.lam
    if spec.mu is not None:
        report["mu"] = spec.mu

    if spec.family == "Delta":
        ratios = []
        for el, measured in zip(elements, diag):
            nominal = el.closed_norm_at(None)
            ratios.append(float(measured / nominal))
        report["diag_over_nominal"] = ratios
        if ratios:
            report["ratio_spread"] = float(max(ratios) / min(ratios) - 1.0)
    else:
        errs = []
        for el, measured in zip(elements, diag):
            closed = el.closed_norm_at(spec.lam)
            errs.append(abs(measured - closed) / max(abs(closed), 1e-300))
        report["max_diag_err"] = float(max(errs)) if errs else 0.0
    return report
