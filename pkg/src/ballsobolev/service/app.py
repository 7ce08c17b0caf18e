"""FastAPI service wrapping the core package.

The service keeps all basis caches warm in process, so repeated Gram or
expansion requests over the same (family, d, degree) grid are cheap; the CLI
is a thin client of these endpoints.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..ballbasis import BasisElement, SeparableForm, basis_for_family
from ..expansion import (
    CoefficientTable,
    QuadratureBudgetError,
    expand,
    parseval_annihilated,
    parseval_gradient,
    parseval_sphere,
)
from ..harmonics import harmonic_basis
from ..innerprod import InnerProductSpec, gram_report
from ..polyalg import MultiPoly
from . import schemas
from .expressions import ExpressionError, compile_expression


def _numerical_error(message: str) -> HTTPException:
    return HTTPException(status_code=400,
                         detail={"code": "numerical", "message": message})


def _config_error(message: str) -> HTTPException:
    return HTTPException(status_code=400,
                         detail={"code": "config", "message": message})


def _poly_from_payload(payload: schemas.PolynomialPayload) -> MultiPoly:
    try:
        return MultiPoly(payload.dim,
                         {tuple(e): c for e, c in payload.terms})
    except ValueError as exc:
        raise _config_error(f"bad polynomial payload: {exc}") from exc


def _sphere_trace_elements(max_degree: int, d: int) -> list[BasisElement]:
    """Spherical-harmonic system used for the S-family Gram; the squared
    norm is n^2 lambda + 1."""
    out = []
    for n in range(max_degree + 1):
        for nu, harm in enumerate(harmonic_basis(n, d), start=1):
            form = SeparableForm(d, n, 0, nu, (1.0,), harm, False)
            out.append(BasisElement("S", n, 0, nu, form, (float(n * n), 1.0)))
    return out


def create_app() -> FastAPI:
    app = FastAPI(title="ballsobolev", version=__version__)

    @app.get("/v1/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/v1/basis", response_model=schemas.BasisResponse)
    def basis(req: schemas.BasisRequest):
        elements = basis_for_family(req.family, req.n, req.d, req.mu)
        dumps = [el.to_json_dict() for el in elements]
        return schemas.BasisResponse(
            family=req.family, d=req.d, n=req.n, count=len(dumps),
            elements=[schemas.BasisElementOut(**dump) for dump in dumps])

    @app.post("/v1/gram", response_model=schemas.GramResponse,
              response_model_exclude_none=True)
    def gram(req: schemas.GramRequest):
        if req.family == "S":
            elements = _sphere_trace_elements(req.max_degree, req.d)
            spec = InnerProductSpec("S", req.d, lam=req.lam)
        else:
            elements = [el for n in range(req.max_degree + 1)
                        for el in basis_for_family(req.family, n, req.d, req.mu)]
            spec = InnerProductSpec(req.family, req.d, lam=req.lam, mu=req.mu)
        report = gram_report(spec, elements, path=req.path)
        report.pop("lambda", None)
        report["lam"] = req.lam
        if req.tolerance is not None:
            report["tolerance"] = req.tolerance
            report["passed"] = report["max_offdiag"] <= req.tolerance
        return schemas.GramResponse(**report)

    @app.post("/v1/expand", response_model=schemas.ExpandResponse,
              response_model_exclude_none=True)
    def expand_endpoint(req: schemas.ExpandRequest):
        if req.polynomial is not None:
            f = _poly_from_payload(req.polynomial)
            if f.dim != req.d:
                raise _config_error("polynomial dimension differs from d")
        else:
            try:
                f = compile_expression(req.expression, req.d)
            except ExpressionError as exc:
                raise _config_error(str(exc)) from exc
        try:
            table = expand(f, req.family, req.d, req.max_degree,
                           lam=req.lam, mu=req.mu, quad_degree=req.quad_degree,
                           threads=req.threads)
        except QuadratureBudgetError as exc:
            raise _numerical_error(str(exc)) from exc
        except ValueError as exc:
            raise _config_error(str(exc)) from exc
        residual = None
        if isinstance(f, MultiPoly):
            residual = table.reconstruct().coeff_distance(f)
        return _table_response(table, residual)

    @app.post("/v1/parseval", response_model=schemas.ParsevalResponse)
    def parseval(req: schemas.ParsevalRequest):
        f = _poly_from_payload(req.polynomial)
        if f.dim != req.d:
            raise _config_error("polynomial dimension differs from d")
        runner = {"gradient": parseval_gradient,
                  "annihilated": parseval_annihilated,
                  "sphere": parseval_sphere}[req.variant]
        max_degree = req.max_degree
        if max_degree is None:
            max_degree = f.degree() + (2 if req.variant == "annihilated" else 0)
        try:
            report = runner(f, req.d, max_degree)
        except ValueError as exc:
            raise _config_error(str(exc)) from exc
        return schemas.ParsevalResponse(
            variant=req.variant, d=req.d, max_degree=max_degree,
            lhs=report.lhs, rhs_total=report.rhs_total,
            relative_gap=report.relative_gap, tolerance=req.tolerance,
            passed=report.relative_gap <= req.tolerance,
            terms=[(n, j, nu, v) for n, j, nu, v in report.terms])

    return app


def _table_response(table: CoefficientTable, residual) -> schemas.ExpandResponse:
    params: dict[str, float] = {}
    if table.lam is not None:
        params["lambda"] = table.lam
    if table.mu is not None:
        params["mu"] = table.mu
    return schemas.ExpandResponse(
        family=table.family, d=table.d, max_degree=table.max_degree,
        params=params,
        entries=[(n, j, nu, v) for (n, j, nu), v in sorted(table.entries.items())],
        reconstruction_residual=residual,
        quadrature_drift=table.quadrature_drift)


app = create_app()
