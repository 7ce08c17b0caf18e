"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

Family = Literal["I", "II", "S", "Delta", "Wmu"]
BasisFamily = Literal["I", "II", "Delta", "Wmu"]


class PolynomialPayload(BaseModel):
    """Wire format of a sparse polynomial; exponents are lists of length dim."""

    dim: int = Field(ge=1)
    terms: list[tuple[list[int], float]]


class BasisRequest(BaseModel):
    family: BasisFamily
    d: int = Field(ge=2)
    n: int = Field(ge=0)
    mu: Optional[float] = Field(default=None, gt=-1)

    @model_validator(mode="after")
    def _check_mu(self):
        if self.family == "Wmu" and self.mu is None:
            raise ValueError("family Wmu requires mu")
        return self


class BasisElementOut(BaseModel):
    family: str
    n: int
    j: int
    nu: int
    closed_norm: tuple[float, float]
    poly: PolynomialPayload
    mu: Optional[float] = None


class BasisResponse(BaseModel):
    family: str
    d: int
    n: int
    count: int
    elements: list[BasisElementOut]


class GramRequest(BaseModel):
    family: Family
    d: int = Field(ge=2)
    max_degree: int = Field(ge=0)
    lam: Optional[float] = Field(default=None, alias="lambda")
    mu: Optional[float] = Field(default=None, gt=-1)
    path: Literal["exact", "quadrature"] = "exact"
    tolerance: Optional[float] = Field(default=None, gt=0)

    model_config = {"populate_by_name": True}

    @model_validator(mode="after")
    def _check_params(self):
        if self.family in ("I", "II", "S") and self.lam is None:
            raise ValueError(f"family {self.family} requires lambda")
        if self.family == "Wmu" and self.mu is None:
            raise ValueError("family Wmu requires mu")
        return self


class GramResponse(BaseModel):
    family: str
    d: int
    path: str
    count: int
    max_offdiag: float
    labels: list[list[int]]
    matrix: list[float]
    diagonal: list[float]
    lam: Optional[float] = Field(default=None, alias="lambda")
    mu: Optional[float] = None
    max_diag_err: Optional[float] = None
    diag_over_nominal: Optional[list[float]] = None
    ratio_spread: Optional[float] = None
    tolerance: Optional[float] = None
    passed: Optional[bool] = None

    model_config = {"populate_by_name": True}


class ExpandRequest(BaseModel):
    family: BasisFamily
    d: int = Field(ge=2)
    max_degree: int = Field(ge=0)
    lam: Optional[float] = Field(default=None, alias="lambda")
    mu: Optional[float] = Field(default=None, gt=-1)
    polynomial: Optional[PolynomialPayload] = None
    expression: Optional[str] = None
    quad_degree: Optional[int] = Field(default=None, ge=0)
    threads: int = Field(default=1, ge=1)

    model_config = {"populate_by_name": True}

    @model_validator(mode="after")
    def _check_input(self):
        if (self.polynomial is None) == (self.expression is None):
            raise ValueError("provide exactly one of polynomial or expression")
        if self.family in ("I", "II") and self.lam is None:
            raise ValueError(f"family {self.family} requires lambda")
        if self.family == "Wmu" and self.mu is None:
            raise ValueError("family Wmu requires mu")
        if self.expression is not None and self.quad_degree is None:
            raise ValueError("expression input requires quad_degree")
        return self


class ExpandResponse(BaseModel):
    family: str
    d: int
    max_degree: int
    params: dict[str, float]
    entries: list[tuple[int, int, int, float]]
    reconstruction_residual: Optional[float] = None
    quadrature_drift: Optional[float] = None


class ParsevalRequest(BaseModel):
    d: int = Field(ge=2)
    polynomial: PolynomialPayload
    variant: Literal["gradient", "annihilated", "sphere"] = "gradient"
    max_degree: Optional[int] = Field(default=None, ge=0)
    tolerance: float = Field(default=1e-9, gt=0)


class ParsevalResponse(BaseModel):
    variant: str
    d: int
    max_degree: int
    lhs: float
    rhs_total: float
    relative_gap: float
    tolerance: float
    passed: bool
    terms: list[tuple[int, int, int, float]]


class HealthResponse(BaseModel):
    status: str
    version: str
