"""Analytic field catalog: mass profiles, scalar potentials, vector potentials.

Fields are closures over their parameters, not grid samples, so a single
profile serves every grid resolution. All evaluators accept scalars or
numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "PhysicalConstants",
    "ScalarField",
    "MassProfile",
    "VectorPotential",
    "make_scalar_field",
    "make_mass_profile",
    "make_potential",
    "make_vector_potential",
    "gauge_transform",
    "FieldError",
]


class FieldError(ValueError):
    """Unknown catalog kind or invalid field parameters."""


@dataclass(frozen=True)
class PhysicalConstants:
    """Unit system: hbar and the charge e. Natural units by default."""

    hbar: float = 1.0
    charge: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.hbar) and self.hbar > 0):
            raise FieldError(f"hbar must be finite and positive, got {self.hbar}")
        if not np.isfinite(self.charge):
            raise FieldError(f"charge must be finite, got {self.charge}")


@dataclass(frozen=True)
class ScalarField:
    """Scalar function of (x, y) with analytic gradient (and optional hessian)."""

    kind: str
    params: dict
    evaluate: Callable = field(repr=False)
    gradient: Callable = field(repr=False)
    hessian: Callable | None = field(default=None, repr=False)


@dataclass(frozen=True)
class MassProfile:
    """Positive mass landscape M(x, y) built from a ScalarField plus scale m0."""

    field: ScalarField
    m0: float

    @property
    def kind(self) -> str:
        return self.field.kind

    @property
    def params(self) -> dict:
        return self.field.params

    def evaluate(self, x, y):
        return self.field.evaluate(x, y)

    def gradient(self, x, y):
        return self.field.gradient(x, y)


@dataclass(frozen=True)
class VectorPotential:
    """Two-component gauge field A = (ax, ay)."""

    ax: ScalarField
    ay: ScalarField

    def evaluate(self, x, y):
        return self.ax.evaluate(x, y), self.ay.evaluate(x, y)

    def curl(self, x, y):
        """B_z = dAy/dx - dAx/dy from the analytic gradients."""
        return self.ay.gradient(x, y)[0] - self.ax.gradient(x, y)[1]


def _const_field(kind: str, c: float, params: dict) -> ScalarField:
    return ScalarField(
        kind=kind,
        params=params,
        evaluate=lambda x, y: c * np.ones_like(np.asarray(x, dtype=float)),
        gradient=lambda x, y: (np.zeros_like(np.asarray(x, dtype=float)),) * 2,
        hessian=lambda x, y: (np.zeros_like(np.asarray(x, dtype=float)),) * 4,
    )


def make_scalar_field(kind: str, **params: float) -> ScalarField:
    """General scalar-field catalog (potentials, gauge functions).

    Kinds: "zero"; "constant" (c); "harmonic" (k) -> k*(x^2+y^2)/2;
    "linear" (cx, cy) -> cx*x + cy*y; "bilinear" (c) -> c*x*y.
    """
    if kind == "zero":
        return _const_field("zero", 0.0, {})
    if kind == "constant":
        c = float(params.pop("c"))
        _check_no_extra(kind, params)
        return _const_field("constant", c, {"c": c})
    if kind == "harmonic":
        k = float(params.pop("k", 1.0))
        _check_no_extra(kind, params)
        return ScalarField(
            kind="harmonic",
            params={"k": k},
            evaluate=lambda x, y: 0.5 * k * (np.asarray(x, dtype=float) ** 2 + np.asarray(y, dtype=float) ** 2),
            gradient=lambda x, y: (k * np.asarray(x, dtype=float), k * np.asarray(y, dtype=float)),
            hessian=lambda x, y: (
                k * np.ones_like(np.asarray(x, dtype=float)),
                np.zeros_like(np.asarray(x, dtype=float)),
                np.zeros_like(np.asarray(x, dtype=float)),
                k * np.ones_like(np.asarray(x, dtype=float)),
            ),
        )
    if kind == "linear":
        cx = float(params.pop("cx", 0.0))
        cy = float(params.pop("cy", 0.0))
        _check_no_extra(kind, params)
        return ScalarField(
            kind="linear",
            params={"cx": cx, "cy": cy},
            evaluate=lambda x, y: cx * np.asarray(x, dtype=float) + cy * np.asarray(y, dtype=float),
            gradient=lambda x, y: (
                cx * np.ones_like(np.asarray(x, dtype=float)),
                cy * np.ones_like(np.asarray(x, dtype=float)),
            ),
            hessian=lambda x, y: (np.zeros_like(np.asarray(x, dtype=float)),) * 4,
        )
    if kind == "bilinear":
        c = float(params.pop("c"))
        _check_no_extra(kind, params)
        return ScalarField(
            kind="bilinear",
            params={"c": c},
            evaluate=lambda x, y: c * np.asarray(x, dtype=float) * np.asarray(y, dtype=float),
            gradient=lambda x, y: (c * np.asarray(y, dtype=float), c * np.asarray(x, dtype=float)),
            hessian=lambda x, y: (
                np.zeros_like(np.asarray(x, dtype=float)),
                c * np.ones_like(np.asarray(x, dtype=float)),
                c * np.ones_like(np.asarray(x, dtype=float)),
                np.zeros_like(np.asarray(x, dtype=float)),
            ),
        )
    raise FieldError(f"unknown scalar field kind {kind!r}")


def _check_no_extra(kind: str, leftover: dict) -> None:
    if leftover:
        raise FieldError(f"unexpected parameters for {kind!r}: {sorted(leftover)}")


def make_potential(kind: str, **params: float) -> ScalarField:
    """Scalar potential catalog: "zero" or "harmonic" (k)."""
    if kind not in ("zero", "harmonic"):
        raise FieldError(f"unknown potential kind {kind!r}")
    return make_scalar_field(kind, **params)


def make_mass_profile(kind: str, **params: float) -> MassProfile:
    """Mass catalog, positive on all of R^2.

    "constant": M = m0.
    "rational-bump": M = m0 / (1 + (x^2+y^2)/a^2).
    "quadratic": M = m0 * (1 + lam*(x^2+y^2)); accepts lam or lambda.
    """
    m0 = float(params.pop("m0", 1.0))
    if not (np.isfinite(m0) and m0 > 0):
        raise FieldError(f"m0 must be positive, got {m0}")

    if kind == "constant":
        _check_no_extra(kind, params)
        return MassProfile(field=_const_field("constant", m0, {"m0": m0}), m0=m0)

    if kind == "rational-bump":
        a = float(params.pop("a", 1.0))
        _check_no_extra(kind, params)
        if not (np.isfinite(a) and a > 0):
            raise FieldError(f"rational-bump needs a > 0, got {a}")

        def ev(x, y):
            x = np.asarray(x, dtype=float)
            y = np.asarray(y, dtype=float)
            return m0 / (1.0 + (x**2 + y**2) / a**2)

        def gr(x, y):
            x = np.asarray(x, dtype=float)
            y = np.asarray(y, dtype=float)
            den = (1.0 + (x**2 + y**2) / a**2) ** 2
            return (-2.0 * m0 * x / a**2 / den, -2.0 * m0 * y / a**2 / den)

        fld = ScalarField(kind="rational-bump", params={"m0": m0, "a": a}, evaluate=ev, gradient=gr)
        return MassProfile(field=fld, m0=m0)

    if kind == "quadratic":
        lam = float(params.pop("lam", params.pop("lambda", 0.0)))
        _check_no_extra(kind, params)
        if not (np.isfinite(lam) and lam >= 0):
            raise FieldError(f"quadratic needs lambda >= 0, got {lam}")

        def ev(x, y):
            x = np.asarray(x, dtype=float)
            y = np.asarray(y, dtype=float)
            return m0 * (1.0 + lam * (x**2 + y**2))

        def gr(x, y):
            x = np.asarray(x, dtype=float)
            y = np.asarray(y, dtype=float)
            return (2.0 * m0 * lam * x, 2.0 * m0 * lam * y)

        fld = ScalarField(kind="quadratic", params={"m0": m0, "lambda": lam}, evaluate=ev, gradient=gr)
        return MassProfile(field=fld, m0=m0)

    raise FieldError(f"unknown mass profile kind {kind!r}")


def make_vector_potential(gauge: str, B: float) -> VectorPotential:
    """Uniform field B zhat in one of two gauges.

    "symmetric": A = (-B y/2, B x/2).  "landau-x": A = (-B y, 0).
    """
    B = float(B)
    if not np.isfinite(B):
        raise FieldError(f"B must be finite, got {B}")
    if gauge == "symmetric":
        ax = make_scalar_field("linear", cx=0.0, cy=-B / 2)
        ay = make_scalar_field("linear", cx=B / 2, cy=0.0)
        return VectorPotential(ax=ax, ay=ay)
    if gauge == "landau-x":
        ax = make_scalar_field("linear", cx=0.0, cy=-B)
        ay = make_scalar_field("zero")
        return VectorPotential(ax=ax, ay=ay)
    raise FieldError(f"unknown gauge {gauge!r}")


def gauge_transform(A: VectorPotential, chi: ScalarField) -> VectorPotential:
    """Return A + grad(chi). Needs chi's hessian for the new component gradients."""
    if chi.hessian is None:
        raise FieldError(f"gauge function {chi.kind!r} lacks an analytic hessian")

    def _component(base: ScalarField, idx: int) -> ScalarField:
        def ev(x, y, _b=base, _i=idx):
            return _b.evaluate(x, y) + chi.gradient(x, y)[_i]

        def gr(x, y, _b=base, _i=idx):
            gx, gy = _b.gradient(x, y)
            hxx, hxy, hyx, hyy = chi.hessian(x, y)
            row = (hxx, hxy) if _i == 0 else (hyx, hyy)
            return (gx + row[0], gy + row[1])

        return ScalarField(
            kind=f"{base.kind}+grad({chi.kind})",
            params={**base.params},
            evaluate=ev,
            gradient=gr,
        )

    return VectorPotential(ax=_component(A.ax, 0), ay=_component(A.ay, 1))
