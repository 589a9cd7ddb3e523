"""Fixed points of the reduced systems: counting, location, and stability.

Roots of the reduced vector fields are located two ways and cross-checked:
through the transcendental diagnostics g and u, and through cubic
polynomials in x = r^2 whose real-root counts are certified with Sturm
sequences.  Linearized eigenvalues come from the radial derivative of the
nu-equation right-hand side evaluated on the nu = 0 axis.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .geometry import Curvature
from .homographic import (
    EULERIAN,
    LAGRANGIAN,
    DomainError,
    eulerian_rhs,
    lagrangian_rhs,
)

INTERIOR = "INTERIOR"
EQUATOR_BOUNDARY = "EQUATOR_BOUNDARY"

CENTER = "CENTER"
SADDLE = "SADDLE"
DEGENERATE = "DEGENERATE"
BOUNDARY_NONHYPERBOLIC = "BOUNDARY_NONHYPERBOLIC"

_FP_TOL = 1e-6
_DEGENERATE_TOL = 1e-9


class NotAFixedPoint(ValueError):
    """classify was handed a point where the vector field does not vanish."""


def _trim(coeffs, tol=0.0):
    c = list(coeffs)
    while len(c) > 1 and abs(c[-1]) <= tol:
        c.pop()
    return c


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial with ascending coefficients, trimmed."""

    coefficients: tuple

    def __init__(self, coefficients):
        object.__setattr__(self, "coefficients", tuple(_trim(coefficients)))

    @property
    def degree(self) -> int:
        if len(self.coefficients) == 1 and self.coefficients[0] == 0.0:
            return -1
        return len(self.coefficients) - 1

    def __call__(self, x: float) -> float:
        acc = 0.0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def derivative(self) -> "Polynomial":
        return Polynomial([i * c for i, c in enumerate(self.coefficients)][1:] or [0.0])


@dataclass
class FixedPointRecord:
    """A root of the reduced system with its linearized character."""

    r: float
    kind: str
    eigenvalues: tuple
    stability: str


def records_to_json(records) -> str:
    return json.dumps([
        {"r": rec.r, "kind": rec.kind, "stability": rec.stability,
         "eigenvalues": [[ev.real, ev.imag] for ev in rec.eigenvalues]}
        for rec in records
    ], indent=2)


def records_from_json(text: str):
    return [
        FixedPointRecord(d["r"], d["kind"],
                         tuple(complex(re, im) for re, im in d["eigenvalues"]),
                         d["stability"])
        for d in json.loads(text)
    ]


# ---------------------------------------------------------------------------
# transcendental diagnostics

def _check_r(r: float, curv: Curvature, open_top: bool) -> float:
    if r <= 0:
        raise DomainError(f"size must be positive, got r={r}")
    one = 1.0 - curv.kappa * r * r
    if curv.kappa > 0:
        if open_top and one <= 0:
            raise DomainError(f"r={r} is not inside the equator radius {curv.scale}")
        if not open_top and one < -1e-12:
            raise DomainError(f"r={r} lies beyond the equator radius {curv.scale}")
    return one


def g_value(r: float, curv: Curvature, c: float, m: float) -> float:
    """g(r) = c^2/r - 24m/(12 - 9 kappa r^2)^{3/2}; its zeros are the
    interior fixed-point radii of the equilateral system."""
    _check_r(r, curv, open_top=False)
    s = 12.0 - 9.0 * curv.kappa * r * r
    if s <= 0:
        raise DomainError(f"12 - 9 kappa r^2 = {s} <= 0 at r={r}")
    return c * c / r - 24.0 * m / s ** 1.5


def dg_dr(r: float, curv: Curvature, c: float, m: float) -> float:
    _check_r(r, curv, open_top=False)
    s = 12.0 - 9.0 * curv.kappa * r * r
    if s <= 0:
        raise DomainError(f"12 - 9 kappa r^2 = {s} <= 0 at r={r}")
    return -c * c / (r * r) - 648.0 * m * curv.kappa * r / s ** 2.5


def _d2g_dr2(r: float, curv: Curvature, c: float, m: float) -> float:
    s = 12.0 - 9.0 * curv.kappa * r * r
    return (2.0 * c * c / r**3
            - 648.0 * m * curv.kappa * (12.0 + 36.0 * curv.kappa * r * r) / s ** 3.5)


def _g2(r: float, nu: float, one: float, kappa: float) -> float:
    if nu == 0.0:
        return 0.0
    return -kappa * r * nu * nu / one


def _dg2_dr(r: float, nu: float, one: float, kappa: float) -> float:
    if nu == 0.0:
        return 0.0
    return -kappa * nu * nu * (1.0 + kappa * r * r) / (one * one)


def G_value(r: float, nu: float, curv: Curvature, c: float, m: float) -> float:
    """Right-hand side of the reduced equilateral nu-equation."""
    one = _check_r(r, curv, open_top=nu != 0.0)
    g1 = one / (r * r)
    return g1 * g_value(r, curv, c, m) + _g2(r, nu, one, curv.kappa)


def dG_dr(r: float, nu: float, curv: Curvature, c: float, m: float) -> float:
    one = _check_r(r, curv, open_top=nu != 0.0)
    g1 = one / (r * r)
    dg1 = -2.0 / r**3
    return (dg1 * g_value(r, curv, c, m) + g1 * dg_dr(r, curv, c, m)
            + _dg2_dr(r, nu, one, curv.kappa))


def u_value(r: float, curv: Curvature, c: float, m: float) -> float:
    """u(r) = c^2(1 - kappa r^2)/r - m(5 - 4 kappa r^2)/(4(1 - kappa r^2)^{1/2});
    its zeros are the fixed-point radii of the geodesic system."""
    one = _check_r(r, curv, open_top=True)
    return (c * c * one / r
            - m * (5.0 - 4.0 * curv.kappa * r * r) / (4.0 * math.sqrt(one)))


def du_dr(r: float, curv: Curvature, c: float, m: float) -> float:
    one = _check_r(r, curv, open_top=True)
    k = curv.kappa
    return (-c * c * (1.0 + k * r * r) / (r * r)
            - k * m * r * (4.0 * k * r * r - 3.0) / (4.0 * one ** 1.5))


def W_value(r: float, nu: float, curv: Curvature, c: float, m: float) -> float:
    """Right-hand side of the reduced geodesic nu-equation."""
    one = _check_r(r, curv, open_top=True)
    return u_value(r, curv, c, m) / (r * r) + _g2(r, nu, one, curv.kappa)


def dW_dr(r: float, nu: float, curv: Curvature, c: float, m: float) -> float:
    one = _check_r(r, curv, open_top=True)
    u = u_value(r, curv, c, m)
    return (du_dr(r, curv, c, m) / (r * r) - 2.0 * u / r**3
            + _dg2_dr(r, nu, one, curv.kappa))


# ---------------------------------------------------------------------------
# polynomial formulations in x = r^2

def lagrangian_polynomial(curv: Curvature, c: float, m: float) -> Polynomial:
    """Cubic in x = r^2 whose positive roots inside the domain are exactly
    the zeros of g.  All four coefficients carry the c^4 factor."""
    k = curv.kappa
    c4 = c**4
    return Polynomial([
        -1728.0 * c4,
        144.0 * (27.0 * c4 * k + 4.0 * m * m),
        -2916.0 * c4 * k * k,
        729.0 * c4 * k**3,
    ])


def eulerian_polynomial(curv: Curvature, c: float, m: float) -> Polynomial:
    """Cubic in x = r^2 whose positive roots inside the domain are exactly
    the zeros of u."""
    k = curv.kappa
    c4 = c**4
    return Polynomial([
        -16.0 * c4,
        48.0 * c4 * k + 25.0 * m * m,
        -8.0 * k * (6.0 * c4 * k + 5.0 * m * m),
        16.0 * k * k * (c4 * k + m * m),
    ])


def _sturm_chain(poly: Polynomial):
    chain = [np.asarray(poly.coefficients, dtype=float)]
    d = poly.derivative()
    if d.degree < 0:
        return chain
    chain.append(np.asarray(d.coefficients, dtype=float))
    while len(chain[-1]) > 1:
        scale = max(np.abs(chain[-2]).max(), np.abs(chain[-1]).max())
        _, rem = npoly.polydiv(chain[-2], chain[-1])
        rem = np.atleast_1d(-rem)
        keep = np.abs(rem) > 1e-13 * scale
        if not keep.any():
            break
        rem = rem[: np.nonzero(keep)[0][-1] + 1]
        chain.append(rem)
    return chain


def _sign_changes(chain, x: float) -> int:
    prev = 0
    changes = 0
    for coeffs in chain:
        acc = 0.0
        for c in coeffs[::-1]:
            acc = acc * x + c
        s = 0 if acc == 0.0 else (1 if acc > 0 else -1)
        if s != 0:
            if prev != 0 and s != prev:
                changes += 1
            prev = s
    return changes


def sturm_count(poly: Polynomial, a: float, b: float) -> int:
    """Number of distinct real roots of poly in the half-open interval (a, b]."""
    chain = _sturm_chain(poly)
    return _sign_changes(chain, a) - _sign_changes(chain, b)


def positive_roots(poly: Polynomial, upper: float):
    """All real roots in (0, upper), each to about 1e-10, sorted ascending.

    Sturm-sequence counts drive both the isolation and the final
    completeness certificate, so even-multiplicity roots (no sign change)
    are found too.
    """
    coeffs = list(poly.coefficients)
    if all(c == 0.0 for c in coeffs):
        raise ValueError("zero polynomial has no isolated roots")
    while coeffs[0] == 0.0 and len(coeffs) > 1:
        coeffs.pop(0)  # strip root at the origin; outside (0, upper)
    work = Polynomial(coeffs)
    if work.degree < 1:
        return []
    chain = _sturm_chain(work)
    total = _sign_changes(chain, 0.0) - _sign_changes(chain, upper)
    if total <= 0:
        return []

    roots = []

    def isolate(a, b, count):
        if count <= 0:
            return
        if b - a < 1e-13 * max(1.0, abs(b)):
            roots.extend([0.5 * (a + b)] * count)
            return
        if count == 1:
            roots.append(_refine(work, chain, a, b))
            return
        mid = 0.5 * (a + b)
        left = _sign_changes(chain, a) - _sign_changes(chain, mid)
        isolate(a, mid, left)
        isolate(mid, b, count - left)

    isolate(0.0, upper, total)
    roots.sort()
    return roots


def _refine(poly: Polynomial, chain, a: float, b: float) -> float:
    va = _sign_changes(chain, a)
    while b - a > 1e-14 * max(1.0, abs(b)):
        mid = 0.5 * (a + b)
        if va - _sign_changes(chain, mid) >= 1:
            b = mid
        else:
            a = mid
            va = _sign_changes(chain, a)
    x = 0.5 * (a + b)
    d = poly.derivative()
    for _ in range(4):
        fx, dx = poly(x), d(x)
        if dx == 0.0:
            break
        step = fx / dx
        if not math.isfinite(step) or not (a - (b - a) <= x - step <= b + (b - a)):
            break
        x -= step
    return x


def resultant(P: Polynomial, Q: Polynomial) -> float:
    """Sylvester-matrix determinant; zero exactly when P and Q share a root."""
    if P.degree < 0 or Q.degree < 0:
        raise ValueError("resultant requires nonzero polynomials")
    m, n = P.degree, Q.degree
    if m == 0:
        return P.coefficients[0] ** n
    if n == 0:
        return Q.coefficients[0] ** m
    size = m + n
    S = np.zeros((size, size))
    pd = list(reversed(P.coefficients))
    qd = list(reversed(Q.coefficients))
    for i in range(n):
        S[i, i:i + m + 1] = pd
    for i in range(m):
        S[n + i, i:i + n + 1] = qd
    return float(np.linalg.det(S))


def root_upper_bound(poly: Polynomial, curv: Curvature) -> float:
    """Search bound in x = r^2: the equator square for kappa > 0, otherwise
    the Cauchy bound of the polynomial."""
    if curv.kappa > 0:
        return (1.0 / curv.kappa) * (1.0 - 1e-12)
    lead = poly.coefficients[-1]
    return 1.0 + max(abs(c / lead) for c in poly.coefficients[:-1])


# ---------------------------------------------------------------------------
# fixed-point enumeration and classification

def classify(kind: str, r0: float, curv: Curvature, c: float, m: float) -> FixedPointRecord:
    """Linearized character of the fixed point at (r0, 0).

    Eigenvalues are the pair +-sqrt(s) where s is the radial derivative of
    the nu-equation right-hand side: imaginary pair means a center (flow
    symmetry about the r axis rules out spirals), a real pair of opposite
    signs a saddle.
    """
    if kind == LAGRANGIAN:
        if curv.kappa > 0 and abs(1.0 - curv.kappa * r0 * r0) <= 1e-9:
            return FixedPointRecord(curv.scale, EQUATOR_BOUNDARY,
                                    (0j, 0j), BOUNDARY_NONHYPERBOLIC)
        _, nudot = lagrangian_rhs(r0, 0.0, c, curv, m)
        deriv = dG_dr(r0, 0.0, curv, c, m)
    elif kind == EULERIAN:
        if curv.kappa > 0 and abs(1.0 - curv.kappa * r0 * r0) <= 1e-9:
            raise NotAFixedPoint(
                "the geodesic potential diverges on the equator"
            )
        _, nudot = eulerian_rhs(r0, 0.0, c, curv, m)
        deriv = dW_dr(r0, 0.0, curv, c, m)
    else:
        raise ValueError(f"unknown reduced kind {kind!r}")
    if abs(nudot) > _FP_TOL:
        raise NotAFixedPoint(
            f"nu_dot = {nudot} at (r, nu) = ({r0}, 0) exceeds tolerance {_FP_TOL}"
        )
    if abs(deriv) <= _DEGENERATE_TOL:
        return FixedPointRecord(r0, INTERIOR, (0j, 0j), DEGENERATE)
    lam = complex(0.0, math.sqrt(-deriv)) if deriv < 0 else complex(math.sqrt(deriv))
    return FixedPointRecord(r0, INTERIOR, (lam, -lam),
                            CENTER if deriv < 0 else SADDLE)


def lagrangian_fixed_points(curv: Curvature, c: float, m: float):
    """All fixed points of the reduced equilateral system, sorted by radius.

    For kappa > 0 the equator point is always present; an interior point
    accompanies it exactly when the equator-limit threshold is negative.
    For kappa < 0 there are zero, one, or two interior points.
    """
    if c == 0:
        raise ValueError("fixed-point analysis requires a nonzero angular constant")
    poly = lagrangian_polynomial(curv, c, m)
    upper = root_upper_bound(poly, curv)
    records = []
    for x in positive_roots(poly, upper):
        r = math.sqrt(x)
        if abs(g_value(r, curv, c, m)) > 1e-8 * max(1.0, c * c / r):
            continue  # squaring artifact; not an actual zero of g
        records.append(classify(LAGRANGIAN, r, curv, c, m))
    if curv.kappa > 0:
        records.append(FixedPointRecord(curv.scale, EQUATOR_BOUNDARY,
                                        (0j, 0j), BOUNDARY_NONHYPERBOLIC))
    records.sort(key=lambda rec: rec.r)
    return records


def eulerian_fixed_points(curv: Curvature, c: float, m: float):
    """All fixed points of the reduced geodesic system, sorted by radius.

    Exactly one for kappa > 0; for kappa < 0 one when kappa c^4 + m^2 > 0
    admits a positive root, none otherwise.
    """
    if c == 0:
        raise ValueError("fixed-point analysis requires a nonzero angular constant")
    poly = eulerian_polynomial(curv, c, m)
    upper = root_upper_bound(poly, curv)
    records = []
    for x in positive_roots(poly, upper):
        r = math.sqrt(x)
        if abs(u_value(r, curv, c, m)) > 1e-8 * max(1.0, c * c / r):
            continue
        records.append(classify(EULERIAN, r, curv, c, m))
    records.sort(key=lambda rec: rec.r)
    return records


# ---------------------------------------------------------------------------
# nullclines, slopes, and existence diagnostics

def nullcline_nu2(kind: str, r: float, curv: Curvature, c: float, m: float) -> float:
    """nu^2 along the nu_dot = 0 nullcline at radius r.

    A negative return value means the nullcline has no point over this
    radius.
    """
    if kind == LAGRANGIAN:
        one = _check_r(r, curv, open_top=False)
        return one * one * g_value(r, curv, c, m) / (curv.kappa * r**3)
    if kind == EULERIAN:
        one = _check_r(r, curv, open_top=True)
        return u_value(r, curv, c, m) * one / (curv.kappa * r**3)
    raise ValueError(f"unknown reduced kind {kind!r}")


def slope(kind: str, r: float, nu: float, curv: Curvature, c: float, m: float) -> float:
    """Phase-plane slope nu_dot / r_dot of the chosen reduced system."""
    if nu == 0.0:
        raise DomainError("slope is undefined on the nu = 0 axis")
    rhs = lagrangian_rhs if kind == LAGRANGIAN else eulerian_rhs
    if kind not in (LAGRANGIAN, EULERIAN):
        raise ValueError(f"unknown reduced kind {kind!r}")
    rdot, nudot = rhs(r, nu, c, curv, m)
    return nudot / rdot


def lagrangian_threshold(curv: Curvature, c: float, m: float) -> float:
    """kappa^{1/2} c^2 - (8/sqrt(3)) m; negative exactly when an interior
    equilateral fixed point exists alongside the equator point."""
    if curv.kappa <= 0:
        raise DomainError("the equator-limit threshold needs kappa > 0")
    return math.sqrt(curv.kappa) * c * c - (8.0 / math.sqrt(3.0)) * m


def eulerian_existence(curv: Curvature, c: float, m: float) -> int:
    """Sign of kappa c^4 + m^2; positive exactly when the kappa < 0 geodesic
    system has a fixed point."""
    if curv.kappa >= 0:
        raise DomainError("the existence diagnostic applies to kappa < 0")
    val = curv.kappa * c**4 + m * m
    return (val > 0) - (val < 0)