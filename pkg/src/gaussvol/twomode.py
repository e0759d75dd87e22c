"""Two-mode states in standard form and their explicit Fisher-Rao geometry.

Every two-mode covariance matrix can be brought by local symplectics to the
standard form

    V(a, b, c, d) = [[a, 0, c, 0],
                     [0, a, 0, d],
                     [c, 0, b, 0],
                     [0, d, 0, b]],

so the four parameters (a, b, c, d) chart the classes of interest.  This
module provides the embedding, the explicit metric components, the inequality
description of the classical/quantum/separable/entangled domains, and the
standard two-mode invariants used by the PPT test.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from .errors import DomainError, InvalidArgumentError, NumericError
from .metric import MetricAtPoint, ParamChart
from .states import DEFAULT_TOL, require_covariance

__all__ = [
    "CanonicalPoint",
    "DomainTag",
    "DomainBounds",
    "SimonInvariants",
    "canonical_embed",
    "canonical_extract",
    "canonical_chart",
    "canonical_det",
    "canonical_trace_adjugate",
    "metric_components",
    "closed_form_metric",
    "domain_bounds",
    "domain_mask",
    "in_domain",
    "simon_invariants",
]

_SINGULAR_ATOL = 1e-14


class CanonicalPoint(NamedTuple):
    """Standard-form parameters (a, b, c, d)."""

    a: float
    b: float
    c: float
    d: float


class DomainTag(Enum):
    CLASSICAL = "classical"
    QUANTUM = "quantum"
    SEPARABLE = "separable"
    ENTANGLED = "entangled"


def canonical_embed(p: CanonicalPoint) -> np.ndarray:
    """4x4 covariance matrix of the standard-form point."""
    a, b, c, d = (float(x) for x in p)
    return np.array(
        [
            [a, 0.0, c, 0.0],
            [0.0, a, 0.0, d],
            [c, 0.0, b, 0.0],
            [0.0, d, 0.0, b],
        ]
    )


def canonical_extract(V, atol: float = 1e-12) -> CanonicalPoint:
    """Inverse of :func:`canonical_embed`; rejects matrices off the standard form."""
    A = require_covariance(V)
    if A.shape[0] != 4:
        raise InvalidArgumentError("standard form is defined for two modes (4x4)")
    p = CanonicalPoint(a=float(A[0, 0]), b=float(A[2, 2]), c=float(A[0, 2]), d=float(A[1, 3]))
    if np.abs(A - canonical_embed(p)).max() > atol * max(1.0, float(np.abs(A).max())):
        raise InvalidArgumentError("matrix is not in two-mode standard form")
    return p


@functools.cache
def canonical_chart() -> ParamChart:
    """Four-parameter chart (a, b, c, d) of the standard form.

    The basis directions are dV/da, dV/db, dV/dc, dV/dd; together with the
    determinant exponent m = 4 this is the chart all volume integrals use.
    """
    Ba = np.diag([1.0, 1.0, 0.0, 0.0])
    Bb = np.diag([0.0, 0.0, 1.0, 1.0])
    Bc = np.zeros((4, 4))
    Bc[0, 2] = Bc[2, 0] = 1.0
    Bd = np.zeros((4, 4))
    Bd[1, 3] = Bd[3, 1] = 1.0
    return ParamChart(dim_modes=2, basis=(Ba, Bb, Bc, Bd), names=("a", "b", "c", "d"))


def canonical_det(a, b, c, d):
    """det V = (ab - c^2)(ab - d^2), elementwise."""
    ab = np.asarray(a, dtype=float) * np.asarray(b, dtype=float)
    return (ab - np.square(np.asarray(c, dtype=float))) * (ab - np.square(np.asarray(d, dtype=float)))


def canonical_trace_adjugate(a, b, c, d):
    """tr[adj V] = 2a^2 b + a(2b^2 - c^2 - d^2) - b(c^2 + d^2), elementwise."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    s = np.square(np.asarray(c, dtype=float)) + np.square(np.asarray(d, dtype=float))
    return 2.0 * a * a * b + a * (2.0 * b * b - s) - b * s


def metric_components(a, b, c, d) -> np.ndarray:
    """Metric of the (a, b, c, d) chart as a stacked (..., 4, 4) array.

    Broadcasts over array inputs; no domain checks are performed, so entries
    are meaningful only where ab != c^2 and ab != d^2.
    """
    a, b, c, d = np.broadcast_arrays(
        np.asarray(a, dtype=float),
        np.asarray(b, dtype=float),
        np.asarray(c, dtype=float),
        np.asarray(d, dtype=float),
    )
    ab = a * b
    c2 = c * c
    d2 = d * d
    pc = ab - c2
    pd_ = ab - d2
    pc2 = pc * pc
    pd2 = pd_ * pd_
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        den = 2.0 * pc2 * pd2
        # pc^2 + pd^2 equals the expanded 2a^2b^2 + c^4 + d^4 - 2ab(c^2 + d^2)
        # but does not cancel catastrophically near the singular surfaces
        common = pc2 + pd2
        g = np.empty(a.shape + (4, 4))
        g[..., 0, 0] = b * b * common / den
        g[..., 1, 1] = a * a * common / den
        g[..., 0, 1] = (ab * common - pc * pd_ * (pc + pd_)) / den
        g[..., 0, 2] = -b * c / pc2
        g[..., 1, 2] = -a * c / pc2
        g[..., 0, 3] = -b * d / pd2
        g[..., 1, 3] = -a * d / pd2
        g[..., 2, 2] = (ab + c2) / pc2
        g[..., 3, 3] = (ab + d2) / pd2
        g[..., 2, 3] = 0.0
    g[..., 1, 0] = g[..., 0, 1]
    g[..., 2, 0] = g[..., 0, 2]
    g[..., 2, 1] = g[..., 1, 2]
    g[..., 3, 0] = g[..., 0, 3]
    g[..., 3, 1] = g[..., 1, 3]
    g[..., 3, 2] = g[..., 2, 3]
    return g


def closed_form_metric(p: CanonicalPoint) -> MetricAtPoint:
    """Explicit metric at a standard-form point, with its determinant."""
    a, b, c, d = (float(x) for x in p)
    ab = a * b
    if abs(ab - c * c) < _SINGULAR_ATOL or abs(ab - d * d) < _SINGULAR_ATOL:
        raise DomainError("metric is singular where ab = c^2 or ab = d^2")
    g = metric_components(a, b, c, d)
    sign, logdet = np.linalg.slogdet(g)
    det_g = float(sign * math.exp(logdet)) if np.isfinite(logdet) else float(sign * np.inf)
    return MetricAtPoint(g=g, det_g=det_g, chart=canonical_chart(), point=np.array([a, b, c, d]))


@dataclass(frozen=True)
class DomainBounds:
    """Branch bounds of the quantum and separable domains at fixed (a, b, c).

    An empty d-interval is encoded as d1 > d2.
    """

    c1: float
    c2: float
    c3: float
    d1: float
    d2: float
    delta: float

    @property
    def d_range_empty(self) -> bool:
        return self.d1 > self.d2


def domain_bounds(p: CanonicalPoint) -> DomainBounds:
    """Bound quantities c1, c2, c3, Delta and the d-interval [d1, d2] at (a, b, c)."""
    a, b, c = float(p.a), float(p.b), float(p.c)
    if not (a > 0.0 and b > 0.0):
        raise InvalidArgumentError("domain bounds need a > 0 and b > 0")
    ab = a * b
    c1 = (a / b) * (b * b - 1.0)
    c2 = (b / a) * (a * a - 1.0)
    c3 = (1.0 - a * a - b * b + a * a * b * b) / ab
    denom = ab - c * c
    delta = c * c - denom * (ab * c * c - (a * a - 1.0) * (b * b - 1.0))
    if delta < 0.0 or denom == 0.0:
        d1, d2 = math.inf, -math.inf
    else:
        root = math.sqrt(delta)
        d1 = (-c - root) / denom
        d2 = (-c + root) / denom
        if d1 > d2:
            d1, d2 = math.inf, -math.inf
    return DomainBounds(c1=c1, c2=c2, c3=c3, d1=d1, d2=d2, delta=delta)


def _d_interval(a, b, c):
    """Vectorized d-interval of the quantum domain; empty encoded as (inf, -inf)."""
    ab = a * b
    denom = ab - c * c
    delta = c * c - denom * (ab * c * c - (a * a - 1.0) * (b * b - 1.0))
    ok = (delta >= 0.0) & (denom > 0.0)
    root = np.sqrt(np.where(ok, delta, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        d1 = np.where(ok, (-c - root) / denom, np.inf)
        d2 = np.where(ok, (-c + root) / denom, -np.inf)
    return d1, d2


def domain_mask(a, b, c, d, tag: DomainTag, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Inequality-based membership of standard-form points, elementwise.

    ``tol`` slackens every inequality outward, so boundaries count as inside;
    a negative ``tol`` shrinks the domains instead, which is how boundary
    bands are detected.
    """
    a, b, c, d = np.broadcast_arrays(
        np.asarray(a, dtype=float),
        np.asarray(b, dtype=float),
        np.asarray(c, dtype=float),
        np.asarray(d, dtype=float),
    )
    if tag is DomainTag.CLASSICAL:
        pos = (a > -tol) & (b > -tol)
        sab = np.sqrt(np.maximum(a * b, 0.0))
        return pos & (np.abs(c) < sab + tol) & (np.abs(d) < sab + tol)
    if tag is DomainTag.QUANTUM:
        return _quantum_mask(a, b, c, d, tol)
    if tag is DomainTag.SEPARABLE:
        return _quantum_mask(a, b, c, d, tol) & _ppt_mask(a, b, c, d, tol)
    if tag is DomainTag.ENTANGLED:
        return _quantum_mask(a, b, c, d, tol) & ~_ppt_mask(a, b, c, d, tol)
    raise InvalidArgumentError(f"unknown domain tag: {tag!r}")


def _quantum_mask(a, b, c, d, tol):
    base = (a > 1.0 - tol) & (b > 1.0 - tol)
    # branch by mode ordering; at a = b the two c-bounds coincide
    c1 = (a / np.where(b != 0.0, b, np.nan)) * (b * b - 1.0)
    c2 = (b / np.where(a != 0.0, a, np.nan)) * (a * a - 1.0)
    cbound_sq = np.where(b <= a, c1, c2)
    with np.errstate(invalid="ignore"):
        cbound = np.sqrt(np.maximum(cbound_sq, 0.0))
        cok = np.abs(c) < cbound + tol
    d1, d2 = _d_interval(a, b, c)
    dok = (d >= d1 - tol) & (d <= d2 + tol)
    return base & cok & dok


def _ppt_mask(a, b, c, d, tol):
    """Separability half of the standard-form inequalities (given quantum)."""
    base = (a > 1.0 - tol) & (b > 1.0 - tol)
    ab = a * b
    with np.errstate(divide="ignore", invalid="ignore"):
        c3 = (1.0 - a * a - b * b + ab * ab) / ab
        cbound = np.sqrt(np.maximum(c3, 0.0))
    cok = np.abs(c) < cbound + tol
    d1, d2 = _d_interval(a, b, c)
    # c <= 0 branch: d in [d1, -d1]; c > 0 branch: d in [-d2, d2].
    # At c = 0 the two intervals coincide, which covers that slice by closure.
    lo = np.where(c <= 0.0, d1, -d2)
    hi = np.where(c <= 0.0, -d1, d2)
    dok = (d >= lo - tol) & (d <= hi + tol)
    return base & cok & dok


def in_domain(p: CanonicalPoint, tag: DomainTag, tol: float = DEFAULT_TOL) -> bool:
    """Scalar wrapper around :func:`domain_mask`."""
    return bool(domain_mask(p.a, p.b, p.c, p.d, tag, tol))


class SimonInvariants(NamedTuple):
    delta_tilde: float
    det_v: float
    nu_minus: float
    nu_plus: float


def simon_invariants(p: CanonicalPoint) -> SimonInvariants:
    """Two-mode invariants and symplectic eigenvalues from the standard form.

    delta = a^2 + b^2 + 2cd and det V determine the symplectic eigenvalues via
    nu_(-/+)^2 = (delta -/+ sqrt(delta^2 - 4 det V)) / 2 ... with the minus
    branch giving the smaller eigenvalue.
    """
    a, b, c, d = (float(x) for x in p)
    V = canonical_embed(p)
    w = np.linalg.eigvalsh(V)
    if w[0] <= 0.0:
        raise DomainError("invariants are defined for positive definite matrices")
    delta_tilde = a * a + b * b + 2.0 * c * d
    det_v = float(canonical_det(a, b, c, d))
    disc = delta_tilde * delta_tilde - 4.0 * det_v
    if disc < -1e-12:
        raise NumericError(f"negative discriminant {disc} for a positive definite matrix")
    disc = max(disc, 0.0)
    root = math.sqrt(disc)
    nu_minus = math.sqrt(max((delta_tilde - root) / 2.0, 0.0))
    nu_plus = math.sqrt(max((delta_tilde + root) / 2.0, 0.0))
    return SimonInvariants(delta_tilde=delta_tilde, det_v=det_v, nu_minus=nu_minus, nu_plus=nu_plus)
