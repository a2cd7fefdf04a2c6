"""Coordinate-chart tensor calculus on a Lorentzian 4-manifold.

Metric fields are black-box callables ``g(x) -> (4, 4)``; every derivative is
taken with central finite differences (4th order by default).  Curvature
conventions used throughout the package:

* ``Gamma[k, i, j] = Γ^k_{ij}``
* ``R(∂_i, ∂_j)∂_k = R^l_{kij} ∂_l`` with ``R(X,Y) = ∇_X∇_Y - ∇_Y∇_X - ∇_[X,Y]``,
  stored as ``riemann[l, k, i, j]``
* ``Ric(U, V) = Σ_a ε_a <R(U, e_a) e_a, V>`` which in coordinates is
  ``Ric_{kj} = R^l_{klj}``

Signature is (-, +, +, +).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

DIM = 4
DEFAULT_STEP = 1e-3

# offsets -2, -1, +1, +2
_OFFSETS = (-2, -1, 1, 2)
_D1 = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0
_D2 = np.array([-1.0, 16.0, 16.0, -1.0]) / 12.0
_D2_CENTER = -30.0 / 12.0


class ChartError(ValueError):
    """A point or finite-difference stencil left the chart's validity box."""


class SignatureError(ValueError):
    """The metric is not symmetric Lorentzian at an evaluated point."""


class FrameError(ValueError):
    """Gram-Schmidt hit a (near-)null pivot."""


@dataclass(frozen=True)
class Box:
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=float)
        hi = np.asarray(self.hi, dtype=float)
        if lo.shape != hi.shape or np.any(hi <= lo):
            raise ValueError(f"empty validity box lo={lo} hi={hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def unbounded(cls, dim: int = DIM) -> "Box":
        return cls(np.full(dim, -np.inf), np.full(dim, np.inf))

    def contains(self, x, margin=0.0) -> bool:
        x = np.asarray(x, dtype=float)
        margin = np.broadcast_to(np.abs(np.asarray(margin, dtype=float)), x.shape)
        return bool(np.all(np.isfinite(x)) and np.all(x - margin >= self.lo)
                    and np.all(x + margin <= self.hi))

    def require(self, x, margin=0.0) -> None:
        if not self.contains(x, margin):
            raise ChartError(f"point {np.asarray(x).tolist()} (margin {np.max(margin):g}) "
                             f"outside validity box [{self.lo.tolist()}, {self.hi.tolist()}]")


@dataclass(frozen=True)
class MetricField:
    """Lorentzian metric given by component functions on a chart.

    ``dg`` and ``christoffel_exact`` are optional analytic callables carried by
    the built-in families; the engine never uses them, tests use them as oracles.
    """

    g: Callable[[np.ndarray], np.ndarray]
    box: Box = field(default_factory=Box.unbounded)
    name: str = "custom"
    params: dict = field(default_factory=dict)
    dg: Optional[Callable[[np.ndarray], np.ndarray]] = None
    christoffel_exact: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.g(np.asarray(x, dtype=float)), dtype=float)


@dataclass(frozen=True)
class Jet:
    """Value and first/second partial derivatives of a field at a point.

    ``d1[k] = ∂_k f`` and ``d2[k, l] = ∂_k ∂_l f``; trailing axes are the
    field's own shape.
    """

    value: np.ndarray
    d1: np.ndarray
    d2: Optional[np.ndarray] = None


def _jet_once(fn, p, h, order):
    p = np.asarray(p, dtype=float)
    n = p.size
    f0 = np.asarray(fn(p), dtype=float)
    basis = np.eye(n) * h
    side = {}
    for k in range(n):
        side[k] = [np.asarray(fn(p + s * basis[k]), dtype=float) for s in _OFFSETS]
    d1 = np.stack([sum(c * v for c, v in zip(_D1, side[k])) / h for k in range(n)])
    if order < 2:
        return Jet(f0, d1)
    d2 = np.empty((n, n) + f0.shape)
    for k in range(n):
        d2[k, k] = (_D2_CENTER * f0 + sum(c * v for c, v in zip(_D2, side[k]))) / h**2
        for l in range(k + 1, n):
            acc = np.zeros_like(f0)
            for cs, s in zip(_D1, _OFFSETS):
                for ct, t in zip(_D1, _OFFSETS):
                    acc = acc + cs * ct * np.asarray(fn(p + s * basis[k] + t * basis[l]), dtype=float)
            d2[k, l] = d2[l, k] = acc / h**2
    return Jet(f0, d1, d2)


def jet(fn, p, h=DEFAULT_STEP, box: Optional[Box] = None, order=2, richardson=False) -> Jet:
    """Finite-difference jet of ``fn`` at ``p`` (4th-order central stencils).

    With ``richardson=True`` the h and h/2 results are combined to cancel the
    leading truncation term.
    """
    if box is not None:
        box.require(p, 2 * h)
    j = _jet_once(fn, p, h, order)
    if not richardson:
        return j
    j2 = _jet_once(fn, p, h / 2, order)
    d1 = (16 * j2.d1 - j.d1) / 15
    d2 = None if order < 2 else (16 * j2.d2 - j.d2) / 15
    return Jet(j.value, d1, d2)


def partial_derivative(fn, p, direction, order=1, h=DEFAULT_STEP, box: Optional[Box] = None,
                       richardson=False):
    """Central-difference derivative of ``fn`` at ``p``.

    ``direction`` is a coordinate index or a direction vector (directional
    derivative).  ``order`` is 1 or 2.
    """
    p = np.asarray(p, dtype=float)
    if isinstance(direction, (int, np.integer)):
        v = np.zeros_like(p)
        v[direction] = 1.0
    else:
        v = np.asarray(direction, dtype=float)
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    if box is not None:
        box.require(p, 2 * h * np.abs(v))

    def once(step):
        vals = [np.asarray(fn(p + s * step * v), dtype=float) for s in _OFFSETS]
        if order == 1:
            return sum(c * f for c, f in zip(_D1, vals)) / step
        f0 = np.asarray(fn(p), dtype=float)
        return (_D2_CENTER * f0 + sum(c * f for c, f in zip(_D2, vals))) / step**2

    if not richardson:
        return once(h)
    return (16 * once(h / 2) - once(h)) / 15


def check_lorentzian(g: np.ndarray, tol=1e-12) -> None:
    if not np.allclose(g, g.T, rtol=0, atol=tol * max(1.0, np.max(np.abs(g)))):
        raise SignatureError("metric not symmetric")
    ev = np.linalg.eigvalsh(g)
    if np.sum(ev < 0) != 1 or np.any(np.abs(ev) < tol):
        raise SignatureError(f"metric eigenvalues {ev} are not Lorentzian (-,+,+,+)")


def metric_at(gf: MetricField, p) -> np.ndarray:
    gf.box.require(p)
    g = gf(p)
    check_lorentzian(g)
    return g


def inverse_metric_at(gf: MetricField, p) -> np.ndarray:
    return np.linalg.inv(metric_at(gf, p))


def christoffel_from_derivs(ginv, dg):
    """Γ^k_{ij} from the inverse metric and ``dg[a, i, j] = ∂_a g_ij``."""
    low = 0.5 * (np.einsum("jmk->mjk", dg) + np.einsum("kmj->mjk", dg) - dg)
    return np.einsum("lm,mjk->ljk", ginv, low)


def christoffel(gf: MetricField, p, h=DEFAULT_STEP) -> np.ndarray:
    j = jet(gf, p, h, gf.box, order=1)
    return christoffel_from_derivs(np.linalg.inv(j.value), j.d1)


@dataclass(frozen=True)
class CurvaturePack:
    g: np.ndarray
    ginv: np.ndarray
    Gamma: np.ndarray
    riemann: np.ndarray
    ricci2: np.ndarray
    ricci11: np.ndarray
    scalar: float
    dg: np.ndarray
    dGamma: np.ndarray


def curvature_from_jet(mj: Jet) -> CurvaturePack:
    g, dg, d2g = mj.value, mj.d1, mj.d2
    ginv = np.linalg.inv(g)
    low = 0.5 * (np.einsum("jmk->mjk", dg) + np.einsum("kmj->mjk", dg) - dg)
    Gamma = np.einsum("lm,mjk->ljk", ginv, low)
    # ∂_i of the lowered symbols and of g^{-1}
    dlow = 0.5 * (np.einsum("ijmk->imjk", d2g) + np.einsum("ikmj->imjk", d2g) - d2g)
    dginv = -np.einsum("la,iab,bm->ilm", ginv, dg, ginv)
    dGamma = np.einsum("ilm,mjk->iljk", dginv, low) + np.einsum("lm,imjk->iljk", ginv, dlow)
    riemann = (np.einsum("iljk->lkij", dGamma) - np.einsum("jlik->lkij", dGamma)
               + np.einsum("lim,mjk->lkij", Gamma, Gamma)
               - np.einsum("ljm,mik->lkij", Gamma, Gamma))
    ricci2 = np.einsum("lklj->kj", riemann)
    ricci11 = ginv @ ricci2
    return CurvaturePack(g, ginv, Gamma, riemann, ricci2, ricci11, float(np.trace(ricci11)),
                         dg, dGamma)


def curvature(gf: MetricField, p, h=DEFAULT_STEP, richardson=False) -> CurvaturePack:
    return curvature_from_jet(jet(gf, p, h, gf.box, order=2, richardson=richardson))


def riemann(gf, p, h=DEFAULT_STEP):
    return curvature(gf, p, h).riemann


def ricci(gf, p, h=DEFAULT_STEP):
    return curvature(gf, p, h).ricci2


def scalar_curvature(gf, p, h=DEFAULT_STEP):
    return curvature(gf, p, h).scalar


@dataclass(frozen=True)
class OrthonormalFrame:
    """``e[a]`` is the a-th frame vector (contravariant components)."""

    e: np.ndarray
    eps: np.ndarray

    def check(self, g, tol=1e-10):
        gram = self.e @ g @ self.e.T
        return float(np.max(np.abs(gram - np.diag(self.eps))))


def gram_schmidt(g: np.ndarray, vectors=None, floor=1e-10) -> OrthonormalFrame:
    """Orthonormalize ``vectors`` (rows; default coordinate basis) under ``g``.

    The timelike vector is moved to the front.
    """
    g = np.asarray(g, dtype=float)
    n = g.shape[0]
    vecs = np.eye(n) if vectors is None else np.asarray(vectors, dtype=float)
    scale = np.max(np.abs(g))
    es, eps = [], []
    for v in vecs:
        w = v.copy()
        for e, s in zip(es, eps):
            w = w - s * (e @ g @ w) * e
        nrm = w @ g @ w
        if abs(nrm) < floor * scale * max(1.0, v @ v):
            raise FrameError(f"near-null pivot {nrm:.3e} while building frame")
        es.append(w / np.sqrt(abs(nrm)))
        eps.append(np.sign(nrm))
    e, eps = np.array(es), np.array(eps)
    if np.sum(eps < 0) != 1:
        raise FrameError(f"frame signs {eps} are not Lorentzian")
    order = np.argsort(eps, kind="stable")
    return OrthonormalFrame(e[order], eps[order])


def orthonormal_frame(gf: MetricField, p, floor=1e-10) -> OrthonormalFrame:
    return gram_schmidt(metric_at(gf, p), floor=floor)


def ricci_frame_trace(pack: CurvaturePack, frame: OrthonormalFrame) -> np.ndarray:
    """Ric_{uv} = Σ_a ε_a <R(∂_u, e_a) e_a, ∂_v> evaluated by an explicit frame sum."""
    # R(∂_u, e)e has components R^l_{k u j} e^j e^k
    ric11 = np.einsum("a,aj,ak,lkuj->lu", frame.eps, frame.e, frame.e, pack.riemann)
    return pack.g @ ric11


def lorentz_transform(frame: OrthonormalFrame, rapidity, axis, rotation) -> OrthonormalFrame:
    """Boost along spatial ``axis`` then rotate the spatial triad by ``rotation`` (3x3 orthogonal)."""
    L = np.eye(4)
    ch, sh = np.cosh(rapidity), np.sinh(rapidity)
    L[0, 0] = L[axis, axis] = ch
    L[0, axis] = L[axis, 0] = sh
    R = np.eye(4)
    R[1:, 1:] = rotation
    M = R @ L
    return OrthonormalFrame(M @ frame.e, frame.eps.copy())
