"""Electromagnetic sector built from the potential vector field A.

``F`` here is the half-strength tensor: the antisymmetric part of ∇A, with
``<F(X), Y> = ½(<∇_X A, Y> - <X, ∇_Y A>)``.  The physical Maxwell tensor is
``2F = dA♭``.  Index layout:

* ``F02[i, j] = <F(∂_i), ∂_j> = ½(∂_i A_j - ∂_j A_i)``
* ``F11[k, j]`` is the matrix of the operator, ``F(X)^k = F11[k, j] X^j``;
  hence ``F11 = g^{-1} @ F02.T``
* ``nablaF[k, i, j] = (∇_k F)^i_j``

Units: c = G = 1, ε₀ = 1/16π, so div F = 8πJ.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .geometry import (DEFAULT_STEP, CurvaturePack, Jet, MetricField, OrthonormalFrame,
                       christoffel_from_derivs, curvature_from_jet, jet)


@dataclass(frozen=True)
class PotentialField:
    """Potential A on the chart.

    By default ``A(x)`` returns contravariant components A^i.  Families that
    are naturally 1-forms (Coulomb, plane waves) set ``lowered=True`` and
    return A♭_i instead.
    """

    A: Callable[[np.ndarray], np.ndarray]
    lowered: bool = False
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def covector(self, gf: MetricField, x) -> np.ndarray:
        a = np.asarray(self.A(np.asarray(x, dtype=float)), dtype=float)
        return a if self.lowered else gf(x) @ a

    def vector(self, gf: MetricField, x) -> np.ndarray:
        a = np.asarray(self.A(np.asarray(x, dtype=float)), dtype=float)
        return np.linalg.solve(gf(x), a) if self.lowered else a


@dataclass(frozen=True)
class Faraday:
    F02: np.ndarray
    F11: np.ndarray

    @classmethod
    def from_lowered(cls, F02, ginv):
        F02 = np.asarray(F02, dtype=float)
        return cls(F02, ginv @ F02.T)


@dataclass(frozen=True)
class EMPack:
    F: Faraday
    dF11: np.ndarray
    nablaF: np.ndarray
    divF: np.ndarray
    trFF: float
    FF: np.ndarray


@dataclass(frozen=True)
class LocalFirstOrder:
    """Metric, Christoffel symbols and F at a point (first derivatives only)."""

    x: np.ndarray
    g: np.ndarray
    ginv: np.ndarray
    Gamma: np.ndarray
    F: Faraday


def _stacked(gf, pf):
    def fn(x):
        g = gf(x)
        a = np.asarray(pf.A(x), dtype=float)
        return np.concatenate([g.ravel(), a if pf.lowered else g @ a])
    return fn


def _split(j: Jet):
    def part(arr, lead):
        if arr is None:
            return None, None
        return (arr[..., :16].reshape(lead + (4, 4)), arr[..., 16:])
    gv, av = part(j.value, ())
    g1, a1 = part(j.d1, (4,))
    g2, a2 = part(j.d2, (4, 4))
    return Jet(gv, g1, g2), Jet(av, a1, a2)


def faraday_exterior(ginv, dA) -> Faraday:
    """F from ``dA[k, j] = ∂_k A♭_j`` (exterior-derivative route)."""
    return Faraday.from_lowered(0.5 * (dA - dA.T), ginv)


def local_first_order(gf: MetricField, pf: PotentialField, p, h=DEFAULT_STEP) -> LocalFirstOrder:
    p = np.asarray(p, dtype=float)
    mj, aj = _split(jet(_stacked(gf, pf), p, h, gf.box, order=1))
    ginv = np.linalg.inv(mj.value)
    return LocalFirstOrder(p, mj.value, ginv, christoffel_from_derivs(ginv, mj.d1),
                           faraday_exterior(ginv, aj.d1))


def faraday(gf: MetricField, pf: PotentialField, p, h=DEFAULT_STEP, route="exterior") -> Faraday:
    """Half-strength tensor F at ``p``.

    ``route="exterior"`` uses ½ dA♭; ``route="covariant"`` antisymmetrizes the
    covariant derivative of the contravariant A (Christoffels included).  The
    two are independent computations of the same tensor.
    """
    if route == "exterior":
        return local_first_order(gf, pf, p, h).F
    if route != "covariant":
        raise ValueError(f"unknown route {route!r}")
    mj = jet(gf, p, h, gf.box, order=1)
    ginv = np.linalg.inv(mj.value)
    Gamma = christoffel_from_derivs(ginv, mj.d1)
    vj = jet(lambda x: pf.vector(gf, x), p, h, gf.box, order=1)
    # cov[i, k] = ∇_i A^k
    cov = vj.d1 + np.einsum("kim,m->ik", Gamma, vj.value)
    low = cov @ mj.value
    return Faraday.from_lowered(0.5 * (low - low.T), ginv)


def trace_FF(F: Faraday) -> float:
    """tr(F∘F) = F^i_m F^m_i."""
    return float(np.trace(F.F11 @ F.F11))


def ff_lowered(F: Faraday) -> np.ndarray:
    """(F∘F)(X, Y) = <F(F(X)), Y> as a symmetric (0,2) matrix."""
    return F.F02.T @ F.F11


def em_from_jets(pack: CurvaturePack, aj: Jet) -> EMPack:
    ginv, Gamma = pack.ginv, pack.Gamma
    F = faraday_exterior(ginv, aj.d1)
    # dF02[k, i, j] = ∂_k F_ij
    dF02 = 0.5 * (aj.d2 - np.swapaxes(aj.d2, 1, 2))
    dginv = -np.einsum("la,kab,bm->klm", ginv, pack.dg, ginv)
    dF11 = (np.einsum("kia,ja->kij", dginv, F.F02)
            + np.einsum("ia,kja->kij", ginv, dF02))
    nablaF = (dF11 + np.einsum("ikm,mj->kij", Gamma, F.F11)
              - np.einsum("mkj,im->kij", Gamma, F.F11))
    divF = np.einsum("kj,kij->i", ginv, nablaF)
    return EMPack(F, dF11, nablaF, divF, trace_FF(F), ff_lowered(F))


def local_second_order(gf: MetricField, pf: PotentialField, p, h=DEFAULT_STEP,
                       richardson=False) -> tuple[CurvaturePack, EMPack]:
    """Curvature and electromagnetic data at ``p`` from one shared stencil."""
    mj, aj = _split(jet(_stacked(gf, pf), p, h, gf.box, order=2, richardson=richardson))
    pack = curvature_from_jet(mj)
    return pack, em_from_jets(pack, aj)


def nabla_F(gf, pf, p, h=DEFAULT_STEP) -> np.ndarray:
    return local_second_order(gf, pf, p, h)[1].nablaF


def div_F(gf, pf, p, h=DEFAULT_STEP, frame: OrthonormalFrame | None = None) -> np.ndarray:
    """div F = Σ_a ε_a (∇_{e_a} F)(e_a).

    Without ``frame`` the coordinate contraction g^{kj}(∇_k F)^i_j is used;
    with one, the explicit frame sum.
    """
    em = local_second_order(gf, pf, p, h)[1]
    if frame is None:
        return em.divF
    return div_F_frame(em.nablaF, frame)


def div_F_frame(nablaF, frame: OrthonormalFrame) -> np.ndarray:
    return np.einsum("a,ak,aj,kij->i", frame.eps, frame.e, frame.e, nablaF)


def stress_energy_em(g, F: Faraday) -> np.ndarray:
    """T^elec = -(1/4π)(F∘F - ¼ tr(F∘F) g), lowered indices."""
    return -(ff_lowered(F) - 0.25 * trace_FF(F) * np.asarray(g)) / (4 * np.pi)


def closedness_residual(gf: MetricField, pf: PotentialField, p, h=DEFAULT_STEP) -> float:
    """max |∂_i F_jk + ∂_j F_ki + ∂_k F_ij|, which vanishes because 2F = dA♭."""
    p = np.asarray(p, dtype=float)
    gf.box.require(p, 4 * h)
    d = jet(lambda x: faraday(gf, pf, x, h).F02, p, h, order=1).d1
    cyc = d + np.einsum("jki->ijk", d) + np.einsum("kij->ijk", d)
    return float(np.max(np.abs(cyc)))
