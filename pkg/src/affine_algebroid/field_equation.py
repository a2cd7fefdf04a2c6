"""Unified 5x5 field equation Ĝ = R̂ic - ½R̂ĝ = 8πT̂ and its residuals.

Blocks follow the split T̂M = T̄M ⊕ R·ξ: bar-bar (Einstein), bar-ξ (Maxwell)
and ξ-ξ (the extra scalar equation).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebroid import XI, hat_fiber_metric, ricci_hat_from, scalar_hat_from
from .em_extension import EMPack, local_second_order
from .geometry import DEFAULT_STEP, CurvaturePack

EIGHT_PI = 8 * np.pi
UNIT_BANNER = "units: c = 1, G = 1, eps0 = 1/(16 pi)  =>  div F = 8 pi J, G_hat = 8 pi T_hat"


@dataclass(frozen=True)
class EinsteinBlocks:
    barbar: np.ndarray
    mixed: np.ndarray
    xixi: float
    g: np.ndarray

    def full(self) -> np.ndarray:
        G = np.zeros((5, 5))
        G[:4, :4] = self.barbar
        G[:4, XI] = G[XI, :4] = self.mixed
        G[XI, XI] = self.xixi
        return G


@dataclass(frozen=True)
class SourceBlocks:
    """Matter data: T^mass (lowered), current J (contravariant), H = η²/ρ."""

    Tmass: np.ndarray = field(default_factory=lambda: np.zeros((4, 4)))
    J: np.ndarray = field(default_factory=lambda: np.zeros(4))
    H: float = 0.0

    def __post_init__(self):
        T = np.asarray(self.Tmass, dtype=float)
        if T.shape != (4, 4) or not np.allclose(T, T.T):
            raise ValueError("Tmass must be a symmetric 4x4 matrix")
        J = np.asarray(self.J, dtype=float)
        if J.shape != (4,):
            raise ValueError("J must have 4 components")
        object.__setattr__(self, "Tmass", T)
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "H", float(self.H))

    @classmethod
    def from_densities(cls, Tmass, J, eta, rho):
        if rho <= 0:
            raise ValueError("mass density must be positive to form eta^2/rho")
        return cls(Tmass, J, eta * eta / rho)

    def full(self, g) -> np.ndarray:
        T = np.zeros((5, 5))
        T[:4, :4] = self.Tmass
        T[:4, XI] = T[XI, :4] = np.asarray(g) @ self.J
        T[XI, XI] = self.H
        return T


def einstein_blocks_from(pack: CurvaturePack, em: EMPack) -> EinsteinBlocks:
    """Blocks of the lowered Ĝ assembled from R̂ic and R̂ (not from the block formulas)."""
    ric = ricci_hat_from(pack, em)
    G5 = hat_fiber_metric(pack.g)
    Ghat = G5 @ ric.M - 0.5 * scalar_hat_from(pack, em) * G5
    return EinsteinBlocks(Ghat[:4, :4].copy(), Ghat[:4, XI].copy(), float(Ghat[XI, XI]), pack.g)


def einstein_blocks_formula(pack: CurvaturePack, em: EMPack) -> EinsteinBlocks:
    """{Ric + 2F∘F - ½(R + tr F∘F) g,  div F lowered,  -½(R + 3 tr F∘F)}."""
    R, tr = pack.scalar, em.trFF
    return EinsteinBlocks(pack.ricci2 + 2 * em.FF - 0.5 * (R + tr) * pack.g,
                          pack.g @ em.divF, -0.5 * (R + 3 * tr), pack.g)


def einstein_blocks(gf, pf, p, h=DEFAULT_STEP) -> EinsteinBlocks:
    return einstein_blocks_from(*local_second_order(gf, pf, p, h))


@dataclass(frozen=True)
class ResidualRecord:
    einstein: np.ndarray
    maxwell: np.ndarray
    scalar: float
    aggregate: np.ndarray

    @property
    def einstein_max(self) -> float:
        return float(np.max(np.abs(self.einstein)))

    @property
    def einstein_fro(self) -> float:
        return float(np.linalg.norm(self.einstein))

    @property
    def maxwell_max(self) -> float:
        return float(np.max(np.abs(self.maxwell)))

    @property
    def maxwell_l2(self) -> float:
        return float(np.linalg.norm(self.maxwell))

    @property
    def aggregate_max(self) -> float:
        return float(np.max(np.abs(self.aggregate)))

    @property
    def aggregate_fro(self) -> float:
        return float(np.linalg.norm(self.aggregate))

    def summary(self) -> dict:
        return {
            "einstein_max": self.einstein_max, "einstein_fro": self.einstein_fro,
            "maxwell_max": self.maxwell_max, "maxwell_l2": self.maxwell_l2,
            "scalar": self.scalar,
            "aggregate_max": self.aggregate_max, "aggregate_fro": self.aggregate_fro,
        }


def residuals(blocks: EinsteinBlocks, src: SourceBlocks) -> ResidualRecord:
    """Einstein: barbar - 8πT^mass; Maxwell: mixed - 8πJ♭; scalar: xixi - 8πH."""
    agg = blocks.full() - EIGHT_PI * src.full(blocks.g)
    return ResidualRecord(agg[:4, :4].copy(), agg[:4, XI].copy(), float(agg[XI, XI]), agg)


def fit_potential_scale(gf, potential_at_scale, points, src: SourceBlocks | None = None,
                        h=DEFAULT_STEP) -> tuple[float, float]:
    """Scale s >= 0 of A minimising the summed squared Einstein residual.

    The bar-bar block is E0 + s²K with E0 the s = 0 block, so the least-squares
    s² follows from evaluations at s = 0 and s = 1.  Returns (s, residual rms at s).
    """
    src = SourceBlocks() if src is None else src
    E0, K = [], []
    for p in points:
        e0 = residuals(einstein_blocks(gf, potential_at_scale(0.0), p, h), src).einstein
        e1 = residuals(einstein_blocks(gf, potential_at_scale(1.0), p, h), src).einstein
        E0.append(e0)
        K.append(e1 - e0)
    E0, K = np.array(E0), np.array(K)
    kk = float(np.sum(K * K))
    if kk == 0.0:
        raise ValueError("Einstein residual does not depend on the potential scale")
    s2 = max(0.0, -float(np.sum(E0 * K)) / kk)
    rms = float(np.sqrt(np.mean((E0 + s2 * K) ** 2)))
    return float(np.sqrt(s2)), rms
