"""Affine inner products on a finite-dimensional real vector space.

A symmetric 2-affine form whose bilinear part B is nondegenerate is stored
canonically as ``(u, v) = lam + <u - z, v - z>_B``.  When ``lam != 0`` the
space of affine functionals V̂ = V̄ ⊕ R·ẑ carries the induced inner product
``diag(B, lam)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

DEGENERACY_FLOOR = 1e-10


class DegenerateFormError(ValueError):
    pass


class ContractViolation(ValueError):
    pass


def is_degenerate(B, floor=DEGENERACY_FLOOR) -> bool:
    B = np.asarray(B, dtype=float)
    scale = np.max(np.abs(B)) if B.size else 0.0
    if scale == 0.0:
        return True
    return abs(np.linalg.det(B)) < floor * scale ** B.shape[0]


@dataclass(frozen=True)
class AffineInnerProduct:
    B: np.ndarray
    z: np.ndarray
    lam: float

    def __post_init__(self):
        B = np.array(self.B, dtype=float)
        z = np.array(self.z, dtype=float).reshape(-1)
        if B.ndim != 2 or B.shape[0] != B.shape[1] or B.shape[0] != z.size or z.size == 0:
            raise ValueError(f"shape mismatch: B {B.shape}, z {z.shape}")
        if not np.array_equal(B, B.T):
            raise ContractViolation("bilinear part must be symmetric")
        if is_degenerate(B):
            raise DegenerateFormError("bilinear part is degenerate")
        B.setflags(write=False)
        z.setflags(write=False)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "lam", float(self.lam))

    @property
    def dim(self) -> int:
        return self.z.size

    def __call__(self, u, v) -> float:
        return float(self.lam + (np.asarray(u) - self.z) @ self.B @ (np.asarray(v) - self.z))

    def bilinear(self, u, v) -> float:
        """<u, v>."""
        return float(np.asarray(u) @ self.B @ np.asarray(v))

    def linear_affine(self, u, b) -> float:
        """<u, b): linear in u, affine in b."""
        return float(np.asarray(u) @ self.B @ (np.asarray(b) - self.z))

    def as_sample(self) -> "TwoAffineSample":
        return TwoAffineSample(self, self.dim)


@dataclass(frozen=True)
class TwoAffineSample:
    """Black-box 2-affine form ``eval(u, v) -> float`` on R^dim."""

    eval: Callable[[np.ndarray, np.ndarray], float]
    dim: int

    def __call__(self, u, v) -> float:
        return float(self.eval(np.asarray(u, dtype=float), np.asarray(v, dtype=float)))

    def check_symmetric(self, tol=1e-9, n_random=8, seed=0) -> float:
        rng = np.random.default_rng(seed)
        pairs = [(e, f) for e in np.eye(self.dim) for f in np.eye(self.dim)]
        pairs += [(rng.normal(size=self.dim), rng.normal(size=self.dim)) for _ in range(n_random)]
        worst = 0.0
        for u, v in pairs:
            a, b = self(u, v), self(v, u)
            worst = max(worst, abs(a - b) / max(1.0, abs(a), abs(b)))
        if worst > tol:
            raise ContractViolation(f"form is not symmetric (relative defect {worst:.3e})")
        return worst

    def check_two_affine(self, tol=1e-9, n_random=8, seed=0) -> float:
        """Affinity in the first slot: S(a+su+tw, b) - S(a, b) = s·L(u) + t·L(w)."""
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(n_random):
            a, b, u, w = rng.normal(size=(4, self.dim))
            s, t = rng.normal(size=2)
            base = self(a, b)
            lhs = self(a + s * u + t * w, b) - base
            rhs = s * (self(a + u, b) - base) + t * (self(a + w, b) - base)
            worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs), abs(base)))
        if worst > tol:
            raise ContractViolation(f"form is not 2-affine (relative defect {worst:.3e})")
        return worst


def extract_bilinear_part(S: TwoAffineSample, tol=1e-9) -> np.ndarray:
    """<u, v> = S(u, v) - S(u, 0) - S(0, v) + S(0, 0) on basis pairs."""
    S.check_symmetric(tol)
    n = S.dim
    E = np.eye(n)
    zero = np.zeros(n)
    s00 = S(zero, zero)
    s_e0 = np.array([S(E[i], zero) for i in range(n)])
    B = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            B[i, j] = B[j, i] = S(E[i], E[j]) - s_e0[i] - s_e0[j] + s00
    return B


def decompose(S: TwoAffineSample, tol=1e-9) -> AffineInnerProduct:
    """Recover (B, z, lam) with S(u, v) = lam + <u - z, v - z>.

    z solves <z, v> = -(0, v> and lam = (0, 0) - <z, z>.
    """
    B = extract_bilinear_part(S, tol)
    if is_degenerate(B):
        raise DegenerateFormError("bilinear part of the form is degenerate")
    n = S.dim
    zero = np.zeros(n)
    s00 = S(zero, zero)
    lin = np.array([S(zero, e) for e in np.eye(n)]) - s00
    z = np.linalg.solve(B, -lin)
    return AffineInnerProduct(B, z, s00 - z @ B @ z)


def from_coefficients(B, a, c) -> AffineInnerProduct:
    """Form S(u, v) = c + a·u + a·v + uᵀBv in canonical shape."""
    B = np.asarray(B, dtype=float)
    a = np.asarray(a, dtype=float)
    S = TwoAffineSample(lambda u, v: c + a @ u + a @ v + u @ B @ v, a.size)
    return decompose(S)


@dataclass(frozen=True)
class HatVector:
    """Element bar(x) + mu·ẑ of V̂."""

    bar: np.ndarray
    mu: float

    def __add__(self, other: "HatVector") -> "HatVector":
        return HatVector(np.asarray(self.bar) + np.asarray(other.bar), self.mu + other.mu)

    def as_array(self) -> np.ndarray:
        return np.append(np.asarray(self.bar, dtype=float), self.mu)


def hat_metric(P: AffineInnerProduct) -> np.ndarray:
    """Induced inner product on V̂ in the basis (ē_1, ..., ē_n, ẑ)."""
    if P.lam == 0.0:
        raise DegenerateFormError("lambda = 0: the hat space carries no induced inner product")
    n = P.dim
    G = np.zeros((n + 1, n + 1))
    G[:n, :n] = P.B
    G[n, n] = P.lam
    return G


def hat_embed(P: AffineInnerProduct, x) -> HatVector:
    """x̂ = bar(x - z) + ẑ."""
    return HatVector(np.asarray(x, dtype=float) - P.z, 1.0)


def bar_lift(y) -> HatVector:
    return HatVector(np.asarray(y, dtype=float), 0.0)


def hat_inner(P: AffineInnerProduct, u: HatVector, v: HatVector) -> float:
    return float(u.as_array() @ hat_metric(P) @ v.as_array())
