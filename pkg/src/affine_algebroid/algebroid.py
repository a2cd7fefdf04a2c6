"""The algebroid T̂M = T̄M ⊕ R·ξ attached to the affine metric (X,Y) = 1 + <X-A, Y-A>.

Sections are X̄ + fξ; fiber components are stored as 5-vectors
``(X^0, X^1, X^2, X^3, f)``.  The basis used for array-valued results is
``E_a = ē_a`` (a < 4, coordinate bar-lifts) and ``E_4 = ξ``; the fiber metric
in that basis is ``diag(g, 1)``.

Curvature arrays are laid out as ``Rhat[a, b, c, :] = R̂(E_a, E_b) E_c``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .em_extension import EMPack, LocalFirstOrder, PotentialField, faraday, local_first_order, \
    local_second_order
from .geometry import DEFAULT_STEP, CurvaturePack, MetricField, OrthonormalFrame, gram_schmidt, \
    jet, partial_derivative

XI = 4


@dataclass(frozen=True)
class AlgebroidFiberValue:
    barpart: np.ndarray
    xipart: float

    @classmethod
    def from_array(cls, v) -> "AlgebroidFiberValue":
        v = np.asarray(v, dtype=float)
        return cls(v[:4].copy(), float(v[4]))

    def as_array(self) -> np.ndarray:
        return np.append(np.asarray(self.barpart, dtype=float), self.xipart)

    def inner(self, other: "AlgebroidFiberValue", g) -> float:
        return float(self.barpart @ g @ other.barpart + self.xipart * other.xipart)


class AlgebroidSectionField:
    """Section X̄ + fξ given by component callables."""

    def __init__(self, X: Callable, f: Callable, components: Optional[Callable] = None):
        self.X = X
        self.f = f
        self._components = components

    @classmethod
    def from_components(cls, fn: Callable) -> "AlgebroidSectionField":
        return cls(lambda x: np.asarray(fn(x))[:4], lambda x: float(np.asarray(fn(x))[4]), fn)

    @classmethod
    def constant(cls, v) -> "AlgebroidSectionField":
        v = np.asarray(v, dtype=float)
        return cls.from_components(lambda x: v)

    @classmethod
    def basis(cls, a: int) -> "AlgebroidSectionField":
        return cls.constant(np.eye(5)[a])

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self._components is not None:
            return np.asarray(self._components(x), dtype=float)
        return np.append(np.asarray(self.X(x), dtype=float), float(self.f(x)))

    def at(self, x) -> AlgebroidFiberValue:
        return AlgebroidFiberValue.from_array(self(x))


def hat_fiber_metric(g) -> np.ndarray:
    G = np.zeros((5, 5))
    G[:4, :4] = g
    G[4, 4] = 1.0
    return G


def anchor(s: AlgebroidFiberValue) -> np.ndarray:
    """ρ(X̄ + fξ) = X."""
    return np.asarray(s.barpart, dtype=float).copy()


def _bracket_from_jets(F02, uj, vj) -> np.ndarray:
    X, Y = uj.value[:4], vj.value[:4]
    dX, df = uj.d1[:, :4], uj.d1[:, 4]
    dY, dk = vj.d1[:, :4], vj.d1[:, 4]
    bar = X @ dY - Y @ dX
    xi = 2.0 * X @ F02 @ Y + X @ dk - Y @ df
    return np.append(bar, xi)


def bracket(gf: MetricField, pf: PotentialField, U: AlgebroidSectionField,
            V: AlgebroidSectionField, p, h=DEFAULT_STEP) -> AlgebroidFiberValue:
    """[X̄+fξ, Ȳ+kξ] = bar([X,Y]) + (2<F(X),Y> + X(k) - Y(f))ξ."""
    F = faraday(gf, pf, p, h)
    uj = jet(U, p, h, gf.box, order=1)
    vj = jet(V, p, h, gf.box, order=1)
    return AlgebroidFiberValue.from_array(_bracket_from_jets(F.F02, uj, vj))


def bracket_field(gf, pf, U, V, h=DEFAULT_STEP) -> AlgebroidSectionField:
    return AlgebroidSectionField.from_components(
        lambda x: bracket(gf, pf, U, V, x, h).as_array())


def koszul_connection(gf: MetricField, pf: PotentialField, U: AlgebroidSectionField,
                      V: AlgebroidSectionField, W: AlgebroidSectionField, p,
                      h=DEFAULT_STEP, return_scale=False):
    """<∇̂_U V, W> from the six-term Koszul formula alone.

    Only directional derivatives of scalar fields <·,·> and brackets enter; no
    Christoffel symbols.  With ``return_scale`` the largest term magnitude is
    also returned, for relative comparisons.
    """
    p = np.asarray(p, dtype=float)
    g = gf(p)
    G = hat_fiber_metric(g)
    F = faraday(gf, pf, p, h)
    uj, vj, wj = (jet(S, p, h, gf.box, order=1) for S in (U, V, W))
    u, v, w = uj.value, vj.value, wj.value

    def rho_inner(Z, A, B):
        direction = Z[:4]
        if not np.any(direction):
            return 0.0
        return float(partial_derivative(lambda x: A(x) @ hat_fiber_metric(gf(x)) @ B(x),
                                        p, direction, 1, h, gf.box))

    terms = np.array([
        rho_inner(u, V, W),
        rho_inner(v, W, U),
        -rho_inner(w, U, V),
        _bracket_from_jets(F.F02, uj, vj) @ G @ w,
        -_bracket_from_jets(F.F02, vj, wj) @ G @ u,
        _bracket_from_jets(F.F02, wj, uj) @ G @ v,
    ])
    val = 0.5 * float(np.sum(terms))
    if return_scale:
        return val, float(np.max(np.abs(terms)))
    return val


def nabla_from_values(loc: LocalFirstOrder, u, v, dv_along) -> np.ndarray:
    """∇̂_U V from its value at a point; ``dv_along`` = ρ(U) applied to V's components.

    ∇̂_{X̄+fξ}(Ȳ+kξ) = bar(∇_X Y - k F(X) - f F(Y)) + (<F(X),Y> + X(k))ξ
    """
    X, f = u[:4], u[4]
    Y, k = v[:4], v[4]
    F11, F02 = loc.F.F11, loc.F.F02
    bar = dv_along[:4] + np.einsum("kij,i,j->k", loc.Gamma, X, Y) - k * (F11 @ X) - f * (F11 @ Y)
    xi = X @ F02 @ Y + dv_along[4]
    return np.append(bar, xi)


def closed_form_connection(gf: MetricField, pf: PotentialField, U: AlgebroidSectionField,
                           V: AlgebroidSectionField, p, h=DEFAULT_STEP,
                           loc: Optional[LocalFirstOrder] = None) -> AlgebroidFiberValue:
    """∇̂_U V via ∇̂_ξξ = 0, ∇̂_X̄ξ = ∇̂_ξX̄ = -bar(F(X)), ∇̂_X̄Ȳ = bar(∇_X Y) + <F(X),Y>ξ."""
    p = np.asarray(p, dtype=float)
    loc = loc if loc is not None else local_first_order(gf, pf, p, h)
    u = U(p)
    vj = jet(V, p, h, gf.box, order=1)
    return AlgebroidFiberValue.from_array(nabla_from_values(loc, u, vj.value, u[:4] @ vj.d1))


def connection_field(gf, pf, U, V, h=DEFAULT_STEP) -> AlgebroidSectionField:
    return AlgebroidSectionField.from_components(
        lambda x: closed_form_connection(gf, pf, U, V, x, h).as_array())


def connection_coefficients(loc: LocalFirstOrder) -> np.ndarray:
    """C[a, b, :] = ∇̂_{E_a} E_b for the constant basis sections."""
    E = np.eye(5)
    zero = np.zeros(5)
    return np.array([[nabla_from_values(loc, E[a], E[b], zero) for b in range(5)] for a in range(5)])


def curvature_hat_closed_from(pack: CurvaturePack, em: EMPack) -> np.ndarray:
    """R̂ on basis triples assembled from the closed-form curvature expressions."""
    g = pack.g
    F02, F11, nF = em.F.F02, em.F.F11, em.nablaF
    R = np.zeros((5, 5, 5, 5))
    # ∇F(i, j)^m = (∇_i F)(e_j)^m
    nFij = np.einsum("imj->ijm", nF)
    # R̂(ē_i, ē_j) ē_k
    bar = (np.einsum("lkij->ijkl", pack.riemann)
           + np.einsum("ik,lj->ijkl", F02, F11)
           - np.einsum("jk,li->ijkl", F02, F11)
           + 2 * np.einsum("ij,lk->ijkl", F02, F11))
    R[:4, :4, :4, :4] = bar
    antisym = nFij - np.swapaxes(nFij, 0, 1)
    R[:4, :4, :4, XI] = np.einsum("km,ijm->ijk", g, antisym)
    # R̂(ē_i, ē_j) ξ
    R[:4, :4, XI, :4] = -antisym
    # R̂(ē_i, ξ) ξ = -bar(F(F(e_i)))
    R[:4, XI, XI, :4] = -(F11 @ F11).T
    # R̂(ē_i, ξ) ē_k = -bar((∇_i F)(e_k)) - <F(e_i), F(e_k)> ξ
    R[:4, XI, :4, :4] = -nFij
    R[:4, XI, :4, XI] = -(F11.T @ g @ F11)
    R[XI, :4] = -R[:4, XI]
    return R


def curvature_hat_closed(gf: MetricField, pf: PotentialField, p, h=DEFAULT_STEP) -> np.ndarray:
    pack, em = local_second_order(gf, pf, p, h)
    return curvature_hat_closed_from(pack, em)


def curvature_apply(Rhat, u, v, w) -> np.ndarray:
    """R̂(U, V)W for fiber 5-vectors at the same point (tensorial)."""
    return np.einsum("abcd,a,b,c->d", Rhat, u, v, w)


def curvature_hat_oracle(gf: MetricField, pf: PotentialField, U: AlgebroidSectionField,
                         V: AlgebroidSectionField, W: AlgebroidSectionField, p,
                         h=DEFAULT_STEP) -> AlgebroidFiberValue:
    """Brute force R̂(U,V)W = ∇̂_U∇̂_V W - ∇̂_V∇̂_U W - ∇̂_[U,V] W.

    The inner connections are section fields evaluated on the outer stencil,
    so this needs a 4h margin inside the validity box.
    """
    p = np.asarray(p, dtype=float)
    gf.box.require(p, 4 * h)
    loc = local_first_order(gf, pf, p, h)
    vw = connection_field(gf, pf, V, W, h)
    uw = connection_field(gf, pf, U, W, h)
    uv = bracket_field(gf, pf, U, V, h)
    out = (closed_form_connection(gf, pf, U, vw, p, h, loc).as_array()
           - closed_form_connection(gf, pf, V, uw, p, h, loc).as_array()
           - closed_form_connection(gf, pf, uv, W, p, h, loc).as_array())
    return AlgebroidFiberValue.from_array(out)


def curvature_hat_oracle_frame(gf: MetricField, pf: PotentialField, p,
                               h=DEFAULT_STEP) -> np.ndarray:
    """Brute-force R̂ on all basis triples.

    Expands the composition of connections over the basis with the Leibniz
    rule: ∇̂_{E_a}(C_bc^d E_d) = ρ(E_a)(C_bc^d) E_d + C_bc^d C_ad.
    """
    p = np.asarray(p, dtype=float)
    gf.box.require(p, 4 * h)
    cj = jet(lambda x: connection_coefficients(local_first_order(gf, pf, x, h)), p, h, order=1)
    C = cj.value
    D = np.zeros((5, 5, 5, 5))
    D[:4] = cj.d1
    K = np.zeros((5, 5, 5))
    # [ē_i, ē_j] = 2<F(e_i), e_j> ξ for coordinate lifts; all other basis brackets vanish
    K[:4, :4, XI] = 2 * local_first_order(gf, pf, p, h).F.F02
    return (D - np.swapaxes(D, 0, 1)
            + np.einsum("bcd,ade->abce", C, C)
            - np.einsum("acd,bde->abce", C, C)
            - np.einsum("abd,dce->abce", K, C))


@dataclass(frozen=True)
class HatFrame:
    e: np.ndarray
    eps: np.ndarray


def hat_frame(frame: OrthonormalFrame) -> HatFrame:
    """(bar-lifted orthonormal 4-frame, ξ) with ε_ξ = +1."""
    e = np.zeros((5, 5))
    e[:4, :4] = frame.e
    e[4, 4] = 1.0
    return HatFrame(e, np.append(frame.eps, 1.0))


@dataclass(frozen=True)
class RicciHat:
    """1-1 Ricci operator; column b is R̂ic(E_b)."""

    M: np.ndarray
    g: np.ndarray

    def lowered(self) -> np.ndarray:
        return hat_fiber_metric(self.g) @ self.M

    def of_xi(self) -> np.ndarray:
        return self.M[:, XI]


def ricci_hat_from(pack: CurvaturePack, em: EMPack) -> RicciHat:
    """R̂ic(ξ) = bar(div F) - tr(F∘F)ξ;  R̂ic(X̄) = bar(Ric X + 2F(F(X))) + <div F, X>ξ."""
    M = np.zeros((5, 5))
    M[:4, :4] = pack.ricci11 + 2 * em.F.F11 @ em.F.F11
    M[XI, :4] = pack.g @ em.divF
    M[:4, XI] = em.divF
    M[XI, XI] = -em.trFF
    return RicciHat(M, pack.g)


def ricci_hat(gf: MetricField, pf: PotentialField, p, h=DEFAULT_STEP) -> RicciHat:
    return ricci_hat_from(*local_second_order(gf, pf, p, h))


def ricci_hat_frame_trace(Rhat, frame: HatFrame) -> np.ndarray:
    """R̂ic(V) = Σ_a ε_a R̂(V, e_a) e_a, as a 1-1 matrix (column = image of E_b)."""
    return np.einsum("a,ac,ad,bcde->eb", frame.eps, frame.e, frame.e, Rhat)


def scalar_hat_from(pack: CurvaturePack, em: EMPack) -> float:
    """R̂ = R + tr(F∘F)."""
    return pack.scalar + em.trFF


def scalar_hat(gf: MetricField, pf: PotentialField, p, h=DEFAULT_STEP) -> float:
    return scalar_hat_from(*local_second_order(gf, pf, p, h))


def scalar_hat_frame_trace(ric: RicciHat, frame: HatFrame) -> float:
    """Σ_a ε_a <R̂ic(e_a), e_a> over the orthonormal 5-frame."""
    G = hat_fiber_metric(ric.g)
    return float(np.einsum("a,ab,cb,cd,ad->", frame.eps, frame.e, ric.M, G, frame.e))


def orthonormal_hat_frame(g) -> HatFrame:
    return hat_frame(gram_schmidt(g))
