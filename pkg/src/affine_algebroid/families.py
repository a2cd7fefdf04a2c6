"""Built-in metric and potential families, keyed by name.

Static spherically symmetric metrics use chart (t, r, θ, φ); flat and
polynomial families use Cartesian (t, x, y, z).  Families carry analytic
first derivatives / Christoffel symbols where cheap, for use as test oracles.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .em_extension import PotentialField
from .geometry import Box, MetricField

ETA = np.diag([-1.0, 1.0, 1.0, 1.0])


def minkowski(half_width=1e3) -> MetricField:
    box = Box(np.full(4, -half_width), np.full(4, half_width))
    return MetricField(lambda x: ETA.copy(), box, "minkowski", {},
                       dg=lambda x: np.zeros((4, 4, 4)),
                       christoffel_exact=lambda x: np.zeros((4, 4, 4)))


def _static_spherical(f, fp, name, params, r_min, r_max=1e3):
    def g(x):
        r, th = x[1], x[2]
        fr = f(r)
        s2 = math.sin(th) ** 2
        return np.diag([-fr, 1.0 / fr, r * r, r * r * s2])

    def dg(x):
        r, th = x[1], x[2]
        fr, fpr = f(r), fp(r)
        s, c = math.sin(th), math.cos(th)
        out = np.zeros((4, 4, 4))
        out[1] = np.diag([-fpr, -fpr / fr**2, 2 * r, 2 * r * s * s])
        out[2, 3, 3] = 2 * r * r * s * c
        return out

    def gamma(x):
        r, th = x[1], x[2]
        fr, fpr = f(r), fp(r)
        s, c = math.sin(th), math.cos(th)
        G = np.zeros((4, 4, 4))
        G[0, 0, 1] = G[0, 1, 0] = fpr / (2 * fr)
        G[1, 0, 0] = fr * fpr / 2
        G[1, 1, 1] = -fpr / (2 * fr)
        G[1, 2, 2] = -r * fr
        G[1, 3, 3] = -r * fr * s * s
        G[2, 1, 2] = G[2, 2, 1] = 1 / r
        G[2, 3, 3] = -s * c
        G[3, 1, 3] = G[3, 3, 1] = 1 / r
        G[3, 2, 3] = G[3, 3, 2] = c / s
        return G

    box = Box(np.array([-r_max, r_min, 1e-2, -r_max]),
              np.array([r_max, r_max, math.pi - 1e-2, r_max]))
    return MetricField(g, box, name, params, dg=dg, christoffel_exact=gamma)


def schwarzschild(M=1.0) -> MetricField:
    M = float(M)
    return _static_spherical(lambda r: 1 - 2 * M / r, lambda r: 2 * M / r**2,
                             "schwarzschild", {"M": M}, r_min=2 * M * (1 + 1e-3))


def reissner_nordstrom(M=1.0, Q=0.5) -> MetricField:
    M, Q = float(M), float(Q)
    if abs(Q) > M:
        raise ValueError("only sub-extremal |Q| <= M is supported")
    r_plus = M + math.sqrt(M * M - Q * Q)
    return _static_spherical(lambda r: 1 - 2 * M / r + Q * Q / r**2,
                             lambda r: 2 * M / r**2 - 2 * Q * Q / r**3,
                             "reissner_nordstrom", {"M": M, "Q": Q},
                             r_min=r_plus * (1 + 1e-3))


class Polynomial:
    """Tensor-valued polynomial Σ_m c_m x^m over monomials of total degree <= ``degree``."""

    def __init__(self, coeffs, exponents):
        self.coeffs = np.asarray(coeffs, dtype=float)
        self.exponents = np.asarray(exponents, dtype=int)

    @staticmethod
    def exponents_upto(degree, nvar=4):
        return [e for d in range(degree + 1)
                for e in itertools.product(range(d + 1), repeat=nvar) if sum(e) == d]

    def _monomials(self, x):
        return np.prod(np.asarray(x, dtype=float)[None, :] ** self.exponents, axis=1)

    def __call__(self, x):
        return np.tensordot(self._monomials(x), self.coeffs, axes=1)

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        out = []
        for k in range(x.size):
            e = self.exponents.copy()
            fac = e[:, k].astype(float)
            e[:, k] = np.maximum(e[:, k] - 1, 0)
            mono = fac * np.prod(x[None, :] ** e, axis=1)
            out.append(np.tensordot(mono, self.coeffs, axes=1))
        return np.stack(out)


def random_polynomial_metric(seed=0, amplitude=0.2, degree=3, half_width=1.0) -> MetricField:
    """Minkowski plus a seeded symmetric polynomial perturbation.

    Each entry of the perturbation is bounded by ``amplitude`` on the unit
    box, so ``amplitude < 0.25`` keeps the metric Lorentzian there.
    """
    rng = np.random.default_rng(int(seed))
    exps = Polynomial.exponents_upto(int(degree))
    c = rng.uniform(-1, 1, size=(len(exps), 4, 4))
    c = 0.5 * (c + np.swapaxes(c, 1, 2)) * float(amplitude) / len(exps)
    poly = Polynomial(c, exps)
    box = Box(np.full(4, -half_width), np.full(4, half_width))
    return MetricField(lambda x: ETA + poly(x), box, "random_polynomial",
                       {"seed": int(seed), "amplitude": float(amplitude), "degree": int(degree)},
                       dg=poly.gradient)


METRICS = {
    "minkowski": minkowski,
    "schwarzschild": schwarzschild,
    "reissner_nordstrom": reissner_nordstrom,
    "random_polynomial": random_polynomial_metric,
}


def zero_potential() -> PotentialField:
    return PotentialField(lambda x: np.zeros(4), name="zero")


def uniform_field(B=1.0) -> PotentialField:
    """A = B x ∂_y in flat Cartesian coordinates: magnetic field B along z (F_xy = B/2)."""
    B = float(B)
    return PotentialField(lambda x: np.array([0.0, 0.0, B * x[1], 0.0]), name="uniform",
                          params={"B": B})


def coulomb(q=1.0) -> PotentialField:
    """Cartesian flat-space Coulomb 1-form A♭ = (-q/r, 0, 0, 0)."""
    q = float(q)

    def A(x):
        return np.array([-q / math.sqrt(x[1] ** 2 + x[2] ** 2 + x[3] ** 2), 0.0, 0.0, 0.0])

    return PotentialField(A, lowered=True, name="coulomb", params={"q": q})


def coulomb_spherical(q=1.0, scale=2.0) -> PotentialField:
    """A♭ = (-scale*q/r, 0, 0, 0) in (t, r, θ, φ).

    ``scale = 2`` makes the half-strength tensor F equal the Gaussian-units
    Maxwell tensor of charge q, which is what Reissner-Nordström needs here.
    """
    q, scale = float(q), float(scale)
    return PotentialField(lambda x: np.array([-scale * q / x[1], 0.0, 0.0, 0.0]), lowered=True,
                          name="coulomb_spherical", params={"q": q, "scale": scale})


def plane_wave(amplitude=0.1, k=1.0) -> PotentialField:
    a, k = float(amplitude), float(k)
    return PotentialField(lambda x: np.array([0.0, a * math.cos(k * (x[3] - x[0])), 0.0, 0.0]),
                          lowered=True, name="plane_wave", params={"amplitude": a, "k": k})


def random_polynomial_potential(seed=1, amplitude=0.3, degree=3) -> PotentialField:
    rng = np.random.default_rng(int(seed))
    exps = Polynomial.exponents_upto(int(degree))
    poly = Polynomial(rng.uniform(-1, 1, size=(len(exps), 4)) * float(amplitude) * 4 / len(exps),
                      exps)
    return PotentialField(poly, name="random_polynomial",
                          params={"seed": int(seed), "amplitude": float(amplitude),
                                  "degree": int(degree)})


POTENTIALS = {
    "zero": zero_potential,
    "uniform": uniform_field,
    "coulomb": coulomb,
    "coulomb_spherical": coulomb_spherical,
    "plane_wave": plane_wave,
    "random_polynomial": random_polynomial_potential,
}


def make_metric(name, **params) -> MetricField:
    try:
        factory = METRICS[name]
    except KeyError:
        raise KeyError(f"unknown metric family {name!r}; known: {sorted(METRICS)}") from None
    return factory(**params)


def make_potential(name, **params) -> PotentialField:
    try:
        factory = POTENTIALS[name]
    except KeyError:
        raise KeyError(f"unknown potential family {name!r}; known: {sorted(POTENTIALS)}") from None
    return factory(**params)
