"""Identity suites: closed forms against their independent oracles at sample points.

Violations are relative: ``|closed - oracle| / max(1, scale)`` where ``scale``
is the magnitude of the compared quantities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import algebroid as al
from .em_extension import local_second_order
from .families import Polynomial
from .field_equation import einstein_blocks_formula, einstein_blocks_from
from .geometry import DEFAULT_STEP

SUITES = ("koszul", "curvature", "ricci", "scalar", "blocks", "symmetry")


def random_section(rng: np.random.Generator, center, degree=3, scale=1.0) -> al.AlgebroidSectionField:
    """Polynomial section of total degree <= ``degree`` in (x - center)."""
    exps = Polynomial.exponents_upto(degree)
    poly = Polynomial(rng.uniform(-scale, scale, size=(len(exps), 5)), exps)
    c = np.asarray(center, dtype=float)
    return al.AlgebroidSectionField.from_components(lambda x: poly(np.asarray(x) - c))


def section_pool(rng, center, n_random=6):
    pool = [al.AlgebroidSectionField.basis(a) for a in range(5)]
    pool += [random_section(rng, center) for _ in range(n_random)]
    return pool


def _rel(diff, scale):
    return float(np.max(np.abs(diff)) / max(1.0, scale))


def koszul_violation(gf, pf, p, n_triples=20, rng=None, h=DEFAULT_STEP) -> float:
    rng = np.random.default_rng(0) if rng is None else rng
    pool = section_pool(rng, p)
    worst = 0.0
    loc = None
    for _ in range(n_triples):
        U, V, W = (pool[i] for i in rng.integers(len(pool), size=3))
        k, scale = al.koszul_connection(gf, pf, U, V, W, p, h, return_scale=True)
        if loc is None:
            loc = al.local_first_order(gf, pf, p, h)
        c = al.closed_form_connection(gf, pf, U, V, p, h, loc).inner(W.at(p), loc.g)
        worst = max(worst, _rel(k - c, max(scale, abs(c))))
    return worst


def curvature_violation(gf, pf, p, h=DEFAULT_STEP) -> float:
    closed = al.curvature_hat_closed(gf, pf, p, h)
    oracle = al.curvature_hat_oracle_frame(gf, pf, p, h)
    return _rel(closed - oracle, np.max(np.abs(closed)))


def ricci_scalar_violation(gf, pf, p, h=DEFAULT_STEP) -> tuple[float, float]:
    """(frame trace of R̂ vs closed R̂ic,  double frame trace of R̂ vs R + tr(F∘F))."""
    pack, em = local_second_order(gf, pf, p, h)
    Rhat = al.curvature_hat_closed_from(pack, em)
    frame = al.orthonormal_hat_frame(pack.g)
    ric = al.ricci_hat_from(pack, em)
    traced = al.ricci_hat_frame_trace(Rhat, frame)
    s_frame = al.scalar_hat_frame_trace(al.RicciHat(traced, pack.g), frame)
    s_identity = pack.scalar + em.trFF
    return (_rel(traced - ric.M, np.max(np.abs(ric.M))),
            _rel(s_frame - s_identity, abs(s_identity)))


def block_violation(gf, pf, p, h=DEFAULT_STEP) -> tuple[float, float]:
    """(assembled Ĝ vs block formulas,  asymmetry of the lowered 5x5 Ĝ)."""
    pack, em = local_second_order(gf, pf, p, h)
    G = einstein_blocks_from(pack, em).full()
    B = einstein_blocks_formula(pack, em).full()
    # assembled directly, before symmetric block packing
    ric = al.ricci_hat_from(pack, em)
    G5 = al.hat_fiber_metric(pack.g)
    raw = G5 @ ric.M - 0.5 * al.scalar_hat_from(pack, em) * G5
    return _rel(G - B, np.max(np.abs(B))), _rel(raw - raw.T, np.max(np.abs(raw)))


@dataclass
class SuiteResult:
    name: str
    worst: float
    tolerance: float
    worst_index: int

    @property
    def passed(self) -> bool:
        return bool(self.worst < self.tolerance)


def run_suites(gf, pf, points, tolerances, n_triples=20, seed=0, h=DEFAULT_STEP):
    worst = {name: (0.0, -1) for name in SUITES}

    def note(name, value, i):
        if value > worst[name][0] or worst[name][1] < 0:
            worst[name] = (value, i)

    for i, p in enumerate(points):
        rng = np.random.default_rng([seed, i])
        note("koszul", koszul_violation(gf, pf, p, n_triples, rng, h), i)
        note("curvature", curvature_violation(gf, pf, p, h), i)
        r, s = ricci_scalar_violation(gf, pf, p, h)
        note("ricci", r, i)
        note("scalar", s, i)
        b, sym = block_violation(gf, pf, p, h)
        note("blocks", b, i)
        note("symmetry", sym, i)
    return [SuiteResult(n, worst[n][0], tolerances[n], worst[n][1]) for n in SUITES]
