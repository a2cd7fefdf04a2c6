"""Charged world-lines as projected algebroid geodesics.

A geodesic of ∇̂ is α̂ = bar(α') + λξ with λ constant and
∇_{α'}α' = 2λF(α'), i.e.

    dx/dτ = u,   du^k/dτ = -Γ^k_ij u^i u^j + 2λ F^k_j u^j,   dλ/dτ = 0.

Integration is classic fixed-step RK4 in the affine parameter τ.

Sign: the lowered force is 2λ<F(u), ·> = -λ (dA♭)_kj u^j, so λ plays the role
of -q/m relative to the textbook q F_kj u^j with F = dA♭.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebroid import nabla_from_values
from .em_extension import PotentialField, local_first_order
from .geometry import DEFAULT_STEP, ChartError, MetricField

log = logging.getLogger(__name__)


class IntegrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class WorldlineState:
    x: np.ndarray
    u: np.ndarray
    lam: float
    tau: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.x, self.u, [self.lam]])

    @classmethod
    def from_array(cls, y, tau) -> "WorldlineState":
        return cls(y[:4].copy(), y[4:8].copy(), float(y[8]), float(tau))


@dataclass
class Trajectory:
    tau: np.ndarray
    x: np.ndarray
    u: np.ndarray
    lam: float
    norm: np.ndarray
    exited: bool = False
    message: str = ""

    @property
    def norm_drift(self) -> np.ndarray:
        return self.norm - self.norm[0]

    @property
    def max_norm_drift(self) -> float:
        return float(np.max(np.abs(self.norm_drift)))

    def __len__(self):
        return self.tau.size

    def state(self, i) -> WorldlineState:
        return WorldlineState(self.x[i].copy(), self.u[i].copy(), self.lam, float(self.tau[i]))

    def to_text(self) -> str:
        lines = ["# tau\tx0\tx1\tx2\tx3\tu0\tu1\tu2\tu3\tnorm_drift"]
        drift = self.norm_drift
        for i in range(len(self)):
            row = [self.tau[i], *self.x[i], *self.u[i], drift[i]]
            lines.append("\t".join(f"{v:.15e}" for v in row))
        return "\n".join(lines) + "\n"

    def write(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_text())


def geodesic_rhs(gf: MetricField, pf: PotentialField, s: WorldlineState, h=DEFAULT_STEP):
    """(dx/dτ, du/dτ) for the charged geodesic equation."""
    loc = local_first_order(gf, pf, s.x, h)
    du = -np.einsum("kij,i,j->k", loc.Gamma, s.u, s.u) + 2.0 * s.lam * (loc.F.F11 @ s.u)
    return s.u.copy(), du


def rk4_step(rhs: Callable[[np.ndarray], np.ndarray], y, dt):
    k1 = rhs(y)
    k2 = rhs(y + 0.5 * dt * k1)
    k3 = rhs(y + 0.5 * dt * k2)
    k4 = rhs(y + dt * k3)
    return y + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def _run(rhs, norm_fn, y0, tau0, step, n_steps, lam):
    def guarded(y):
        # a non-finite stage would otherwise surface as a spurious chart exit
        if not np.all(np.isfinite(y)):
            raise IntegrationError(f"non-finite state after {len(ys) - 1} steps")
        return rhs(y)

    ys = [y0]
    exited, message = False, ""
    y = y0
    for _ in range(n_steps):
        try:
            y = rk4_step(guarded, y, step)
        except ChartError as exc:
            exited, message = True, str(exc)
            log.info("trajectory left the chart after %d steps: %s", len(ys) - 1, exc)
            break
        if not np.all(np.isfinite(y)):
            raise IntegrationError(f"non-finite state after {len(ys) - 1} steps")
        ys.append(y)
    Y = np.array(ys)
    tau = tau0 + step * np.arange(len(ys))
    norms = np.array([norm_fn(yy[:4], yy[4:8]) for yy in Y])
    return Trajectory(tau, Y[:, :4], Y[:, 4:8], lam, norms, exited, message)


def prepare_state(gf: MetricField, s0: WorldlineState, normalize=False, tol=1e-10) -> WorldlineState:
    """Check or enforce <u, u> = -1."""
    x = np.asarray(s0.x, dtype=float)
    u = np.asarray(s0.u, dtype=float)
    gf.box.require(x)
    n = u @ gf(x) @ u
    if n >= 0:
        raise ValueError(f"initial velocity is not timelike (<u,u> = {n:.3e}); "
                         "null geodesics are not supported")
    if abs(n + 1) > tol:
        if not normalize:
            raise ValueError(f"initial velocity has <u,u> = {n:.12g}, expected -1 "
                             "(pass normalize=True to rescale)")
        u = u / np.sqrt(-n)
    return WorldlineState(x, u, float(s0.lam), float(s0.tau))


def integrate(gf: MetricField, pf: PotentialField, s0: WorldlineState, step: float, n_steps: int,
              h=DEFAULT_STEP, normalize=False) -> Trajectory:
    """Fixed-step RK4 integration of the charged geodesic.

    Stops early (``exited=True``) if a stencil would leave the validity box.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    s0 = prepare_state(gf, s0, normalize)

    def rhs(y):
        dx, du = geodesic_rhs(gf, pf, WorldlineState(y[:4], y[4:8], y[8]), h)
        return np.concatenate([dx, du, [0.0]])

    return _run(rhs, lambda x, u: float(u @ gf(x) @ u), s0.as_array(), s0.tau, step,
                int(n_steps), s0.lam)


def integrate_geodesic(gf: MetricField, christoffel_fn: Callable[[np.ndarray], np.ndarray],
                       s0: WorldlineState, step: float, n_steps: int) -> Trajectory:
    """Uncharged geodesic with user-supplied Christoffel symbols (e.g. analytic ones)."""
    if step <= 0:
        raise ValueError("step must be positive")
    s0 = prepare_state(gf, s0)

    def rhs(y):
        gf.box.require(y[:4])
        du = -np.einsum("kij,i,j->k", christoffel_fn(y[:4]), y[4:8], y[4:8])
        return np.concatenate([y[4:8], du, [0.0]])

    return _run(rhs, lambda x, u: float(u @ gf(x) @ u), s0.as_array(), s0.tau, step,
                int(n_steps), 0.0)


def reverse(s: WorldlineState) -> WorldlineState:
    """Initial data that retraces ``s``'s past: u -> -u and λ -> -λ."""
    return WorldlineState(s.x.copy(), -s.u, -s.lam, s.tau)


def _time_derivative(values, step):
    n = len(values)
    if n >= 5:
        d = np.empty_like(values)
        d[2:-2] = (values[:-4] - 8 * values[1:-3] + 8 * values[3:-1] - values[4:]) / (12 * step)
        # 4th-order one-sided stencils at the ends
        c = np.array([-25, 48, -36, 16, -3]) / (12 * step)
        d[0] = c @ values[:5]
        d[1] = np.array([-3, -10, 18, -6, 1]) / (12 * step) @ values[:5]
        d[-1] = -c @ values[::-1][:5]
        d[-2] = -(np.array([-3, -10, 18, -6, 1]) / (12 * step)) @ values[::-1][:5]
        return d
    return np.gradient(values, step, axis=0, edge_order=2)


def lift_check(traj: Trajectory, gf: MetricField, pf: PotentialField, h=DEFAULT_STEP) -> float:
    """max over samples of |∇̂_{α̂} α̂| (plus |α' - ρ(α̂)|) along the lifted curve.

    The connection is the closed form evaluated with derivatives along the
    curve taken from the samples themselves.
    """
    if len(traj) < 3:
        raise ValueError("lift_check needs at least 3 samples")
    step = float(traj.tau[1] - traj.tau[0])
    dx = _time_derivative(traj.x, step)
    du = _time_derivative(traj.u, step)
    worst = 0.0
    for i in range(len(traj)):
        loc = local_first_order(gf, pf, traj.x[i], h)
        ahat = np.append(traj.u[i], traj.lam)
        cov = nabla_from_values(loc, ahat, ahat, np.append(du[i], 0.0))
        anchor_gap = np.max(np.abs(dx[i] - traj.u[i]))
        worst = max(worst, float(np.max(np.abs(cov))), float(anchor_gap))
    return worst
