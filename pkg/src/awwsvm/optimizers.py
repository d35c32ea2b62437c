"""Stochastic update rules over minibatch subgradients: plain SGD, online
BFGS, and online Nesterov-accelerated quasi-Newton.

Both quasi-Newton methods take a normalized direction -H*grad, step with a
decaying rate, re-evaluate the gradient at the new point on the same
minibatch, and feed the damped difference pair into the inverse rank-two
update. The damping term lambda*s added to the gradient difference keeps the
curvature product positive on most steps; a relative curvature floor guards
the remaining ones, skipping the matrix update but keeping the step.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
import math

import numpy as np

from .objective import ObjectiveConfig, subgradient

# Skip the inverse-Hessian update when y.s <= floor * ||s|| * ||y||.
CURVATURE_FLOOR = 1e-10


class ScheduleKind(Enum):
    CONSTANT = "constant"
    TAU_DECAY = "tau"
    SQRT_DECAY = "sqrt"


@dataclass(frozen=True)
class StepSchedule:
    """Step size at step k >= 1: alpha0, (tau/(tau+k))*alpha0, or alpha0/sqrt(k)."""

    kind: ScheduleKind
    alpha0: float = 1.0
    tau: float = 10.0

    def __post_init__(self) -> None:
        if self.alpha0 < 0 or self.tau <= 0:
            raise ValueError("alpha0 must be nonnegative and tau positive")

    def rate(self, k: int) -> float:
        if k < 1:
            raise ValueError(f"step counter must be >= 1, got {k}")
        if self.kind is ScheduleKind.CONSTANT:
            return self.alpha0
        if self.kind is ScheduleKind.TAU_DECAY:
            return self.tau / (self.tau + k) * self.alpha0
        return self.alpha0 / math.sqrt(k)


@dataclass
class QuasiNewtonState:
    """Mutable per-run state: inverse-Hessian approximation H, velocity v,
    step counter k, damping lambda, and momentum mu."""

    H: np.ndarray
    v: np.ndarray
    k: int = 1
    damping: float = 0.2
    mu: float = 0.1

    @classmethod
    def initial(cls, dim: int, eps_h: float = 1.0, damping: float = 0.2, mu: float = 0.1) -> "QuasiNewtonState":
        if eps_h <= 0:
            raise ValueError("eps_h must be positive")
        if damping < 0:
            raise ValueError("damping must be nonnegative")
        if not 0.0 <= mu < 1.0:
            raise ValueError(f"mu must lie in [0,1), got {mu}")
        return cls(H=eps_h * np.eye(dim), v=np.zeros(dim), k=1, damping=damping, mu=mu)


def bfgs_inverse_update(H: np.ndarray, s: np.ndarray, y: np.ndarray) -> np.ndarray:
    """(I - s y^T/y.s) H (I - y s^T/y.s) + s s^T/y.s, expanded symmetrically.

    Preserves symmetry exactly and positive definiteness whenever y.s > 0;
    the caller must not pass a pair below the curvature floor.
    """
    ys = float(y @ s)
    if ys <= CURVATURE_FLOOR * np.linalg.norm(s) * np.linalg.norm(y):
        raise ValueError(f"curvature y.s={ys} too small for a stable update")
    rho = 1.0 / ys
    u = H @ y
    cross = np.outer(s, u) + np.outer(u, s)
    return H - rho * cross + (rho * rho * float(y @ u) + rho) * np.outer(s, s)


def _curvature_ok(s: np.ndarray, y: np.ndarray) -> bool:
    return float(y @ s) > CURVATURE_FLOOR * np.linalg.norm(s) * np.linalg.norm(y)


def sgd_step(w: np.ndarray, X, y: np.ndarray, alpha: np.ndarray,
             cfg: ObjectiveConfig, schedule: StepSchedule, k: int) -> np.ndarray:
    """w - rate(k) * grad on the minibatch."""
    return w - schedule.rate(k) * subgradient(w, X, y, alpha, cfg)


def obfgs_step(w: np.ndarray, state: QuasiNewtonState, X, y: np.ndarray, alpha: np.ndarray,
               cfg: ObjectiveConfig, schedule: StepSchedule) -> np.ndarray:
    """One online-BFGS step; mutates ``state`` (H, v, k) and returns the new w.

    A zero search direction skips the step (counter still advances); a
    curvature pair below the floor skips only the H update.
    """
    g1 = subgradient(w, X, y, alpha, cfg)
    direction = -(state.H @ g1)
    nrm = float(np.linalg.norm(direction))
    if nrm == 0.0:
        state.k += 1
        return w
    direction /= nrm
    v_new = schedule.rate(state.k) * direction
    w_new = w + v_new
    g2 = subgradient(w_new, X, y, alpha, cfg)
    s = w_new - w
    yvec = g2 - g1 + state.damping * s
    if _curvature_ok(s, yvec):
        state.H = bfgs_inverse_update(state.H, s, yvec)
    state.v = v_new
    state.k += 1
    return w_new


def onaq_step(w: np.ndarray, state: QuasiNewtonState, X, y: np.ndarray, alpha: np.ndarray,
              cfg: ObjectiveConfig, schedule: StepSchedule) -> np.ndarray:
    """One online Nesterov-accelerated quasi-Newton step; mutates ``state``.

    The first gradient is taken at the lookahead point w + mu*v; the curvature
    pair is formed between the new iterate and the lookahead point.
    """
    if not 0.0 <= state.mu < 1.0:
        raise ValueError(f"mu must lie in [0,1), got {state.mu}")
    look = w + state.mu * state.v
    g1 = subgradient(look, X, y, alpha, cfg)
    direction = -(state.H @ g1)
    nrm = float(np.linalg.norm(direction))
    if nrm == 0.0:
        state.k += 1
        return w
    direction /= nrm
    v_new = state.mu * state.v + schedule.rate(state.k) * direction
    w_new = w + v_new
    g2 = subgradient(w_new, X, y, alpha, cfg)
    p = w_new - look
    q = g2 - g1 + state.damping * p
    if _curvature_ok(p, q):
        state.H = bfgs_inverse_update(state.H, p, q)
    state.v = v_new
    state.k += 1
    return w_new
