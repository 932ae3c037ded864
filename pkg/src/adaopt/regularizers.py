"""Regularizer algebra and the schedules that emit per-round regularizers.

The adaptive FTRL update at round t minimizes

    <g_{1:t}, x> + p_{1:t}(x) + q_{0:t}(x)

over the feasible set, while the mirror-descent update minimizes

    <g_t, x> + q_t(x) + B_{r_{1:t}}(x, x_t),      r_t = p_t + q_{t-1}.

Everything the schedules emit is built from five closed-under-addition
pieces: quadratics (any center, any metric), linear terms, an l1 term, set
indicatrices, and sums of those.  Proximal terms p_t must attain their
minimum over the feasible set at the current iterate x_t; emission helpers
construct them that way and the solver re-checks cheaply.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (INF, QuadMetric, as_point, dot, dir_derivative,
                   quad_norm_sq)


class ProximalConditionError(ValueError):
    """p_t failed the requirement p_t(x_t) = min over the feasible set."""


class Regularizer:
    """Extended-real-valued convex building block.

    Subclasses implement ``value`` and ``dir_deriv``; ``bregman`` defaults to
    the divergence formula and is overridden where a closed form is cheaper.
    """

    def value(self, x) -> float:
        raise NotImplementedError

    def dir_deriv(self, x, z) -> float:
        raise NotImplementedError

    def grad(self, x) -> np.ndarray:
        """A local sub-gradient (the gradient where one exists)."""
        raise NotImplementedError(f"{type(self).__name__} has no gradient handle")

    def bregman(self, y, x) -> float:
        from . import core
        return core.bregman(self, y, x)

    def __add__(self, other: "Regularizer") -> "Regularizer":
        return Sum([self, other])

    def is_zero(self) -> bool:
        return False


class Zero(Regularizer):
    """The zero function.  Dimension-free."""

    def value(self, x):
        return 0.0

    def dir_deriv(self, x, z):
        return 0.0

    def grad(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def bregman(self, y, x):
        return 0.0

    def is_zero(self):
        return True

    def __repr__(self):
        return "Zero()"


class Quadratic(Regularizer):
    """(scale / 2) * ||x - center||_M^2.

    ``scale`` may be negative: the algebra allows decreasing regularization,
    but bound calculators treat any negative-scale quadratic as uncertified.
    """

    def __init__(self, center, metric: QuadMetric, scale: float = 1.0):
        self.center = as_point(center)
        self.metric = metric
        self.scale = float(scale)

    def value(self, x):
        d = np.asarray(x, dtype=float) - self.center
        return 0.5 * self.scale * quad_norm_sq(self.metric, d)

    def grad(self, x):
        d = np.asarray(x, dtype=float) - self.center
        return self.scale * self.metric.matvec(d)

    def dir_deriv(self, x, z):
        return dot(self.grad(x), z)

    def bregman(self, y, x):
        d = np.asarray(y, dtype=float) - np.asarray(x, dtype=float)
        return 0.5 * self.scale * quad_norm_sq(self.metric, d)

    def certified(self) -> bool:
        return self.scale >= 0.0

    def __repr__(self):
        return f"Quadratic(center={self.center!r}, metric={self.metric!r}, scale={self.scale})"


class Linear(Regularizer):
    """<v, x> + w."""

    def __init__(self, v, w: float = 0.0):
        self.v = as_point(v)
        self.w = float(w)

    def value(self, x):
        return dot(self.v, x) + self.w

    def grad(self, x):
        return self.v.copy()

    def dir_deriv(self, x, z):
        return dot(self.v, z)

    def bregman(self, y, x):
        return 0.0

    def __repr__(self):
        return f"Linear(v={self.v!r}, w={self.w})"


class L1(Regularizer):
    """alpha * ||x||_1 with alpha >= 0."""

    def __init__(self, alpha: float):
        alpha = float(alpha)
        if alpha < 0:
            raise ValueError(f"l1 coefficient must be >= 0, got {alpha}")
        self.alpha = alpha

    def value(self, x):
        return self.alpha * float(np.sum(np.abs(x)))

    def grad(self, x):
        # sign(x) with 0 at zero coordinates is a valid local sub-gradient
        return self.alpha * np.sign(np.asarray(x, dtype=float))

    def dir_deriv(self, x, z):
        x = np.asarray(x, dtype=float)
        z = np.asarray(z, dtype=float)
        at_zero = x == 0.0
        val = float(np.sum(np.sign(x[~at_zero]) * z[~at_zero]))
        val += float(np.sum(np.abs(z[at_zero])))
        return self.alpha * val

    def is_zero(self):
        return self.alpha == 0.0

    def __repr__(self):
        return f"L1({self.alpha})"


class Indicatrix(Regularizer):
    """0 on the feasible set, +inf outside it."""

    def __init__(self, feasible_set):
        self.set = feasible_set

    def value(self, x):
        return 0.0 if self.set.contains(x) else INF

    def dir_deriv(self, x, z):
        if not self.set.contains(x):
            raise ValueError("directional derivative of an indicatrix off its set")
        return 0.0 if self.set.direction_feasible(x, z) else INF

    def bregman(self, y, x):
        if not self.set.contains(x):
            raise ValueError("B(y, x) of an indicatrix needs x in the set")
        return 0.0 if self.set.contains(y) else INF

    def __repr__(self):
        return f"Indicatrix({self.set!r})"


class Sum(Regularizer):
    """Sum of parts, flattened, with +inf absorbing."""

    def __init__(self, parts):
        flat = []
        for p in parts:
            if isinstance(p, Sum):
                flat.extend(p.parts)
            elif not p.is_zero():
                flat.append(p)
        self.parts = flat

    def value(self, x):
        total = 0.0
        for p in self.parts:
            v = p.value(x)
            if v == INF:
                return INF
            total += v
        return total

    def grad(self, x):
        x = as_point(x)
        g = np.zeros_like(x)
        for p in self.parts:
            g = g + p.grad(x)
        return g

    def dir_deriv(self, x, z):
        total = 0.0
        for p in self.parts:
            d = p.dir_deriv(x, z)
            if d == INF:
                return INF
            if d == -INF:
                return -INF
            total += d
        return total

    def bregman(self, y, x):
        total = 0.0
        for p in self.parts:
            b = p.bregman(y, x)
            if b == INF:
                return INF
            total += b
        return total

    def is_zero(self):
        return not self.parts

    def __repr__(self):
        return f"Sum({self.parts!r})"


class Difference(Regularizer):
    """r - q with the convention (+inf) - (+inf) = +inf.

    This is exactly the convention under which p_t := r_t - q_{t-1} is
    recovered from a mirror-descent round.  Values of -inf are rejected: a
    schedule whose q outgrows r off the domain of r is a configuration error.
    """

    def __init__(self, r: Regularizer, q: Regularizer):
        self.r = r
        self.q = q

    def value(self, x):
        rv = self.r.value(x)
        qv = self.q.value(x)
        if rv == INF:
            return INF
        if qv == INF:
            raise ValueError("difference regularizer hit finite - inf = -inf")
        return rv - qv

    def grad(self, x):
        return self.r.grad(x) - self.q.grad(x)

    def dir_deriv(self, x, z):
        rd = self.r.dir_deriv(x, z)
        qd = self.q.dir_deriv(x, z)
        if rd == INF:
            return INF
        if qd == INF:
            return -INF
        if qd == -INF:
            return INF
        return rd - qd

    def __repr__(self):
        return f"Difference({self.r!r}, {self.q!r})"


def affine_shift(f: Regularizer, v, w: float = 0.0) -> Regularizer:
    """f + <v, .> + w, used to probe affine invariance of the divergence."""
    return Sum([f, Linear(v, w)])


# -- proximal-condition checking -------------------------------------------

def check_proximal(p: Regularizer, x_t, feasible_set, rng=None, n_probes: int = 50,
                   tol: float = 1e-9) -> None:
    """Assert p(x_t) <= p(x) + tol on probe points of the set.

    Quadratics centered at x_t with PSD metric and non-negative scale are
    proximal by construction and skip the probe loop.
    """
    x_t = as_point(x_t)
    if _structurally_proximal(p, x_t):
        return
    if rng is None:
        rng = np.random.default_rng(0)
    base = p.value(x_t)
    if not math.isfinite(base):
        raise ProximalConditionError(f"p_t(x_t) = {base} is not finite")
    for _ in range(n_probes):
        probe = feasible_set.sample(rng)
        if base > p.value(probe) + tol:
            raise ProximalConditionError(
                f"p_t(x_t) = {base} exceeds p_t(probe) = {p.value(probe)}")


def _structurally_proximal(p: Regularizer, x_t: np.ndarray) -> bool:
    if p.is_zero():
        return True
    if isinstance(p, Quadratic):
        return p.scale >= 0 and bool(np.array_equal(p.center, x_t))
    if isinstance(p, Sum):
        return all(_structurally_proximal(part, x_t) for part in p.parts)
    return False


@dataclass
class RegularizerTriple:
    """One round's (p_t, q_t) pair together with r_t = p_t + q_{t-1}."""

    p: Regularizer
    q: Regularizer
    r: Regularizer

    @classmethod
    def build(cls, p_t: Regularizer, q_t: Regularizer, q_prev: Regularizer,
              x_t=None, feasible_set=None, rng=None, n_probes: int = 8):
        if x_t is not None and feasible_set is not None:
            check_proximal(p_t, x_t, feasible_set, rng=rng, n_probes=n_probes)
        return cls(p=p_t, q=q_t, r=Sum([p_t, q_prev]))

    def certified(self) -> bool:
        return _certified(self.p) and _certified(self.q)


def _certified(reg: Regularizer) -> bool:
    if isinstance(reg, Quadratic):
        return reg.certified()
    if isinstance(reg, Sum):
        return all(_certified(p) for p in reg.parts)
    return True


# -- schedules ---------------------------------------------------------------

@dataclass
class ScheduleState:
    """Mutable accumulator a schedule threads through the rounds."""

    accum_sq: np.ndarray | None = None     # per-coordinate or full-matrix sums
    accum_hint_err: float = 0.0            # sum of ||g_t - hint_t||^2
    eta_prev: float = 0.0
    round: int = 0
    _prev_root: np.ndarray | None = field(default=None, repr=False)


def adagrad_diag_step(state: ScheduleState, g, eta: float, gamma0: float):
    """Diagonal adaptive-metric increment for round t.

    The cumulative metric after t rounds is diag(sqrt(gamma0 + sum g_s^2)) / eta;
    the increment returned here is the round-t difference of those roots.
    """
    g = as_point(g)
    if eta <= 0:
        raise ValueError(f"eta must be positive, got {eta}")
    if gamma0 < 0:
        raise ValueError(f"gamma0 must be >= 0, got {gamma0}")
    if state.accum_sq is None:
        state.accum_sq = np.full(g.shape, float(gamma0))
    prev_root = np.sqrt(state.accum_sq)
    state.accum_sq = state.accum_sq + g * g
    new_root = np.sqrt(state.accum_sq)
    state.round += 1
    return QuadMetric.diagonal((new_root - prev_root) / eta), state


def adagrad_full_step(state: ScheduleState, g, eta: float, gamma0: float,
                      max_dim: int = 256):
    """Full-matrix adaptive-metric increment (Q_{0:t}^{1/2} - Q_{0:t-1}^{1/2}) / eta."""
    g = as_point(g)
    if eta <= 0:
        raise ValueError(f"eta must be positive, got {eta}")
    if gamma0 < 0:
        raise ValueError(f"gamma0 must be >= 0, got {gamma0}")
    d = g.shape[0]
    if d > max_dim:
        raise ValueError(f"full-matrix schedule capped at dim {max_dim}, got {d}")
    if state.accum_sq is None:
        state.accum_sq = float(gamma0) * np.eye(d)
        state._prev_root = None
    if state._prev_root is None:
        state._prev_root = QuadMetric.full(state.accum_sq).sqrt().as_array(d)
    prev_root = state._prev_root
    state.accum_sq = state.accum_sq + np.outer(g, g)
    new_root = QuadMetric.full(state.accum_sq).sqrt().as_array(d)
    state._prev_root = new_root
    state.round += 1
    return QuadMetric.full((new_root - prev_root) / eta), state


def adagrad_initial_metric(dim: int, eta: float, gamma0: float) -> QuadMetric:
    """Round-0 metric sqrt(gamma0)/eta * I contributed by the gamma0 seed."""
    if eta <= 0:
        raise ValueError(f"eta must be positive, got {eta}")
    return QuadMetric.scaled(math.sqrt(gamma0) / eta, dim)


def ftrl_prox_increment(x_t, metric_increment: QuadMetric) -> Regularizer:
    """Proximal quadratic (1/2)||x - x_t||^2 under the given metric increment."""
    return Quadratic(as_point(x_t), metric_increment, 1.0)


def optimistic_shift(q_tilde: Regularizer, hint_prev, hint_next) -> Regularizer:
    """Fold a hint change into the round regularizer: q_t = q~_t + <hint_next - hint_prev, .>.

    Summed over rounds the linear parts telescope to <hint_{T+1}, .>, which is
    how the optimistic update stays a plain FTRL instance.
    """
    shift = as_point(hint_next) - as_point(hint_prev)
    if not np.any(shift):
        return q_tilde
    return Sum([q_tilde, Linear(shift, 0.0)])


def scale_free_eta(state: ScheduleState, g, hint, eta0: float) -> float:
    """eta_t = eta0 * sqrt(sum_s ||g_s - hint_s||^2), updating the accumulator.

    Positively homogeneous in the gradient/hint stream, which is what makes
    the proximal schedule built on it scale-free.
    """
    g = as_point(g)
    hint = as_point(hint)
    if eta0 <= 0:
        raise ValueError(f"eta0 must be positive, got {eta0}")
    err = g - hint
    state.accum_hint_err += float(np.dot(err, err))
    state.round += 1
    eta = eta0 * math.sqrt(state.accum_hint_err)
    state.eta_prev = eta
    return eta


def final_attack_eta(state: ScheduleState, g, hint, radius: float, smooth_l: float) -> float:
    """eta_t = 4 R L^2 + (2/R) sqrt(sum_s ||g_s - hint_s||^2).

    The additive floor keeps the schedule usable for smooth losses; with
    L = 0 it degenerates to the scale-free schedule with eta0 = 2/R.
    """
    if not math.isfinite(radius) or radius <= 0:
        raise ValueError(f"needs a finite positive set radius, got {radius}")
    if smooth_l < 0:
        raise ValueError(f"smoothness constant must be >= 0, got {smooth_l}")
    g = as_point(g)
    hint = as_point(hint)
    err = g - hint
    state.accum_hint_err += float(np.dot(err, err))
    state.round += 1
    eta = 4.0 * radius * smooth_l ** 2 + (2.0 / radius) * math.sqrt(state.accum_hint_err)
    state.eta_prev = eta
    return eta


def proximal_eta_increment(x_t, eta_t: float, eta_prev: float) -> Regularizer:
    """p_t = ((eta_t - eta_prev)/2) ||x - x_t||^2 for a non-decreasing eta schedule."""
    if eta_t < eta_prev - 1e-12:
        raise ValueError(f"eta schedule must be non-decreasing ({eta_prev} -> {eta_t})")
    gamma = max(eta_t - eta_prev, 0.0)
    if gamma == 0.0:
        return Zero()
    return Quadratic(as_point(x_t), QuadMetric.scaled(gamma), 1.0)


# -- composite wrapping ------------------------------------------------------

COMPOSITE_SETTINGS = ("known-before", "revealed-after")


def composite_wrap(q_tilde: Regularizer, psi: Regularizer | None, setting: str) -> Regularizer:
    """Fold a composite term into the round regularizer.

    ``known-before`` folds the NEXT round's composite term (psi_{t+1}) into
    q_t; ``revealed-after`` folds the current one (psi_t) and leaves q_0
    untouched.  Callers pass psi=None at the boundary rounds where the
    folded term is defined to be zero.
    """
    if setting not in COMPOSITE_SETTINGS:
        raise ValueError(f"unknown composite setting {setting!r}")
    if psi is None or psi.is_zero():
        return q_tilde
    return Sum([psi, q_tilde])


def validate_psi_sequence(psis, x1, probe_points, tol: float = 1e-9) -> None:
    """Check psi_1(x_1) = 0 and psi_1 >= psi_2 >= ... >= 0 on the probes.

    These are the admissibility conditions for folding composite terms that
    are only revealed after the prediction is made.
    """
    if not psis:
        return
    x1 = as_point(x1)
    v1 = psis[0].value(x1)
    if abs(v1) > tol:
        raise ValueError(f"psi_1(x_1) = {v1}, must be 0")
    for i, psi in enumerate(psis):
        for x in probe_points:
            v = psi.value(x)
            if v < -tol:
                raise ValueError(f"psi_{i + 1} takes negative value {v}")
            if i + 1 < len(psis):
                nxt = psis[i + 1].value(x)
                if nxt > v + tol:
                    raise ValueError(
                        f"psi sequence increases at index {i + 1}: {v} -> {nxt}")
