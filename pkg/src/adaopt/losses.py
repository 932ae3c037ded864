"""Loss handles, loss sequences, and probe-based curvature certificates.

A loss carries closed-form value / local sub-gradient / directional
derivative callables plus whatever curvature metadata is known about it
(smoothness and strong convexity w.r.t. the Euclidean norm, a star center,
a star-convexity modulus tau).  Sequences generate one loss per round and,
for stochastic ones, a noisy gradient whose deviation from the conditional
mean is recorded so bound calculators can use it.
"""

from __future__ import annotations

import math

import numpy as np

from . import core
from .core import INF, as_point, dot


class Loss:
    """Function handle with curvature metadata.

    ``grad`` returns a local sub-gradient: a vector g with <g, z> bounded by
    the directional derivative f'(x; z) for every z.  Where f is
    differentiable that is the gradient.
    """

    def __init__(self, name, value, grad, dir_deriv=None, smoothness=None,
                 strong_convexity=0.0, star_center=None, tau=None, lipschitz=None):
        self.name = name
        self._value = value
        self._grad = grad
        self._dir = dir_deriv
        self.smoothness = smoothness
        self.strong_convexity = float(strong_convexity)
        self.star_center = None if star_center is None else as_point(star_center)
        self.tau = tau
        self.lipschitz = lipschitz

    def value(self, x) -> float:
        return float(self._value(np.asarray(x, dtype=float)))

    def grad(self, x) -> np.ndarray:
        return np.asarray(self._grad(np.asarray(x, dtype=float)), dtype=float)

    def dir_deriv(self, x, z) -> float:
        x = np.asarray(x, dtype=float)
        z = np.asarray(z, dtype=float)
        if self._dir is not None:
            return float(self._dir(x, z))
        return dot(self.grad(x), z)

    def bregman(self, y, x) -> float:
        return core.bregman(self, y, x)

    def __repr__(self):
        return f"Loss({self.name!r})"


# -- library losses ----------------------------------------------------------

def linear_loss(v) -> Loss:
    v = as_point(v)
    return Loss(
        "linear",
        value=lambda x: dot(v, x),
        grad=lambda x: v.copy(),
        dir_deriv=lambda x, z: dot(v, z),
        smoothness=0.0,
        lipschitz=float(np.linalg.norm(v)),
    )


def quadratic_loss(center, weight: float = 1.0) -> Loss:
    """(weight/2) ||x - center||_2^2: weight-smooth and weight-strongly convex."""
    center = as_point(center)
    weight = float(weight)
    if weight <= 0:
        raise ValueError("quadratic loss needs a positive weight")
    return Loss(
        "quadratic",
        value=lambda x: 0.5 * weight * float(np.dot(x - center, x - center)),
        grad=lambda x: weight * (x - center),
        smoothness=weight,
        strong_convexity=weight,
        star_center=center,
        tau=2.0,
    )


def l1_loss(alpha: float = 1.0, dim: int = 1) -> Loss:
    alpha = float(alpha)

    def dd(x, z):
        at_zero = x == 0.0
        return alpha * (float(np.sum(np.sign(x[~at_zero]) * z[~at_zero]))
                        + float(np.sum(np.abs(z[at_zero]))))

    return Loss(
        "l1",
        value=lambda x: alpha * float(np.sum(np.abs(x))),
        grad=lambda x: alpha * np.sign(x),
        dir_deriv=dd,
        smoothness=None,
        star_center=np.zeros(dim),
        tau=1.0,
        lipschitz=alpha * math.sqrt(dim),
    )


def two_slope_abs(dim: int = 1) -> Loss:
    """Coordinate-wise |u| inside the unit interval and 2|u| outside.

    Discontinuous at |u| = 1, star-convex around the origin, not convex.
    """

    def phi(u):
        a = np.abs(u)
        return np.where(a <= 1.0, a, 2.0 * a)

    def grad(x):
        a = np.abs(x)
        return np.sign(x) * np.where(a <= 1.0, 1.0, 2.0)

    def dd(x, z):
        total = 0.0
        for u, w in zip(x, z):
            a = abs(u)
            if a == 0.0:
                total += abs(w)
            elif a < 1.0:
                total += math.copysign(1.0, u) * w
            elif a == 1.0:
                outward = math.copysign(1.0, u) * w
                if outward > 0.0:
                    return INF  # the jump to the steeper branch
                total += outward
            else:
                total += 2.0 * math.copysign(1.0, u) * w
        return total

    return Loss(
        "two-slope-abs",
        value=lambda x: float(np.sum(phi(x))),
        grad=grad,
        dir_deriv=dd,
        star_center=np.zeros(dim),
        tau=1.0,
    )


def sqrt_abs(dim: int = 1) -> Loss:
    """sum_j sqrt(|x_j|): star-shaped around 0 with modulus 1/2, not star-convex."""

    def grad(x):
        g = np.zeros_like(x)
        nz = x != 0.0
        g[nz] = np.sign(x[nz]) * 0.5 / np.sqrt(np.abs(x[nz]))
        return g

    def dd(x, z):
        total = 0.0
        for u, w in zip(x, z):
            if u == 0.0:
                if w != 0.0:
                    return INF  # square-root cusp
            else:
                total += math.copysign(1.0, u) * w * 0.5 / math.sqrt(abs(u))
        return total

    return Loss(
        "sqrt-abs",
        value=lambda x: float(np.sum(np.sqrt(np.abs(x)))),
        grad=grad,
        dir_deriv=dd,
        star_center=np.zeros(dim),
        tau=0.5,
    )


def power_product(powers) -> Loss:
    """prod_j |x_j|^{p_j}; star-convex around 0 when the exponents sum to >= 1."""
    p = as_point(powers)
    if np.any(p <= 0):
        raise ValueError("power product needs positive exponents")

    def value(x):
        return float(np.prod(np.abs(x) ** p))

    def grad(x):
        if np.any(x == 0.0):
            return np.zeros_like(x)
        f = value(x)
        return f * p / x

    def dd(x, z):
        zero = x == 0.0
        if not np.any(zero):
            return dot(grad(x), z)
        if np.any(z[zero] == 0.0):
            return 0.0  # the product stays pinned at zero along this ray
        pz = float(np.sum(p[zero]))
        if pz > 1.0:
            return 0.0
        rest = float(np.prod(np.abs(x[~zero]) ** p[~zero])) * \
            float(np.prod(np.abs(z[zero]) ** p[zero]))
        if pz == 1.0:
            return rest
        return INF

    return Loss(
        "power-product",
        value=value,
        grad=grad,
        dir_deriv=dd,
        star_center=np.zeros(p.size),
        tau=float(np.sum(p)),
    )


def affine_shift_loss(loss: Loss, v, w: float = 0.0) -> Loss:
    """loss + <v, .> + w, for probing affine invariance of the divergence."""
    v = as_point(v)

    def dd(x, z):
        base = loss.dir_deriv(x, z)
        if not math.isfinite(base):
            return base
        return base + dot(v, z)

    return Loss(
        f"{loss.name}+affine",
        value=lambda x: loss.value(x) + dot(v, x) + w,
        grad=lambda x: loss.grad(x) + v,
        dir_deriv=dd,
        smoothness=loss.smoothness,
        strong_convexity=loss.strong_convexity,
    )


class BregmanAround:
    """The divergence of a loss from a fixed anchor, as a round-regularizer
    handle: psi(x) = f(x) - f(a) - <grad f(a), x - a>.

    Non-negative for convex f, zero at the anchor, and with the same
    divergence as f itself (the affine part drops out).  Implicit and
    non-linearized updates are plain composite rounds with this handle as
    the folded term, which is what makes their bounds come out of the same
    calculators.
    """

    def __init__(self, loss: Loss, anchor):
        self.loss = loss
        self.anchor = as_point(anchor)
        self._f_a = loss.value(self.anchor)
        self._g_a = loss.grad(self.anchor)

    def value(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return self.loss.value(x) - self._f_a - dot(self._g_a, x - self.anchor)

    def grad(self, x) -> np.ndarray:
        return self.loss.grad(x) - self._g_a

    def dir_deriv(self, x, z) -> float:
        base = self.loss.dir_deriv(x, z)
        if not math.isfinite(base):
            return base
        return base - dot(self._g_a, np.asarray(z, dtype=float))

    def bregman(self, y, x) -> float:
        return core.bregman(self, y, x)

    def is_zero(self) -> bool:
        return False

    def __repr__(self):
        return f"BregmanAround({self.loss!r}, anchor={self.anchor!r})"


# -- sequences ---------------------------------------------------------------

class LossSequence:
    """One loss per round, with an optional stochastic gradient oracle."""

    dim: int
    stochastic: bool = False

    def loss(self, t: int) -> Loss:
        raise NotImplementedError

    def gradient(self, t: int, x, rng):
        """Return (g_t, sigma_t): the fed-back gradient and its deviation
        from the conditional mean (zero vector for exact feedback)."""
        g = self.loss(t).grad(x)
        return g, np.zeros_like(g)

    def per_round_variation(self, T: int, feasible_set):
        """Exact per-round sup ||grad f_t - grad f_{t-1}||^2 terms, or None."""
        return None


class FixedLoss(LossSequence):
    def __init__(self, loss: Loss, dim: int):
        self._loss = loss
        self.dim = dim

    def loss(self, t):
        return self._loss

    def per_round_variation(self, T, feasible_set):
        # f_0 := 0, so the t = 1 term is sup ||grad f||^2; afterwards zero
        first = _sup_grad_norm_sq(self._loss, feasible_set)
        if first is None:
            return None
        return [first] + [0.0] * (T - 1)


class LinearStream(LossSequence):
    """Deterministic linear losses f_t = <g_t, x> from a per-round vector rule."""

    def __init__(self, vector_fn, dim: int, kind: str = "linear-stream"):
        self.vector_fn = vector_fn
        self.dim = dim
        self.kind = kind

    def vector(self, t: int) -> np.ndarray:
        return self.vector_fn(t)

    def loss(self, t):
        return linear_loss(self.vector(t))

    def per_round_variation(self, T, feasible_set):
        out = []
        prev = np.zeros(self.dim)
        for t in range(1, T + 1):
            g = self.vector(t)
            d = g - prev
            out.append(float(np.dot(d, d)))
            prev = g
        return out


def alternating_stream(base, dim=None) -> LinearStream:
    base = as_point(base)
    return LinearStream(lambda t: base if t % 2 == 1 else -base, base.size,
                        "alternating")


def random_stream(dim: int, seed: int, scale: float = 1.0) -> LinearStream:
    """Seeded oblivious stream: g_t uniform in [-scale, scale]^d, regenerable."""

    def vec(t):
        rng = np.random.default_rng((seed, t))
        return scale * rng.uniform(-1.0, 1.0, dim)

    return LinearStream(vec, dim, "random")


def drift_then_constant_stream(base, flips: int) -> LinearStream:
    """Alternate +-base for ``flips`` rounds, then hold at +base forever.

    With previous-gradient hints the hint errors vanish after round
    flips + 1, so the total gradient variation stays fixed as T grows.
    """
    base = as_point(base)

    def vec(t):
        if t <= flips:
            return base if t % 2 == 1 else -base
        return base

    return LinearStream(vec, base.size, "drift-then-constant")


class DriftingQuadratic(LossSequence):
    """f_t = (w/2) ||x - a_t||^2 with a deterministic drifting center.

    The gradient difference between rounds is constant in x, so the
    per-round variation terms are exact.
    """

    def __init__(self, center_fn, dim: int, weight: float = 1.0):
        self.center_fn = center_fn
        self.dim = dim
        self.weight = float(weight)

    def center(self, t):
        return as_point(self.center_fn(t))

    def loss(self, t):
        return quadratic_loss(self.center(t), self.weight)

    def per_round_variation(self, T, feasible_set):
        first = _sup_grad_norm_sq(self.loss(1), feasible_set)
        if first is None:
            return None
        out = [first]
        for t in range(2, T + 1):
            d = self.weight * (self.center(t) - self.center(t - 1))
            out.append(float(np.dot(d, d)))
        return out


def sine_drift_quadratic(dim: int, amplitude: float, period: float,
                         weight: float = 1.0) -> DriftingQuadratic:
    direction = np.zeros(dim)
    direction[0] = 1.0

    def center(t):
        return amplitude * math.sin(2.0 * math.pi * t / period) * direction

    return DriftingQuadratic(center, dim, weight)


class StochasticLoss(LossSequence):
    """Fixed loss with noisy gradient feedback.

    Noise is isotropic Gaussian by default; ``uniform`` gives bounded noise
    with the same per-coordinate variance.  The returned sigma_t is the
    realized deviation g_t - grad f(x_t).
    """

    stochastic = True

    def __init__(self, base: Loss, dim: int, noise: float, noise_kind: str = "gaussian"):
        if noise < 0:
            raise ValueError("noise level must be >= 0")
        if noise_kind not in ("gaussian", "uniform"):
            raise ValueError(f"unknown noise kind {noise_kind!r}")
        self.base = base
        self.dim = dim
        self.noise = float(noise)
        self.noise_kind = noise_kind

    def loss(self, t):
        return self.base

    def gradient(self, t, x, rng):
        mean = self.base.grad(x)
        if self.noise == 0.0:
            return mean, np.zeros_like(mean)
        if self.noise_kind == "gaussian":
            sigma = self.noise * rng.standard_normal(self.dim)
        else:
            half = self.noise * math.sqrt(3.0)
            sigma = rng.uniform(-half, half, self.dim)
        return mean + sigma, sigma

    def per_round_variation(self, T, feasible_set):
        first = _sup_grad_norm_sq(self.base, feasible_set)
        if first is None:
            return None
        return [first] + [0.0] * (T - 1)


def stochastic_gradient(seq: LossSequence, t: int, x, rng):
    """Draw the round-t feedback (g_t, sigma_t) from the sequence's oracle."""
    return seq.gradient(t, as_point(x), rng)


def _sup_grad_norm_sq(loss: Loss, feasible_set):
    """Closed-form sup over the set of ||grad f||_2^2 where available."""
    if loss.name == "linear":
        g = loss.grad(np.zeros(feasible_set.dim))
        return float(np.dot(g, g))
    if loss.name == "quadratic" and loss.star_center is not None:
        w = loss.smoothness
        reach = feasible_set.max_dist_to(loss.star_center)
        if not math.isfinite(reach):
            return None
        return (w * reach) ** 2
    return None


def variation_estimate(seq: LossSequence, feasible_set, T: int,
                       n_probes: int = 64, rng=None):
    """Total gradient variation sum_t sup_x ||grad f_t - grad f_{t-1}||^2.

    Returns (value, quality) with quality "exact" when the sequence admits a
    closed form and "probe-estimated" otherwise (sup replaced by a max over
    sampled feasible points, an under-estimate by construction).
    """
    per = seq.per_round_variation(T, feasible_set)
    if per is not None:
        return float(np.sum(per)), "exact"
    if rng is None:
        rng = np.random.default_rng(0)
    probes = [feasible_set.sample(rng) for _ in range(n_probes)]
    total = 0.0
    for t in range(1, T + 1):
        f_now = seq.loss(t)
        f_prev = seq.loss(t - 1) if t > 1 else None
        best = 0.0
        for x in probes:
            g = f_now.grad(x)
            if f_prev is not None:
                g = g - f_prev.grad(x)
            best = max(best, float(np.dot(g, g)))
        total += best
    return total, "probe-estimated"


# -- probe-based certificates ------------------------------------------------

def verify_star_convex(loss: Loss, center, feasible_set=None, probes=None,
                       n_probes: int = 10 ** 4, rng=None, tol: float = 1e-9) -> bool:
    """Check B_f(center, x) >= 0 on probe points.

    Star-convexity around the center is exactly non-negativity of the
    divergence toward it, so a single negative value is a disproof; passing
    probes certify only up to sampling.
    """
    center = as_point(center)
    for x in _probe_points(center.size, feasible_set, probes, n_probes, rng):
        b = _bregman_to_center(loss, center, x)
        if b < -tol:
            return False
    return True


def _bregman_to_center(loss: Loss, center, x) -> float:
    fx = loss.value(x)
    fc = loss.value(center)
    d = loss.dir_deriv(x, center - x)
    if d == -INF:
        return INF
    if d == INF:
        return -INF  # f climbs toward the center: maximal violation
    return fc - fx - d


def estimate_tau(loss: Loss, center, feasible_set=None, probes=None,
                 n_probes: int = 10 ** 4, rng=None) -> float:
    """Largest tau with tau (f(x) - f(center)) <= -f'(x; center - x) on probes.

    Returns the infimum of the probe ratios, clipped at 0; a genuinely
    star-convex loss gives at least 1, a quadratic gives 2.
    """
    center = as_point(center)
    fc = loss.value(center)
    best = INF
    for x in _probe_points(center.size, feasible_set, probes, n_probes, rng):
        gap = loss.value(x) - fc
        if gap <= 1e-12:
            continue
        d = loss.dir_deriv(x, center - x)
        if d == INF:
            return 0.0
        ratio = -d / gap
        if ratio <= 0.0:
            return 0.0
        best = min(best, ratio)
    if best is INF:
        raise ValueError("no probe separated f(x) from f(center)")
    return best


def estimate_tau_strong(loss: Loss, reg, center, feasible_set=None, probes=None,
                        n_probes: int = 10 ** 4, rng=None) -> float:
    """Like estimate_tau but with the divergence of ``reg`` subtracted:
    tau (f(x) - f(center)) <= -f'(x; center - x) - B_reg(center, x)."""
    center = as_point(center)
    fc = loss.value(center)
    best = INF
    for x in _probe_points(center.size, feasible_set, probes, n_probes, rng):
        gap = loss.value(x) - fc
        if gap <= 1e-12:
            continue
        d = loss.dir_deriv(x, center - x)
        if d == INF:
            return 0.0
        ratio = (-d - reg.bregman(center, x)) / gap
        if ratio <= 0.0:
            return 0.0
        best = min(best, ratio)
    if best is INF:
        raise ValueError("no probe separated f(x) from f(center)")
    return best


def verify_tau_star_strong(loss: Loss, reg, center, tau: float, feasible_set=None,
                           probes=None, n_probes: int = 10 ** 4, rng=None,
                           tol: float = 1e-9) -> bool:
    """Check tau (f(x) - f(c)) <= -f'(x; c - x) - B_reg(c, x) on probes."""
    center = as_point(center)
    fc = loss.value(center)
    for x in _probe_points(center.size, feasible_set, probes, n_probes, rng):
        d = loss.dir_deriv(x, center - x)
        if d == INF:
            return False
        lhs = tau * (loss.value(x) - fc)
        rhs = -d - reg.bregman(center, x)
        if lhs > rhs + tol:
            return False
    return True


def check_pl(loss: Loss, mu: float, center=None, feasible_set=None, probes=None,
             n_probes: int = 10 ** 4, rng=None, tol: float = 1e-9) -> bool:
    """Check the gradient-dominance inequality mu (f - f*) <= 1/2 ||grad f||^2."""
    if center is None:
        center = loss.star_center
    center = as_point(center)
    fstar = loss.value(center)
    for x in _probe_points(center.size, feasible_set, probes, n_probes, rng):
        g = loss.grad(x)
        if mu * (loss.value(x) - fstar) > 0.5 * float(np.dot(g, g)) + tol:
            return False
    return True


def _probe_points(dim, feasible_set, probes, n_probes, rng):
    if probes is not None:
        for x in probes:
            yield as_point(x)
        return
    if rng is None:
        rng = np.random.default_rng(0)
    for _ in range(n_probes):
        if feasible_set is not None:
            yield feasible_set.sample(rng)
        else:
            yield rng.standard_normal(dim)
