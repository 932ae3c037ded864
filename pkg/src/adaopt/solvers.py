"""Feasible sets and the per-round argmin solvers.

Every learner update in this package is one minimization of

    F(x) = <lin, x> + (quadratic part) + alpha ||x||_1 + sum of smooth losses

over a feasible set.  The quadratic part collects regularizer quadratics
(signed scales allowed) into one scalar/diagonal/full form, so closed-form
routes stay O(d).  Three routes exist and are deliberately kept separate so
they can cross-check each other in tests:

* ``argmin_quadratic``  - exact solve; constrained only for isotropic metrics,
  where projecting the unconstrained minimizer is exact,
* ``argmin_l1_composite`` - coordinate soft-thresholding, boxes only,
* ``argmin_numeric``    - proximal gradient with backtracking and an
  a-posteriori distance certificate from strong convexity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import INF, DimensionMismatch, QuadMetric, as_point
from .regularizers import (L1, Indicatrix, Linear, Quadratic, Regularizer,
                           Sum, Zero)

_FEAS_TOL = 1e-9


class IllPosedError(ValueError):
    """The argmin does not exist or is not unique under the requested route."""


class NumericArgminError(RuntimeError):
    """The iterative solver could not certify the requested tolerance."""


# -- feasible sets -----------------------------------------------------------

class FeasibleSet:
    dim: int

    def contains(self, x, tol: float = _FEAS_TOL) -> bool:
        raise NotImplementedError

    def project(self, y) -> np.ndarray:
        raise NotImplementedError

    def center(self) -> np.ndarray:
        raise NotImplementedError

    def sample(self, rng) -> np.ndarray:
        raise NotImplementedError

    def diameter(self) -> float:
        raise NotImplementedError

    def direction_feasible(self, x, z, tol: float = _FEAS_TOL) -> bool:
        """True if x + a z stays in the set for all small enough a > 0."""
        raise NotImplementedError

    def max_dist_to(self, point) -> float:
        """sup over the set of ||x - point||_2 (closed form per shape)."""
        raise NotImplementedError


class Unconstrained(FeasibleSet):
    def __init__(self, dim: int):
        self.dim = int(dim)

    def contains(self, x, tol=_FEAS_TOL):
        return True

    def project(self, y):
        return as_point(y).copy()

    def center(self):
        return np.zeros(self.dim)

    def sample(self, rng):
        return rng.standard_normal(self.dim)

    def diameter(self):
        return INF

    def direction_feasible(self, x, z, tol=_FEAS_TOL):
        return True

    def max_dist_to(self, point):
        return INF

    def __repr__(self):
        return f"Unconstrained({self.dim})"


class Box(FeasibleSet):
    def __init__(self, lo, hi):
        self.lo = as_point(lo)
        self.hi = as_point(hi)
        if self.lo.shape != self.hi.shape:
            raise ValueError("box bounds must share a shape")
        if np.any(self.lo > self.hi):
            raise ValueError("box needs lo <= hi")
        self.dim = self.lo.size

    def contains(self, x, tol=_FEAS_TOL):
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lo - tol) and np.all(x <= self.hi + tol))

    def project(self, y):
        return np.clip(as_point(y), self.lo, self.hi)

    def center(self):
        return 0.5 * (self.lo + self.hi)

    def sample(self, rng):
        return rng.uniform(self.lo, self.hi)

    def diameter(self):
        return float(np.linalg.norm(self.hi - self.lo))

    def direction_feasible(self, x, z, tol=_FEAS_TOL):
        x = np.asarray(x, dtype=float)
        z = np.asarray(z, dtype=float)
        scale = 1.0 + float(np.max(self.hi - self.lo, initial=0.0))
        at_lo = x <= self.lo + tol * scale
        at_hi = x >= self.hi - tol * scale
        return bool(np.all(z[at_lo] >= -tol * scale) and np.all(z[at_hi] <= tol * scale))

    def max_dist_to(self, point):
        point = as_point(point)
        far = np.maximum(np.abs(self.lo - point), np.abs(self.hi - point))
        return float(np.linalg.norm(far))

    def __repr__(self):
        return f"Box(lo={self.lo!r}, hi={self.hi!r})"


class Ball(FeasibleSet):
    def __init__(self, center, radius: float):
        self._center = as_point(center)
        self.radius = float(radius)
        if self.radius <= 0:
            raise ValueError("ball needs a positive radius")
        self.dim = self._center.size

    def contains(self, x, tol=_FEAS_TOL):
        d = float(np.linalg.norm(np.asarray(x, dtype=float) - self._center))
        return d <= self.radius * (1.0 + tol) + tol

    def project(self, y):
        y = as_point(y)
        d = y - self._center
        n = float(np.linalg.norm(d))
        if n <= self.radius:
            return y.copy()
        return self._center + d * (self.radius / n)

    def center(self):
        return self._center.copy()

    def sample(self, rng):
        z = rng.standard_normal(self.dim)
        n = float(np.linalg.norm(z))
        if n == 0.0:
            return self._center.copy()
        u = rng.uniform() ** (1.0 / self.dim)
        return self._center + z * (self.radius * u / n)

    def diameter(self):
        return 2.0 * self.radius

    def direction_feasible(self, x, z, tol=_FEAS_TOL):
        x = np.asarray(x, dtype=float)
        z = np.asarray(z, dtype=float)
        d = x - self._center
        n = float(np.linalg.norm(d))
        if n < self.radius * (1.0 - tol):
            return True
        nz = float(np.linalg.norm(z))
        if nz == 0.0:
            return True
        # on the boundary the ball is curved: staying inside needs strictly
        # inward motion, tangents leave immediately
        return float(np.dot(d, z)) <= -tol * n * nz

    def max_dist_to(self, point):
        return self.radius + float(np.linalg.norm(self._center - as_point(point)))

    def __repr__(self):
        return f"Ball(center={self._center!r}, radius={self.radius})"


class Simplex(FeasibleSet):
    """{x >= 0 : sum x = scale}."""

    def __init__(self, dim: int, scale: float = 1.0):
        self.dim = int(dim)
        self.scale = float(scale)
        if self.scale <= 0:
            raise ValueError("simplex needs a positive scale")

    def contains(self, x, tol=_FEAS_TOL):
        x = np.asarray(x, dtype=float)
        s = 1.0 + self.scale
        return bool(np.all(x >= -tol * s) and abs(float(np.sum(x)) - self.scale) <= tol * s)

    def project(self, y):
        return simplex_project(as_point(y), self.scale)

    def center(self):
        return np.full(self.dim, self.scale / self.dim)

    def sample(self, rng):
        e = rng.exponential(size=self.dim)
        return self.scale * e / float(np.sum(e))

    def diameter(self):
        return self.scale * math.sqrt(2.0)

    def direction_feasible(self, x, z, tol=_FEAS_TOL):
        x = np.asarray(x, dtype=float)
        z = np.asarray(z, dtype=float)
        s = 1.0 + self.scale
        if abs(float(np.sum(z))) > tol * s:
            return False
        at_zero = x <= tol * s
        return bool(np.all(z[at_zero] >= -tol * s))

    def max_dist_to(self, point):
        point = as_point(point)
        best = 0.0
        for j in range(self.dim):
            v = -point.copy()
            v[j] += self.scale
            best = max(best, float(np.linalg.norm(v)))
        return best

    def __repr__(self):
        return f"Simplex(dim={self.dim}, scale={self.scale})"


def simplex_project(v: np.ndarray, scale: float = 1.0) -> np.ndarray:
    """Euclidean projection onto {x >= 0 : sum x = scale} by sorting.

    Standard water-filling: find the largest k with
    u_k - (sum of top k - scale)/k > 0 and shift the top block.
    """
    v = as_point(v)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - scale
    idx = np.arange(1, v.size + 1)
    cond = u - css / idx > 0
    k = int(np.max(idx[cond]))
    theta = css[k - 1] / k
    return np.maximum(v - theta, 0.0)


def project(feasible_set: FeasibleSet, y) -> np.ndarray:
    """Euclidean projection onto the set (closed form per shape)."""
    return feasible_set.project(y)


def linear_argmin(feasible_set: FeasibleSet, v) -> np.ndarray:
    """Exact minimizer of <v, x> over a compact set (support point of -v).

    Zero v returns the set center.  Ties on the box go to the center
    coordinate and on the simplex to the lowest index, so the result is
    deterministic.
    """
    v = as_point(v)
    if v.size != feasible_set.dim:
        raise DimensionMismatch(
            f"direction has dim {v.size}, set has dim {feasible_set.dim}")
    if not np.any(v):
        return feasible_set.center()
    if isinstance(feasible_set, Ball):
        return feasible_set.center() - feasible_set.radius * v / np.linalg.norm(v)
    if isinstance(feasible_set, Box):
        mid = feasible_set.center()
        return np.where(v > 0, feasible_set.lo, np.where(v < 0, feasible_set.hi, mid))
    if isinstance(feasible_set, Simplex):
        out = np.zeros(feasible_set.dim)
        out[int(np.argmin(v))] = feasible_set.scale
        return out
    raise IllPosedError("linear objective is unbounded on this set")


# -- objectives --------------------------------------------------------------

@dataclass
class Objective:
    """Collected minimization problem for one learner round.

    The quadratic part is stored pre-combined: ``gamma`` (scaled identity),
    ``diag`` and ``full`` slots add up, with centers already folded into the
    linear term.  ``losses`` lists smooth loss handles that enter the
    objective directly (implicit and non-linearized updates).
    """

    feasible_set: FeasibleSet
    lin: np.ndarray
    gamma: float = 0.0
    diag: np.ndarray | None = None
    full: np.ndarray | None = None
    const: float = 0.0
    l1_alpha: float = 0.0
    losses: list = field(default_factory=list)
    init: np.ndarray | None = None

    # -- assembly ------------------------------------------------------

    @classmethod
    def build(cls, feasible_set: FeasibleSet, linear=None, regularizer=None,
              anchor=None, losses=()) -> "Objective":
        d = feasible_set.dim
        obj = cls(feasible_set=feasible_set,
                  lin=np.zeros(d) if linear is None else as_point(linear).copy())
        if regularizer is not None:
            obj.add_regularizer(regularizer)
        if anchor is not None:
            reg, point = anchor
            obj.add_bregman_anchor(reg, point)
            obj.init = as_point(point)
        obj.losses.extend(losses)
        return obj

    def add_linear(self, v):
        self.lin = self.lin + as_point(v)

    def add_quadratic(self, center, metric: QuadMetric, scale: float):
        """Fold scale/2 ||x - center||_M^2 into the combined form."""
        if scale == 0.0:
            return
        center = as_point(center)
        d = self.lin.size
        if metric.kind == "scaled":
            if np.any(center):
                # a shifted isotropic quadratic is no longer pure gamma*I in
                # x'Mx form; fold the cross term into lin and keep gamma
                self.lin = self.lin - scale * metric.gamma * center
                self.const += 0.5 * scale * metric.gamma * float(np.dot(center, center))
            self.gamma += scale * metric.gamma
            return
        if metric.kind == "diag":
            w = metric.weights
            if self.diag is None:
                self.diag = np.zeros(d)
            self.diag = self.diag + scale * w
        else:
            m = metric.matrix
            if self.full is None:
                self.full = np.zeros((d, d))
            self.full = self.full + scale * m
        mc = metric.matvec(center) if np.any(center) else None
        if mc is not None:
            self.lin = self.lin - scale * mc
            self.const += 0.5 * scale * float(np.dot(center, mc))

    def add_regularizer(self, reg: Regularizer, scale: float = 1.0):
        if reg.is_zero():
            return
        if isinstance(reg, Sum):
            for part in reg.parts:
                self.add_regularizer(part, scale)
            return
        if isinstance(reg, Quadratic):
            self.add_quadratic(reg.center, reg.metric, scale * reg.scale)
            return
        if isinstance(reg, Linear):
            self.lin = self.lin + scale * reg.v
            self.const += scale * reg.w
            return
        if isinstance(reg, L1):
            if scale < 0:
                raise ValueError("cannot subtract an l1 term from an objective")
            self.l1_alpha += scale * reg.alpha
            return
        if isinstance(reg, Indicatrix):
            if reg.set is not self.feasible_set:
                raise ValueError("indicatrix set differs from the objective's set")
            return
        raise TypeError(f"cannot collect {type(reg).__name__} into an objective")

    def add_bregman_anchor(self, reg: Regularizer, point):
        """Fold B_reg(x, point) for a quadratic-family reg (centers drop out)."""
        point = as_point(point)
        if reg.is_zero():
            return
        if isinstance(reg, Sum):
            for part in reg.parts:
                self.add_bregman_anchor(part, point)
            return
        if isinstance(reg, Quadratic):
            self.add_quadratic(point, reg.metric, reg.scale)
            return
        if isinstance(reg, Linear):
            return
        raise TypeError(
            f"Bregman anchor supports quadratic-family handles, not {type(reg).__name__}")

    # -- calculus -------------------------------------------------------

    def quad_matvec(self, x: np.ndarray) -> np.ndarray:
        out = self.gamma * x
        if self.diag is not None:
            out = out + self.diag * x
        if self.full is not None:
            out = out + self.full @ x
        return out

    def smooth_value(self, x: np.ndarray) -> float:
        v = self.const + float(np.dot(self.lin, x)) + 0.5 * float(np.dot(x, self.quad_matvec(x)))
        for loss in self.losses:
            v += loss.value(x)
        return v

    def smooth_grad(self, x: np.ndarray) -> np.ndarray:
        g = self.lin + self.quad_matvec(x)
        for loss in self.losses:
            g = g + loss.grad(x)
        return g

    def value(self, x: np.ndarray) -> float:
        v = self.smooth_value(x)
        if self.l1_alpha:
            v += self.l1_alpha * float(np.sum(np.abs(x)))
        return v

    def quad_min_eig(self) -> float:
        lo = self.gamma
        if self.diag is not None:
            lo += float(np.min(self.diag))
        if self.full is not None:
            lo += float(np.linalg.eigvalsh(0.5 * (self.full + self.full.T))[0])
        return lo

    def quad_max_eig(self) -> float:
        hi = self.gamma
        if self.diag is not None:
            hi += float(np.max(self.diag))
        if self.full is not None:
            hi += float(np.linalg.eigvalsh(0.5 * (self.full + self.full.T))[-1])
        return hi

    def strong_convexity(self) -> float:
        sigma = self.quad_min_eig()
        for loss in self.losses:
            sigma += max(getattr(loss, "strong_convexity", 0.0) or 0.0, 0.0)
        return sigma

    def smoothness(self) -> float:
        big = self.quad_max_eig()
        for loss in self.losses:
            l = getattr(loss, "smoothness", None)
            if l is None or not math.isfinite(l):
                return INF
            big += l
        return big

    def is_isotropic(self) -> bool:
        return self.diag is None and self.full is None

    def has_losses(self) -> bool:
        return bool(self.losses)


# -- solvers -----------------------------------------------------------------

def _optimality_residual(obj: Objective, x: np.ndarray) -> float:
    """Norm of the projected-gradient fixed-point residual at step 1/L."""
    l = obj.smoothness()
    step = 1.0 / max(l, 1.0)
    ahead = x - step * obj.smooth_grad(x)
    if obj.l1_alpha:
        ahead = _soft_threshold(ahead, step * obj.l1_alpha)
    nxt = obj.feasible_set.project(ahead)
    return float(np.linalg.norm(x - nxt)) / step


def argmin_quadratic(obj: Objective) -> np.ndarray:
    """Exact minimizer of a strictly convex linear-plus-quadratic objective.

    Constrained instances are solved in closed form only for isotropic
    quadratics, where clipping the unconstrained minimizer onto the set is
    exact; anisotropic constrained instances delegate to the numeric route.
    """
    if obj.has_losses() or obj.l1_alpha:
        raise ValueError("argmin_quadratic expects a pure linear-quadratic objective")
    sigma = obj.quad_min_eig()
    if sigma <= 0.0:
        raise IllPosedError(
            f"ill-posed argmin: quadratic part has min curvature {sigma}")
    unconstrained = isinstance(obj.feasible_set, Unconstrained)
    # a diagonal quadratic over a box is separable: clipping is exact
    separable = isinstance(obj.feasible_set, Box) and obj.full is None
    if not unconstrained and not obj.is_isotropic() and not separable:
        return argmin_numeric(obj)
    if obj.is_isotropic():
        x = -obj.lin / obj.gamma
    elif obj.full is not None:
        m = 0.5 * (obj.full + obj.full.T) + (obj.gamma * np.eye(obj.lin.size)
                                             if obj.gamma else 0.0)
        if obj.diag is not None:
            m = m + np.diag(obj.diag)
        x = np.linalg.solve(m, -obj.lin)
    else:
        x = -obj.lin / (obj.diag + obj.gamma)
    if not unconstrained:
        x = obj.feasible_set.project(x)
    resid = _optimality_residual(obj, x)
    scale = 1.0 + float(np.linalg.norm(obj.lin)) + obj.quad_max_eig()
    if resid > 1e-8 * scale:
        raise IllPosedError(f"argmin residual {resid:.3e} exceeds tolerance")
    return x


def _soft_threshold(v: np.ndarray, thresh) -> np.ndarray:
    return np.sign(v) * np.maximum(np.abs(v) - thresh, 0.0)


def argmin_l1_composite(g, metric: QuadMetric, alpha: float, feasible_set) -> np.ndarray:
    """Coordinate-wise minimizer of <g, x> + 1/2 ||x||_M^2 + alpha ||x||_1.

    Soft-threshold then clip; exact because the objective is separable and
    each 1-d piece is convex.  Supports unconstrained and box sets with a
    strictly positive diagonal (or scaled-identity) metric.
    """
    g = as_point(g)
    if alpha < 0:
        raise ValueError("l1 coefficient must be >= 0")
    if metric.kind == "full":
        raise ValueError("l1 composite route needs a diagonal metric")
    w = metric.diag_weights(g.size)
    if np.any(w <= 0):
        j = int(np.where(w <= 0)[0][0])
        raise IllPosedError(f"ill-posed argmin: zero curvature at coordinate {j}")
    x = _soft_threshold(-g, alpha) / w
    if isinstance(feasible_set, Unconstrained):
        pass
    elif isinstance(feasible_set, Box):
        x = feasible_set.project(x)
    else:
        raise ValueError("l1 composite route supports unconstrained and box sets")
    _check_l1_optimality(g, w, alpha, x, feasible_set)
    return x


def _check_l1_optimality(g, w, alpha, x, feasible_set, tol=1e-8):
    """Sub-gradient stationarity of each coordinate, with box activity."""
    r = g + w * x
    scale = 1.0 + float(np.max(np.abs(g))) + alpha
    for j in range(x.size):
        lo_j, hi_j = -INF, INF
        if isinstance(feasible_set, Box):
            lo_j, hi_j = feasible_set.lo[j], feasible_set.hi[j]
        ok = False
        if x[j] > lo_j + tol and x[j] < hi_j - tol:
            if x[j] > tol:
                ok = abs(r[j] + alpha) <= tol * scale
            elif x[j] < -tol:
                ok = abs(r[j] - alpha) <= tol * scale
            else:
                ok = abs(r[j]) <= alpha + tol * scale
        elif x[j] <= lo_j + tol:
            sub = r[j] + (alpha if x[j] > tol else -alpha if x[j] < -tol else 0.0)
            ok = sub >= -tol * scale or abs(r[j]) <= alpha + tol * scale
        else:
            sub = r[j] + (alpha if x[j] > tol else -alpha if x[j] < -tol else 0.0)
            ok = sub <= tol * scale or abs(r[j]) <= alpha + tol * scale
        if not ok:
            raise IllPosedError(f"l1 composite optimality failed at coordinate {j}")


def argmin_numeric(obj: Objective, tol: float = 1e-10, max_iter: int = 10000) -> np.ndarray:
    """Proximal gradient with backtracking and a strong-convexity certificate.

    Initialization is deterministic (the set center, projected).  On exit the
    returned point x satisfies ||x - x*|| <= tol, certified through the
    sub-gradient bound sigma ||x - x*|| <= ||u|| with u constructed from the
    accepted proximal step.  Hitting max_iter raises; there is no silent
    best-effort return.
    """
    sigma = obj.strong_convexity()
    if sigma <= 0.0:
        raise IllPosedError(
            f"numeric argmin needs strong convexity, found modulus {sigma}")
    l = obj.smoothness()
    if not math.isfinite(l):
        raise ValueError("numeric argmin needs a finite smoothness bound")
    if obj.l1_alpha and not isinstance(obj.feasible_set, (Unconstrained, Box)):
        raise ValueError("l1 prox is only separable over unconstrained and box sets")

    start = obj.init if obj.init is not None else obj.feasible_set.center()
    x = obj.feasible_set.project(start)
    step = 1.0 / max(l, sigma)
    gx = obj.smooth_grad(x)
    sx = obj.smooth_value(x)
    for _ in range(max_iter):
        while True:
            ahead = x - step * gx
            if obj.l1_alpha:
                ahead = _soft_threshold(ahead, step * obj.l1_alpha)
            x_new = obj.feasible_set.project(ahead)
            diff = x_new - x
            dn2 = float(np.dot(diff, diff))
            if dn2 == 0.0:
                break
            # at step <= 1/L the descent condition holds exactly; testing it
            # in floats near the optimum would shrink the step without bound
            if step * l <= 1.0:
                break
            if obj.smooth_value(x_new) <= sx + float(np.dot(gx, diff)) + dn2 / (2.0 * step):
                break
            step = max(step * 0.5, 1.0 / l)
        g_new = obj.smooth_grad(x_new)
        # u = grad s(x+) - grad s(x) + (x - x+)/step lies in the sub-differential
        # of the full objective at x+, so sigma ||x+ - x*|| <= ||u||
        u = g_new - gx + (x - x_new) / step
        if float(np.linalg.norm(u)) <= sigma * tol:
            return x_new
        x, gx = x_new, g_new
        sx = obj.smooth_value(x)
        step = min(step * 1.25, 1.0 / sigma)
    raise NumericArgminError(
        f"no certificate after {max_iter} iterations (tol {tol})")


def minimize(obj: Objective, tol: float = 1e-10, max_iter: int = 10000) -> np.ndarray:
    """Route an objective to the cheapest admissible solver."""
    if obj.has_losses():
        return argmin_numeric(obj, tol=tol, max_iter=max_iter)
    if obj.l1_alpha:
        if obj.full is None and isinstance(obj.feasible_set, (Unconstrained, Box)):
            d = obj.lin.size
            w = np.full(d, obj.gamma) if obj.diag is None else obj.diag + obj.gamma
            return argmin_l1_composite(obj.lin, QuadMetric.diagonal(w),
                                       obj.l1_alpha, obj.feasible_set)
        return argmin_numeric(obj, tol=tol, max_iter=max_iter)
    return argmin_quadratic(obj)
