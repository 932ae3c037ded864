"""Primitives shared by every other module.

Vectors are dense float64 numpy arrays.  A quadratic metric M defines the
norm pair

    ||x||_M^2 = x' M x,        ||g||_{M,*}^2 = g' M^{-1} g,

and is stored in one of three shapes: a scaled identity, a diagonal, or a
full symmetric PSD matrix.  On top of these the module provides one-sided
directional derivatives and the generalized Bregman divergence

    B_f(y, x) = f(y) - f(x) - f'(x; y - x)   if f(y) is finite,
    B_f(y, x) = +inf                          otherwise,

which is defined through directional derivatives only, so it applies to
non-smooth and non-convex functions alike.
"""

from __future__ import annotations

import math

import numpy as np

INF = math.inf

_PSD_CLAMP = -1e-10  # eigenvalues above this are treated as rounding noise


class DimensionMismatch(ValueError):
    pass


class SingularMetricError(ValueError):
    """Dual norm requested under a metric that is not positive definite."""


def as_point(x) -> np.ndarray:
    """Validate and return a finite 1-d float64 array."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ValueError(f"point must be 1-d, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("point has non-finite entries")
    return arr


def dot(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise DimensionMismatch(f"shape mismatch {x.shape} vs {y.shape}")
    return float(np.dot(x, y))


class QuadMetric:
    """Symmetric PSD quadratic form in scaled-identity, diagonal, or full shape.

    Full matrices are symmetrized and eigen-clamped at construction: any
    eigenvalue in [-1e-10, 0) is treated as 0, anything below that is
    rejected.  The dual norm additionally requires strict positive
    definiteness and raises ``SingularMetricError`` naming the offending
    coordinate or eigenvalue.
    """

    __slots__ = ("kind", "gamma", "weights", "matrix", "_dim", "_evals", "_evecs")

    def __init__(self, kind, *, gamma=None, weights=None, matrix=None, dim=None,
                 _evals=None, _evecs=None):
        self.kind = kind
        self.gamma = gamma
        self.weights = weights
        self.matrix = matrix
        self._dim = dim
        self._evals = _evals
        self._evecs = _evecs

    # -- constructors --------------------------------------------------

    @classmethod
    def scaled(cls, gamma: float, dim: int | None = None) -> "QuadMetric":
        gamma = float(gamma)
        if gamma < _PSD_CLAMP:
            raise ValueError(f"scaled-identity metric needs gamma >= 0, got {gamma}")
        return cls("scaled", gamma=max(gamma, 0.0), dim=dim)

    @classmethod
    def diagonal(cls, weights) -> "QuadMetric":
        w = np.asarray(weights, dtype=float).copy()
        if w.ndim != 1:
            raise ValueError("diagonal metric needs a 1-d weight vector")
        bad = np.where(w < _PSD_CLAMP)[0]
        if bad.size:
            j = int(bad[0])
            raise ValueError(f"diagonal metric weight {j} is negative ({w[j]})")
        np.maximum(w, 0.0, out=w)
        return cls("diag", weights=w, dim=w.size)

    @classmethod
    def full(cls, matrix) -> "QuadMetric":
        a = np.asarray(matrix, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("full metric needs a square matrix")
        a = 0.5 * (a + a.T)
        evals, evecs = np.linalg.eigh(a)
        scale = max(1.0, float(np.max(np.abs(evals))))
        bad = np.where(evals < _PSD_CLAMP * scale)[0]
        if bad.size:
            i = int(bad[0])
            raise ValueError(f"full metric eigenvalue {i} is negative ({evals[i]})")
        evals = np.maximum(evals, 0.0)
        a = (evecs * evals) @ evecs.T
        a = 0.5 * (a + a.T)
        return cls("full", matrix=a, dim=a.shape[0], _evals=evals, _evecs=evecs)

    @classmethod
    def zero(cls, dim: int | None = None) -> "QuadMetric":
        return cls.scaled(0.0, dim)

    # -- basic queries ---------------------------------------------------

    @property
    def dim(self) -> int | None:
        return self._dim

    def _need_dim(self, d: int | None) -> int:
        if d is None:
            d = self._dim
        if d is None:
            raise ValueError("scaled-identity metric has no intrinsic dimension")
        return d

    def _eig(self):
        if self._evals is None:
            self._evals, self._evecs = np.linalg.eigh(self.matrix)
        return self._evals, self._evecs

    def as_array(self, dim: int | None = None) -> np.ndarray:
        if self.kind == "scaled":
            return self.gamma * np.eye(self._need_dim(dim))
        if self.kind == "diag":
            return np.diag(self.weights)
        return self.matrix.copy()

    def diag_weights(self, dim: int | None = None) -> np.ndarray:
        if self.kind == "scaled":
            return np.full(self._need_dim(dim), self.gamma)
        if self.kind == "diag":
            return self.weights.copy()
        raise ValueError("full metric has no diagonal representation")

    def min_eig(self) -> float:
        if self.kind == "scaled":
            return self.gamma
        if self.kind == "diag":
            return float(np.min(self.weights)) if self.weights.size else 0.0
        return float(self._eig()[0][0])

    def max_eig(self) -> float:
        if self.kind == "scaled":
            return self.gamma
        if self.kind == "diag":
            return float(np.max(self.weights)) if self.weights.size else 0.0
        return float(self._eig()[0][-1])

    # -- algebra ---------------------------------------------------------

    def matvec(self, x: np.ndarray) -> np.ndarray:
        if self.kind == "scaled":
            return self.gamma * x
        if self.kind == "diag":
            self._check(x)
            return self.weights * x
        self._check(x)
        return self.matrix @ x

    def _check(self, x):
        if self._dim is not None and x.shape[0] != self._dim:
            raise DimensionMismatch(
                f"metric dim {self._dim} vs vector dim {x.shape[0]}")

    def add(self, other: "QuadMetric") -> "QuadMetric":
        a, b = self, other
        if a.kind == "scaled" and b.kind == "scaled":
            return QuadMetric.scaled(a.gamma + b.gamma, a._dim or b._dim)
        if "full" in (a.kind, b.kind):
            d = a._dim if a._dim is not None else b._dim
            if d is None:
                raise ValueError("cannot add dimension-free metrics as full")
            return QuadMetric.full(a.as_array(d) + b.as_array(d))
        # scaled+diag or diag+diag
        d = a._dim if a.kind == "diag" else b._dim
        return QuadMetric.diagonal(a.diag_weights(d) + b.diag_weights(d))

    def scale(self, c: float) -> "QuadMetric":
        c = float(c)
        if c < 0:
            raise ValueError("metric scaling must be non-negative")
        if self.kind == "scaled":
            return QuadMetric.scaled(c * self.gamma, self._dim)
        if self.kind == "diag":
            return QuadMetric.diagonal(c * self.weights)
        return QuadMetric.full(c * self.matrix)

    def shift_identity(self, c: float) -> "QuadMetric":
        """Return M + c I.  Raises if the shift breaks positive semidefiniteness."""
        if self.kind == "scaled":
            return QuadMetric.scaled(self.gamma + c, self._dim)
        if self.kind == "diag":
            return QuadMetric.diagonal(self.weights + c)
        return QuadMetric.full(self.matrix + c * np.eye(self._dim))

    def sqrt(self) -> "QuadMetric":
        if self.kind == "scaled":
            return QuadMetric.scaled(math.sqrt(self.gamma), self._dim)
        if self.kind == "diag":
            return QuadMetric.diagonal(np.sqrt(self.weights))
        evals, evecs = self._eig()
        root = (evecs * np.sqrt(np.maximum(evals, 0.0))) @ evecs.T
        return QuadMetric.full(root)

    def solve(self, b: np.ndarray) -> np.ndarray:
        """Solve M x = b.  Requires strict positive definiteness."""
        if self.kind == "scaled":
            if self.gamma <= 0:
                raise SingularMetricError("scaled-identity metric has gamma = 0")
            return b / self.gamma
        if self.kind == "diag":
            self._assert_pd_diag()
            return b / self.weights
        evals, evecs = self._eig()
        self._assert_pd_full(evals)
        return evecs @ ((evecs.T @ b) / evals)

    def _assert_pd_diag(self):
        bad = np.where(self.weights <= 0.0)[0]
        if bad.size:
            j = int(bad[0])
            raise SingularMetricError(
                f"diagonal metric is singular at coordinate {j} (weight {self.weights[j]})")

    def _assert_pd_full(self, evals):
        tol = 1e-14 * max(1.0, float(evals[-1]))
        if evals[0] <= tol:
            raise SingularMetricError(
                f"full metric is singular: eigenvalue 0 is {evals[0]}")

    def is_pd(self) -> bool:
        try:
            if self.kind == "scaled":
                return self.gamma > 0
            if self.kind == "diag":
                self._assert_pd_diag()
            else:
                self._assert_pd_full(self._eig()[0])
            return True
        except SingularMetricError:
            return False

    def __repr__(self):
        if self.kind == "scaled":
            return f"QuadMetric.scaled({self.gamma}, dim={self._dim})"
        if self.kind == "diag":
            return f"QuadMetric.diagonal({self.weights!r})"
        return f"QuadMetric.full({self.matrix!r})"


def quad_norm_sq(metric: QuadMetric, x) -> float:
    """||x||_M^2 = x' M x."""
    x = np.asarray(x, dtype=float)
    return float(np.dot(x, metric.matvec(x)))


def dual_norm_sq(metric: QuadMetric, g) -> float:
    """||g||_{M,*}^2 = g' M^{-1} g.  The metric must be strictly PD."""
    g = np.asarray(g, dtype=float)
    if metric.kind == "scaled":
        if metric.gamma <= 0:
            raise SingularMetricError("scaled-identity metric has gamma = 0")
        return float(np.dot(g, g)) / metric.gamma
    return float(np.dot(g, metric.solve(g)))


# -- directional derivatives ----------------------------------------------

_NUMERIC_ALPHAS = (1e-4, 1e-5, 1e-6)


def dir_derivative(f, x, z) -> float:
    """One-sided directional derivative f'(x; z), from the handle's closed form.

    Handles expose ``dir_deriv(x, z)``.  There is deliberately no silent
    numeric fallback here; tests that want the limit-based estimate call
    :func:`numeric_dir_derivative` explicitly.
    """
    dd = getattr(f, "dir_deriv", None)
    if dd is None:
        raise TypeError(f"{type(f).__name__} exposes no closed-form dir_deriv")
    return dd(as_point(x), as_point(z))


def numeric_dir_derivative(value_fn, x, z, alphas=_NUMERIC_ALPHAS, rtol=1e-3) -> float:
    """One-sided limit (f(x + a z) - f(x)) / a for shrinking a.

    Uses Richardson extrapolation across the step ladder and rejects the
    result if the extrapolated estimates do not agree to ``rtol``.  Intended
    for cross-checking closed forms in tests, not for hot paths.
    """
    x = as_point(x)
    z = as_point(z)
    f0 = float(value_fn(x))
    if not math.isfinite(f0):
        raise ValueError("numeric directional derivative needs a finite base value")
    quotients = []
    for a in alphas:
        fa = float(value_fn(x + a * z))
        if not math.isfinite(fa):
            raise ValueError(f"f(x + {a} z) is not finite; cannot take the limit")
        quotients.append((fa - f0) / a)
    # one-sided quotients have error c1*a + O(a^2); with a ratio of 10 between
    # consecutive steps the linear term cancels in (10 q2 - q1) / 9
    extr = []
    for q_big, q_small in zip(quotients, quotients[1:]):
        extr.append((10.0 * q_small - q_big) / 9.0)
    spread = abs(extr[-1] - extr[0])
    if spread > rtol * (1.0 + abs(extr[-1])):
        raise ValueError(
            f"numeric directional derivative did not converge (spread {spread:.3e})")
    return extr[-1]


# -- Bregman divergence ----------------------------------------------------

def bregman(f, y, x) -> float:
    """Generalized Bregman divergence B_f(y, x).

    Returns +inf when f(y) = +inf or when f'(x; y-x) = -inf.  A +inf
    directional derivative with finite f(y) would make the divergence -inf,
    which no caller is allowed to store, so that case raises.
    """
    y = as_point(y)
    x = as_point(x)
    fx = float(f.value(x))
    if not math.isfinite(fx):
        raise ValueError("B_f(y, x) needs f(x) finite")
    fy = float(f.value(y))
    if fy == INF:
        return INF
    if math.isnan(fy):
        raise ValueError("f(y) is NaN")
    d = dir_derivative(f, x, y - x)
    if d == -INF:
        return INF
    if d == INF:
        raise ValueError("B_f(y, x) = -inf: f'(x; y-x) = +inf with f(y) finite")
    return fy - fx - d


def delta_term(f, x_t, x_star, g_t) -> float:
    """Linearization gap delta = <g, x*-x> - f'(x; x*-x).

    Non-positive whenever g is a local sub-gradient of f at x; with unbiased
    stochastic gradients it is only non-positive in conditional expectation.
    """
    x_t = as_point(x_t)
    x_star = as_point(x_star)
    g_t = as_point(g_t)
    d = dir_derivative(f, x_t, x_star - x_t)
    if not math.isfinite(d):
        raise ValueError("delta term needs a finite directional derivative")
    return dot(g_t, x_star - x_t) - d
