"""Maximally monotone operators exposed through resolvents, and linear maps with adjoints.

Operators are never materialized as set-valued graphs.  The contract is the
resolvent ``J(gamma, x)``, the unique ``y`` with ``(x - y)/gamma`` in ``A(y)``,
i.e. the standard ``(Id + gamma A)^{-1}``.  The Yosida approximation
``(x - J(gamma, x)) / gamma`` is derived from it and pairs with the resolvent
output as a graph point of ``A``.
"""

import numpy as np
import scipy.linalg

from .space import as_vector

__all__ = [
    "MonotoneOperator",
    "Quadratic",
    "L1",
    "BoxNormalCone",
    "BallNormalCone",
    "Zero",
    "LinearMonotone",
    "LinearMap",
    "operator_library",
    "operator_from_config",
]


def _check_gamma(gamma):
    if not gamma > 0:
        raise ValueError(f"resolvent step must be positive, got {gamma}")


class MonotoneOperator:
    """Base contract for a maximally monotone operator.

    Subclasses implement ``resolvent(gamma, x)``.  ``dim`` is the operator's
    ambient dimension, or None for dimension-agnostic operators (separable
    per coordinate).  ``member(x, y)`` tests ``y in A(x)`` where an exact
    graph test exists; ``has_member`` says whether it does.
    """

    dim = None
    has_member = False

    def resolvent(self, gamma, x):
        raise NotImplementedError

    def yosida(self, gamma, x):
        """Single-valued approximation ``(x - resolvent(gamma, x)) / gamma``."""
        _check_gamma(gamma)
        x = as_vector(x)
        return (x - self.resolvent(gamma, x)) / gamma

    def member(self, x, y, tol=1e-8):
        raise NotImplementedError(f"{type(self).__name__} has no graph test")


class Quadratic(MonotoneOperator):
    """Gradient of half the squared distance to ``b``: ``A(x) = x - b``."""

    has_member = True

    def __init__(self, b):
        self.b = as_vector(b)
        self.b.setflags(write=False)
        self.dim = self.b.shape[0]

    def resolvent(self, gamma, x):
        _check_gamma(gamma)
        return (as_vector(x) + gamma * self.b) / (1.0 + gamma)

    def member(self, x, y, tol=1e-8):
        return bool(np.max(np.abs(as_vector(y) - (as_vector(x) - self.b))) <= tol)


class L1(MonotoneOperator):
    """Subdifferential of ``weight * ||.||_1``; resolvent is soft thresholding."""

    has_member = True

    def __init__(self, weight=1.0):
        if weight <= 0:
            raise ValueError(f"l1 weight must be positive, got {weight}")
        self.weight = float(weight)

    def resolvent(self, gamma, x):
        _check_gamma(gamma)
        x = as_vector(x)
        t = gamma * self.weight
        return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)

    def member(self, x, y, tol=1e-8):
        x = as_vector(x)
        y = as_vector(y)
        pos = (x > tol) & (np.abs(y - self.weight) <= tol)
        neg = (x < -tol) & (np.abs(y + self.weight) <= tol)
        zero = (np.abs(x) <= tol) & (np.abs(y) <= self.weight + tol)
        return bool(np.all(pos | neg | zero))


class BoxNormalCone(MonotoneOperator):
    """Normal cone of the box ``[lower, upper]``; resolvent clamps."""

    has_member = True

    def __init__(self, lower, upper):
        self.lower = as_vector(lower)
        self.upper = as_vector(upper)
        if self.lower.shape != self.upper.shape:
            raise ValueError("box bounds must have equal dimension")
        if np.any(self.lower > self.upper):
            raise ValueError("box lower bound exceeds upper bound")
        self.lower.setflags(write=False)
        self.upper.setflags(write=False)
        self.dim = self.lower.shape[0]

    def resolvent(self, gamma, x):
        _check_gamma(gamma)
        return np.clip(as_vector(x), self.lower, self.upper)

    def member(self, x, y, tol=1e-8):
        x = as_vector(x)
        y = as_vector(y)
        if np.any(x < self.lower - tol) or np.any(x > self.upper + tol):
            return False
        at_lower = x <= self.lower + tol
        at_upper = x >= self.upper - tol
        ok = np.full(x.shape, True)
        ok &= np.where(at_upper, True, y <= tol)
        ok &= np.where(at_lower, True, y >= -tol)
        return bool(np.all(ok))


class BallNormalCone(MonotoneOperator):
    """Normal cone of the closed ball ``B(center, radius)``; resolvent projects radially."""

    has_member = True

    def __init__(self, center, radius):
        if radius <= 0:
            raise ValueError(f"ball radius must be positive, got {radius}")
        self.center = as_vector(center)
        self.center.setflags(write=False)
        self.radius = float(radius)
        self.dim = self.center.shape[0]

    def resolvent(self, gamma, x):
        _check_gamma(gamma)
        x = as_vector(x)
        d = x - self.center
        dist = np.linalg.norm(d)
        if dist <= self.radius:
            return x
        return self.center + (self.radius / dist) * d

    def member(self, x, y, tol=1e-8):
        x = as_vector(x)
        y = as_vector(y)
        d = x - self.center
        dist = np.linalg.norm(d)
        if dist > self.radius + tol:
            return False
        ny = np.linalg.norm(y)
        if ny <= tol:
            return True
        # nonzero normals exist only on the boundary, pointing outward
        if dist < self.radius - tol:
            return False
        return bool(np.linalg.norm(y - (ny / dist) * d) <= tol * (1.0 + ny))


class Zero(MonotoneOperator):
    """The zero operator; its resolvent is the identity."""

    has_member = True

    def resolvent(self, gamma, x):
        _check_gamma(gamma)
        return as_vector(x)

    def member(self, x, y, tol=1e-8):
        return bool(np.max(np.abs(as_vector(y))) <= tol)


class LinearMonotone(MonotoneOperator):
    """Linear operator ``x -> M x`` with positive semidefinite symmetric part.

    The resolvent solves the dense system ``(I + gamma M) y = x``; the
    factorization is cached per step size since problem sizes are small.
    """

    has_member = True

    def __init__(self, matrix):
        M = np.array(matrix, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {M.shape}")
        sym = 0.5 * (M + M.T)
        lam_min = float(np.linalg.eigvalsh(sym).min())
        if lam_min < -1e-10 * max(1.0, float(np.abs(M).max())):
            raise ValueError(f"matrix is not monotone (symmetric part eigmin {lam_min:.3e})")
        M.setflags(write=False)
        self.matrix = M
        self.dim = M.shape[0]
        self._solves = {}

    def resolvent(self, gamma, x):
        _check_gamma(gamma)
        x = as_vector(x)
        key = float(gamma)
        if key not in self._solves:
            self._solves[key] = scipy.linalg.lu_factor(
                np.eye(self.dim) + gamma * self.matrix
            )
        return scipy.linalg.lu_solve(self._solves[key], x)

    def member(self, x, y, tol=1e-8):
        x = as_vector(x)
        y = as_vector(y)
        return bool(np.max(np.abs(y - self.matrix @ x)) <= tol * (1.0 + np.abs(x).max()))


class LinearMap:
    """Dense linear map with its adjoint (the transpose)."""

    def __init__(self, matrix):
        M = np.array(matrix, dtype=float)
        if M.ndim != 2:
            raise ValueError(f"expected a matrix, got shape {M.shape}")
        M.setflags(write=False)
        self.matrix = M

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def dim_in(self):
        return self.matrix.shape[1]

    @property
    def dim_out(self):
        return self.matrix.shape[0]

    def apply(self, x):
        x = as_vector(x)
        if x.shape[0] != self.dim_in:
            raise ValueError(f"dimension mismatch: {x.shape[0]} vs {self.dim_in}")
        return self.matrix @ x

    def adjoint(self, y):
        y = as_vector(y)
        if y.shape[0] != self.dim_out:
            raise ValueError(f"dimension mismatch: {y.shape[0]} vs {self.dim_out}")
        return self.matrix.T @ y

    def __call__(self, x):
        return self.apply(x)


def operator_library():
    """Catalog of operator constructors keyed by config tag."""
    return {
        "quadratic": Quadratic,
        "l1": L1,
        "box": BoxNormalCone,
        "ball": BallNormalCone,
        "zero": Zero,
        "linear_psd": LinearMonotone,
    }


def operator_from_config(doc):
    """Build an operator from ``{"tag": ..., <params>}`` as used in JSON configs."""
    if not isinstance(doc, dict) or "tag" not in doc:
        raise ValueError(f"operator config must be an object with a 'tag', got {doc!r}")
    params = {k: v for k, v in doc.items() if k != "tag"}
    library = operator_library()
    tag = doc["tag"]
    if tag not in library:
        raise ValueError(f"unknown operator tag {tag!r}; known: {sorted(library)}")
    try:
        return library[tag](**params)
    except TypeError as exc:
        raise ValueError(f"bad parameters for operator {tag!r}: {exc}") from exc
