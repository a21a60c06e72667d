"""Euler trajectories, the discrete best-approximation scheme, and the solve loop.

The continuous system is the autonomous flow ``x' = F(x)`` with
``F(x) = Q(w, x, Tx) - x``, where ``Q`` projects the anchor ``w`` onto the
two-cut intersection.  Its explicit Euler discretization with unit step is
exactly the discrete best-approximation iteration

    x_{n+1} = Q(w, x_n, T x_n),

so the integrator and the discrete scheme share one step routine and agree
bit for bit at step size one.
"""

import csv
import warnings
from dataclasses import dataclass

import numpy as np

from .geometry import (
    Cap,
    INSIDE_DHAT,
    OUTSIDE,
    cap_membership,
    haugazeau_projection,
)
from .space import PDPoint, as_vector
from .splitting import kt_apply_flat

__all__ = [
    "VectorField",
    "Trajectory",
    "NonFiniteError",
    "euler_nodes",
    "euler_eval",
    "euler_defect",
    "projection_field",
    "build_field",
    "best_approx_iterate",
    "solve",
    "integrate_field",
]


class NonFiniteError(RuntimeError):
    """An iterate or field value stopped being finite."""


@dataclass(frozen=True, eq=False)
class VectorField:
    """Autonomous field ``x -> F(x)`` on flat vectors.

    ``cap`` is the declared admissible region, ``bound`` a known sup of
    ``||F||`` on it (both optional).  For relaxation fields of the form
    ``F = G - Id``, ``target`` exposes ``G`` so that a unit Euler step can
    land exactly on ``G(x)`` instead of computing ``x + (G(x) - x)``.
    """

    fn: callable
    dim: int
    cap: Cap = None
    bound: float = None
    target: callable = None

    def __call__(self, x):
        return self.fn(x)


@dataclass(eq=False)
class Trajectory:
    """Ordered iterate records with per-step diagnostics.

    ``index`` holds the iteration counter for the discrete scheme and the
    time for Euler runs.  ``fejer_slack`` is NaN when no reference solution
    is attached.
    """

    index: np.ndarray
    points: np.ndarray
    norm_to_w: np.ndarray
    fejer_slack: np.ndarray
    residual: np.ndarray
    step_norm: np.ndarray
    termination: str
    mode: str
    lam: float = None
    label: str = ""

    @property
    def final(self):
        return self.points[-1]

    @property
    def iterations(self):
        return self.points.shape[0] - 1

    def summary(self):
        return {
            "label": self.label,
            "mode": self.mode,
            "lambda": self.lam,
            "termination": self.termination,
            "iterations": self.iterations,
            "final_point": self.final.tolist(),
            "final_residual": float(self.residual[-1]),
            "final_norm_to_w": float(self.norm_to_w[-1]),
        }

    def write_csv(self, path):
        """Write records as CSV with round-trip-safe float formatting."""
        dim = self.points.shape[1]
        header = (
            ["n_or_t"]
            + [f"x_{i}" for i in range(dim)]
            + ["norm_to_w", "fejer_slack", "residual", "step_norm"]
        )
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for k in range(self.points.shape[0]):
                row = (
                    [self.index[k]]
                    + list(self.points[k])
                    + [
                        self.norm_to_w[k],
                        self.fejer_slack[k],
                        self.residual[k],
                        self.step_norm[k],
                    ]
                )
                writer.writerow([f"{val:.17g}" for val in row])


def euler_nodes(F, x0, lam, n_steps, check_cap=True):
    """Euler recursion nodes ``c_0 = x0``, ``c_{k+1} = c_k + lam F(c_k)``.

    ``lam`` must lie in (0, 1].  When the field declares a cap and
    ``check_cap`` is set, nodes are classified against it and a warning is
    emitted the first time one leaves; under the segment-invariance
    assumption on the field this cannot happen, so the warning flags either
    a field violating that assumption or numerical trouble.

    Returns an array of shape ``(n_steps + 1, dim)``.
    """
    if not 0.0 < lam <= 1.0:
        raise ValueError(f"step size must lie in (0, 1], got {lam}")
    x0 = as_vector(x0)
    nodes = np.empty((n_steps + 1, x0.shape[0]))
    nodes[0] = x0
    cap = getattr(F, "cap", None) if check_cap else None
    # the floor exclusion only binds for runs started inside the admissible
    # cap; the discrete scheme legitimately starts at the anchor below it
    floor_binds = cap is not None and cap_membership(cap, x0) == INSIDE_DHAT
    warned = False
    use_target = lam == 1.0 and getattr(F, "target", None) is not None
    for k in range(n_steps):
        if use_target:
            nodes[k + 1] = F.target(nodes[k])
        else:
            fx = as_vector(F(nodes[k]))
            nodes[k + 1] = nodes[k] + lam * fx
        if not np.all(np.isfinite(nodes[k + 1])):
            raise NonFiniteError(f"euler node {k + 1} is not finite")
        if cap is not None and not warned:
            membership = cap_membership(cap, nodes[k + 1])
            if membership == OUTSIDE or (floor_binds and membership != INSIDE_DHAT):
                warnings.warn(
                    f"euler node {k + 1} left the admissible cap", RuntimeWarning
                )
                warned = True
    return nodes


def euler_eval(nodes, lam, t, t0=0.0):
    """Piecewise-affine trajectory value at time ``t``.

    On the segment ``[t0 + k lam, t0 + (k+1) lam]`` the trajectory is
    ``c_k + (t - t0 - k lam) F(c_k)``; node times are reproduced exactly.
    """
    nodes = np.asarray(nodes, dtype=float)
    n_steps = nodes.shape[0] - 1
    s = (t - t0) / lam
    if s < 0.0 or s > n_steps + 1e-12:
        raise ValueError(f"time {t} outside [{t0}, {t0 + n_steps * lam}]")
    k = min(int(np.floor(s)), n_steps - 1)
    frac = s - k
    return nodes[k] + frac * (nodes[k + 1] - nodes[k])


def euler_defect(F, nodes, lam, t, t0=0.0):
    """Defect ``F(c_k) - F(c(t))`` of the affine interpolant at time ``t``.

    This is the difference between the trajectory's slope and the field
    along it; by convention it is zero at the knots, and its sup over the
    interval shrinks to zero with ``lam`` for uniformly continuous fields.
    """
    nodes = np.asarray(nodes, dtype=float)
    n_steps = nodes.shape[0] - 1
    s = (t - t0) / lam
    if s < -1e-12 or s > n_steps + 1e-12:
        raise ValueError(f"time {t} outside [{t0}, {t0 + n_steps * lam}]")
    if abs(s - round(s)) < 1e-12:
        return np.zeros(nodes.shape[1])
    k = min(int(np.floor(s)), n_steps - 1)
    slope = (nodes[k + 1] - nodes[k]) / lam
    return slope - as_vector(F(euler_eval(nodes, lam, t, t0)))


def _kt_projection_step(inst, x_flat, w_flat=None):
    """One discrete-scheme step from a flat vector: returns (Q, residual at x)."""
    if w_flat is None:
        w_flat = inst.w.flat
    tx_flat, resid = kt_apply_flat(inst, x_flat)
    q = haugazeau_projection(w_flat, x_flat, tx_flat)
    return q, resid


def projection_field(T, w, cap=None):
    """Flow field ``F(x) = Q(w, x, T x) - x`` for a fixed-point operator ``T``.

    ``T`` acts on flat vectors.  The returned field carries ``target`` so a
    unit Euler step reproduces the projection output exactly.
    """
    w = as_vector(w)

    def target(x):
        x = as_vector(x)
        return haugazeau_projection(w, x, as_vector(T(x)))

    bound = None
    if cap is not None:
        bound = 2.0 * cap.radius
    return VectorField(
        fn=lambda x: target(x) - as_vector(x),
        dim=w.shape[0],
        cap=cap,
        bound=bound,
        target=target,
    )


def build_field(inst, cap=None):
    """The instance's flow field ``F(x) = Q(w, x, Tx) - x`` over flat vectors."""
    w_flat = inst.w.flat

    def target(x):
        q, _ = _kt_projection_step(inst, as_vector(x), w_flat)
        return q

    bound = 2.0 * cap.radius if cap is not None else None
    return VectorField(
        fn=lambda x: target(x) - as_vector(x),
        dim=inst.dim,
        cap=cap,
        bound=bound,
        target=target,
    )


def best_approx_iterate(inst, x):
    """One step of the discrete scheme: ``Q(w, x, Tx)``.

    ``x`` may be a PDPoint or a flat vector; the result matches the input
    kind.  Off-cap starts are legal input here but make the scheme's
    containment guarantees void.
    """
    if isinstance(x, PDPoint):
        q, _ = _kt_projection_step(inst, x.flat)
        return PDPoint.from_flat(q, inst.dim_p)
    q, _ = _kt_projection_step(inst, as_vector(x))
    return q


def _make_trajectory(records, termination, mode, lam, label):
    cols = np.array(records)
    return Trajectory(
        index=cols[:, 0].copy(),
        points=cols[:, 1:-4].copy(),
        norm_to_w=cols[:, -4].copy(),
        fejer_slack=cols[:, -3].copy(),
        residual=cols[:, -2].copy(),
        step_norm=cols[:, -1].copy(),
        termination=termination,
        mode=mode,
        lam=lam,
        label=label,
    )


def solve(
    inst,
    mode="discrete",
    lam=None,
    max_iter=100_000,
    tol_residual=1e-9,
    tol_step=1e-12,
    z=None,
    label="",
):
    """Run the best-approximation iteration (or its Euler relaxation) on an instance.

    Parameters
    ----------
    inst : ProblemInstance
    mode : {"discrete", "euler"}
        ``"discrete"`` iterates ``x_{n+1} = Q(w, x_n, T x_n)``; ``"euler"``
        relaxes each step to ``x + lam (Q - x)`` with ``lam`` in (0, 1].
        At ``lam = 1`` the Euler step evaluates the projection directly, so
        the two modes produce identical trajectories.
    lam : float, optional
        Euler step size, required for ``mode="euler"``.
    max_iter : int
        Iteration budget.
    tol_residual : float
        Stop once the fixed-point residual ``||Tx - x||`` falls below this.
    tol_step : float
        Stop once the iterate displacement falls below this.
    z : array_like, optional
        Known solution; enables the Fejer-slack column of the records.
    label : str
        Carried into the trajectory metadata.

    Returns
    -------
    Trajectory
        Termination reason is ``"residual"``, ``"step"`` or ``"max_iter"``.

    Raises
    ------
    EmptyIntersectionError
        Projection breakdown (the iteration left the admissible region).
    NonFiniteError
        An iterate stopped being finite.
    """
    if mode not in ("discrete", "euler"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "euler":
        if lam is None or not 0.0 < lam <= 1.0:
            raise ValueError(f"euler mode needs a step size in (0, 1], got {lam}")
    if max_iter <= 0 or tol_residual <= 0 or tol_step <= 0:
        raise ValueError("stop criteria must be strictly positive")

    w_flat = inst.w.flat
    z_flat = None if z is None else as_vector(z)
    zw_sq = None if z_flat is None else float(np.sum((w_flat - z_flat) ** 2))

    def diag_row(idx, x, resid, step):
        dist_w = float(np.linalg.norm(x - w_flat))
        if z_flat is None:
            slack = np.nan
        else:
            slack = zw_sq - dist_w**2 - float(np.sum((x - z_flat) ** 2))
        return [idx, *x, dist_w, slack, resid, step]

    x = inst.x0.flat
    prev = None
    records = []
    n = 0
    while True:
        q, resid = _kt_projection_step(inst, x, w_flat)
        idx = float(n) if mode == "discrete" else n * lam
        step_size = 0.0 if prev is None else float(np.linalg.norm(x - prev))
        records.append(diag_row(idx, x, resid, step_size))
        if resid <= tol_residual:
            termination = "residual"
            break
        if prev is not None and step_size <= tol_step:
            termination = "step"
            break
        if n >= max_iter:
            termination = "max_iter"
            break
        # lam = 1 collapses the relaxed step to the projection itself; taking
        # it directly keeps euler(1) and discrete bit-identical.
        x_next = q if (mode == "discrete" or lam == 1.0) else x + lam * (q - x)
        if not np.all(np.isfinite(x_next)):
            raise NonFiniteError(f"iterate {n + 1} is not finite")
        prev, x, n = x, x_next, n + 1
    return _make_trajectory(records, termination, mode, lam, label)


def integrate_field(F, x0, lam, t_final, t0=0.0, cap=None, z=None, label=""):
    """Euler-integrate a raw field on ``[t0, t_final]`` and record diagnostics.

    The residual column holds ``||F(x)||`` (stationarity measure).  ``cap``
    overrides the field's declared cap for the Fejer/distance columns; when
    neither provides anchors those columns are NaN.
    """
    if t_final <= t0:
        raise ValueError("t_final must exceed t0")
    cap = cap if cap is not None else getattr(F, "cap", None)
    n_steps = int(np.ceil((t_final - t0) / lam - 1e-12))
    nodes = euler_nodes(F, x0, lam, n_steps)

    w_flat = cap.w if cap is not None else None
    z_flat = as_vector(z) if z is not None else (cap.z if cap is not None else None)
    records = []
    for k in range(n_steps + 1):
        x = nodes[k]
        fx = as_vector(F(x))
        dist_w = np.nan if w_flat is None else float(np.linalg.norm(x - w_flat))
        if w_flat is None or z_flat is None:
            slack = np.nan
        else:
            slack = float(
                np.sum((w_flat - z_flat) ** 2)
                - np.sum((w_flat - x) ** 2)
                - np.sum((x - z_flat) ** 2)
            )
        step = 0.0 if k == 0 else float(np.linalg.norm(nodes[k] - nodes[k - 1]))
        records.append([t0 + k * lam, *x, dist_w, slack, float(np.linalg.norm(fx)), step])
    return _make_trajectory(records, "t_final", "euler", lam, label)
