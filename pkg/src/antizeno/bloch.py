"""Qubit states on the Bloch ball and the equal-angle measurement geodesic.

For a qubit, ``rho = (I + b.sigma)/2`` identifies states with vectors ``b``
in the unit ball, and the non-selective measurement of the direction ``w``
acts as the projection ``b -> (b.w) w``.  Steering a pure state ``a0``
toward a target direction ``w_T`` with ``n`` measurements, the best plan
places the measured directions on the great circle from ``a0`` to ``w_T``
at equal angular steps ``Theta/n`` (``Theta`` the angle between the
endpoints), finishing with a measurement of the target itself; it reaches
objective ``(1 + cos^n(Theta/n))/2``, which tends to 1 as ``n`` grows.
That closed form is constructed here and machine-checked against the
numerical optimizers in the test suite rather than trusted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .quantum import DensityMatrix, HermitianOperator

__all__ = [
    "BALL_ATOL",
    "UNIT_ATOL",
    "BlochVector",
    "QubitPlan",
    "bloch_to_rho",
    "rho_to_bloch",
    "projector_from_direction",
    "measure_bloch",
    "qubit_objective",
    "analytic_optimal_sequence",
    "direction_angles",
    "direction_from_angles",
]

#: Slack admitted when checking that a state vector lies inside the ball.
BALL_ATOL = 1e-9
#: Slack admitted when checking that a direction vector has unit norm.
UNIT_ATOL = 1e-9


@dataclass(frozen=True)
class BlochVector:
    """A point of (or direction in) the Bloch ball."""

    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        # Keep components as plain floats so downstream serialization never
        # sees numpy scalars.
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "z", float(self.z))

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def dot(self, other: "BlochVector") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


def as_bloch(v) -> BlochVector:
    """Coerce a BlochVector or length-3 sequence of reals to a BlochVector."""
    if isinstance(v, BlochVector):
        return v
    try:
        x, y, z = (float(c) for c in v)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"expected a Bloch 3-vector, got {v!r}") from exc
    if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(z)):
        raise ValidationError(f"Bloch vector has non-finite components: {v!r}")
    return BlochVector(x, y, z)


def _require_state(v) -> BlochVector:
    b = as_bloch(v)
    if b.norm() > 1.0 + BALL_ATOL:
        raise ValidationError(
            f"Bloch state vector has norm {b.norm():.12g} > 1 (not a state)"
        )
    return b


def _require_direction(v) -> BlochVector:
    w = as_bloch(v)
    if abs(w.norm() - 1.0) > UNIT_ATOL:
        raise ValidationError(
            f"direction must have unit norm, got norm {w.norm():.12g}"
        )
    return w


@dataclass(frozen=True)
class QubitPlan:
    """A measurement-direction sequence with its predicted state trajectory.

    ``predicted_states[i]`` is the Bloch vector after measuring
    ``directions[i]``; the state norms never increase along the sequence.
    """

    directions: tuple[BlochVector, ...]
    predicted_states: tuple[BlochVector, ...]
    objective: float

    def __post_init__(self) -> None:
        if len(self.directions) != len(self.predicted_states):
            raise ValidationError(
                f"plan has {len(self.directions)} directions but "
                f"{len(self.predicted_states)} predicted states"
            )
        previous = None
        for w, b in zip(self.directions, self.predicted_states):
            _require_direction(w)
            norm = b.norm()
            if norm > 1.0 + BALL_ATOL:
                raise ValidationError(
                    f"predicted state leaves the Bloch ball (norm {norm:.12g})"
                )
            if previous is not None and norm > previous + 1e-12:
                raise ValidationError(
                    "predicted state norms must be non-increasing: "
                    f"{norm:.12g} follows {previous:.12g}"
                )
            previous = norm

    @property
    def n(self) -> int:
        return len(self.directions)


def bloch_to_rho(b) -> DensityMatrix:
    """Density matrix ``(I + b.sigma)/2`` of a Bloch vector inside the ball."""
    vec = _require_state(b)
    matrix = 0.5 * np.array(
        [
            [1.0 + vec.z, vec.x - 1j * vec.y],
            [vec.x + 1j * vec.y, 1.0 - vec.z],
        ],
        dtype=np.complex128,
    )
    return DensityMatrix(matrix)


def rho_to_bloch(rho: DensityMatrix) -> BlochVector:
    """Bloch vector of a qubit state (inverse of :func:`bloch_to_rho`)."""
    if rho.dim != 2:
        raise ValidationError(f"Bloch coordinates need dim 2, got dim {rho.dim}")
    m = rho.matrix
    return BlochVector(
        2.0 * m[1, 0].real,
        2.0 * m[1, 0].imag,
        (m[0, 0] - m[1, 1]).real,
    )


def projector_from_direction(w) -> HermitianOperator:
    """Rank-one projector ``(I + w.sigma)/2`` onto the +1 axis of ``w``."""
    vec = _require_direction(w)
    matrix = 0.5 * np.array(
        [
            [1.0 + vec.z, vec.x - 1j * vec.y],
            [vec.x + 1j * vec.y, 1.0 - vec.z],
        ],
        dtype=np.complex128,
    )
    return HermitianOperator(matrix)


def measure_bloch(b, w) -> BlochVector:
    """Non-selective measurement of direction ``w``: ``b -> (b.w) w``.

    Agrees with conjugating the full matrix channel by the Bloch maps; the
    state is projected onto the measured axis, so its norm never grows.
    """
    state = _require_state(b)
    axis = _require_direction(w)
    d = state.dot(axis)
    return BlochVector(d * axis.x, d * axis.y, d * axis.z)


def qubit_objective(a0, w_target, directions) -> float:
    """Objective ``(1 + b_n . w_T)/2`` after measuring ``directions`` in order.

    Equals ``Tr[rho_final O]`` for the target operator
    ``O = (I + w_T.sigma)/2`` and is invariant under appending a final
    measurement of ``w_T`` itself.
    """
    b = _require_state(a0)
    wt = _require_direction(w_target)
    for w in directions:
        b = measure_bloch(b, w)
    return 0.5 * (1.0 + b.dot(wt))


def direction_from_angles(theta: float, phi: float) -> BlochVector:
    """Unit vector at polar angle ``theta`` and azimuth ``phi``."""
    st = math.sin(theta)
    return BlochVector(st * math.cos(phi), st * math.sin(phi), math.cos(theta))


def direction_angles(w) -> tuple[float, float]:
    """Polar/azimuth angles of a direction, ``theta in [0, pi]``, ``phi in [0, 2pi)``."""
    vec = _require_direction(w)
    theta = math.acos(max(-1.0, min(1.0, vec.z / vec.norm())))
    if abs(vec.x) < 1e-15 and abs(vec.y) < 1e-15:
        return theta, 0.0
    phi = math.atan2(vec.y, vec.x)
    if phi < 0.0:
        phi += 2.0 * math.pi
    if phi >= 2.0 * math.pi:
        phi = 0.0
    return theta, phi


def _orthonormal_in_plane(a0: BlochVector, hint: BlochVector | None) -> BlochVector:
    """Unit vector orthogonal to ``a0`` inside the plane selected by ``hint``."""
    candidates = (
        [hint]
        if hint is not None
        else [BlochVector(1.0, 0.0, 0.0), BlochVector(0.0, 1.0, 0.0)]
    )
    for cand in candidates:
        proj = cand.dot(a0)
        rx = cand.x - proj * a0.x
        ry = cand.y - proj * a0.y
        rz = cand.z - proj * a0.z
        rn = math.sqrt(rx * rx + ry * ry + rz * rz)
        if rn > 1e-9:
            return BlochVector(rx / rn, ry / rn, rz / rn)
    raise ValidationError(
        "plane_hint is colinear with the initial direction and does not "
        "select a great circle"
    )


def analytic_optimal_sequence(a0, w_target, n: int, plane_hint=None) -> QubitPlan:
    """Equal-angle geodesic plan steering ``a0`` toward ``w_target``.

    Places ``n`` measurement directions on the great circle through ``a0``
    and ``w_target`` at angles ``i * Theta / n`` from ``a0``
    (``Theta = arccos(a0 . w_target)``), so the last direction is the target
    itself.  The predicted states are ``b_i = cos(Theta/n)**i * w_i`` and the
    final objective is ``(1 + cos(Theta/n)**n) / 2``.

    Parameters
    ----------
    a0 : BlochVector or 3-sequence
        Initial pure state direction (unit norm).
    w_target : BlochVector or 3-sequence
        Target direction (unit norm).
    n : int
        Number of measurements, ``n >= 1``.
    plane_hint : BlochVector or 3-sequence, optional
        Selects the great circle when the endpoints are antipodal (where
        every plane through them is a geodesic); defaults to the plane
        containing the x axis (falling back to the y axis when ``a0`` is
        the x axis).  Ignored for non-degenerate endpoints.

    Returns
    -------
    QubitPlan
        Directions, predicted Bloch trajectory, and closed-form objective.
    """
    start = _require_direction(a0)
    target = _require_direction(w_target)
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValidationError(f"number of measurements must be an integer >= 1, got {n!r}")
    hint = as_bloch(plane_hint) if plane_hint is not None else None

    dot = max(-1.0, min(1.0, start.dot(target)))
    theta_total = math.acos(dot)

    rx = target.x - dot * start.x
    ry = target.y - dot * start.y
    rz = target.z - dot * start.z
    rn = math.sqrt(rx * rx + ry * ry + rz * rz)
    if rn > 1e-9:
        e2 = BlochVector(rx / rn, ry / rn, rz / rn)
    else:
        # Aligned or antipodal endpoints: the residual cannot select the
        # circle, so fall back to the hint machinery.
        e2 = _orthonormal_in_plane(start, hint)

    step = theta_total / n
    shrink = math.cos(step)
    directions = []
    states = []
    radius = 1.0
    for i in range(1, n + 1):
        angle = i * step
        ca = math.cos(angle)
        sa = math.sin(angle)
        w = BlochVector(
            ca * start.x + sa * e2.x,
            ca * start.y + sa * e2.y,
            ca * start.z + sa * e2.z,
        )
        radius *= shrink
        directions.append(w)
        states.append(BlochVector(radius * w.x, radius * w.y, radius * w.z))
    objective = 0.5 * (1.0 + shrink**n)
    return QubitPlan(tuple(directions), tuple(states), objective)
