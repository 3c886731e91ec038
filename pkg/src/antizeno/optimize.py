"""Derivative-free maximization of measured-observable objectives.

Decision variables are the measured observables of a plan — spherical
angle pairs ``(theta_i, phi_i)`` for qubits, Givens-angle-parameterized
eigenbases for higher dimensions (experimental) — and, for the joint
problem, piecewise-constant control amplitudes applied between
measurements.  The search is coordinate-wise ascent: each coordinate is
improved by a coarse scan of its domain followed by golden-section
refinement, repeated in sweeps until the relative improvement drops below
a tolerance, restarted from several seeded random initializations.

By default plans *pin the final measurement to the target observable*
(``pin_final=True``): the sequence ends by measuring the target itself,
which models steering protocols that terminate in a verification
measurement and never changes the objective, since measuring ``O``
immediately before reading out ``Tr[rho O]`` is the identity on the
expectation.  With ``pin_final=False`` all ``n`` observables are free;
the unconstrained optimum is generally higher because the final
alignment factor can be traded against the intermediate ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .bloch import direction_angles, direction_from_angles, rho_to_bloch
from .errors import ResourceLimitError, ValidationError
from .quantum import (
    DensityMatrix,
    HermitianOperator,
    SystemModel,
    apply_measurement,
    evolve_unitary,
    expectation,
    spectral_decompose,
)

__all__ = [
    "MeasurementPlan",
    "ControlSchedule",
    "ObjectiveSpec",
    "OptimizerConfig",
    "OptimizationResult",
    "evaluate_objective",
    "pipeline_states",
    "optimize_measurements",
    "optimize_joint",
    "brute_force_grid",
]

_TWO_PI = 2.0 * math.pi
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

# Coarse-scan densities for the coordinate sweeps.  The theta slice of the
# qubit objective is a single sinusoid in 2*theta, the phi slice mixes phi
# and 2*phi harmonics, so a modest scan brackets the global slice maximum.
_THETA_STEPS = 12
_PHI_STEPS = 16
_AMP_STEPS = 32
_ANGLE_GOLDEN_TOL = 1e-8
_AMP_GOLDEN_TOL = 1e-8


@dataclass(frozen=True)
class MeasurementPlan:
    """An ordered sequence of measured observables.

    Qubit plans store spherical angle pairs ``(theta, phi)`` with
    ``theta in [0, pi]`` and ``phi in [0, 2*pi)``; higher-dimensional plans
    store explicit Hermitian observables.  Exactly one representation is
    set; the other is ``None``.
    """

    angles: tuple[tuple[float, float], ...] | None = None
    observables: tuple[HermitianOperator, ...] | None = None

    def __post_init__(self) -> None:
        if (self.angles is None) == (self.observables is None):
            raise ValidationError(
                "exactly one of angles/observables must be given"
            )
        if self.angles is not None:
            canon = []
            for pair in self.angles:
                theta, phi = (float(a) for a in pair)
                if not (math.isfinite(theta) and math.isfinite(phi)):
                    raise ValidationError(f"non-finite angle pair {pair!r}")
                if theta < -1e-12 or theta > math.pi + 1e-12:
                    raise ValidationError(
                        f"polar angle {theta!r} outside [0, pi]"
                    )
                if phi < 0.0 or phi >= _TWO_PI:
                    raise ValidationError(
                        f"azimuth {phi!r} outside [0, 2*pi)"
                    )
                canon.append((theta, phi))
            object.__setattr__(self, "angles", tuple(canon))
        else:
            obs = tuple(self.observables)
            if obs and any(o.dim != obs[0].dim for o in obs):
                raise ValidationError("plan observables have mixed dimensions")
            object.__setattr__(self, "observables", obs)

    @property
    def n(self) -> int:
        if self.angles is not None:
            return len(self.angles)
        return len(self.observables)

    def directions(self):
        """Measured Bloch directions of a qubit plan."""
        if self.angles is None:
            raise ValidationError("plan stores explicit observables, not angles")
        return tuple(direction_from_angles(t, p) for t, p in self.angles)

    def to_observables(self) -> tuple[HermitianOperator, ...]:
        """The plan as explicit observables (projectors for qubit plans)."""
        if self.observables is not None:
            return self.observables
        from .bloch import projector_from_direction

        return tuple(projector_from_direction(w) for w in self.directions())

    @classmethod
    def from_directions(cls, directions) -> "MeasurementPlan":
        """Build a qubit plan from unit Bloch vectors."""
        return cls(angles=tuple(direction_angles(w) for w in directions))


@dataclass(frozen=True)
class ControlSchedule:
    """Piecewise-constant control for one inter-measurement gap."""

    amplitudes: tuple[float, ...]
    dt: float

    def __post_init__(self) -> None:
        amps = tuple(float(u) for u in self.amplitudes)
        if len(amps) < 1:
            raise ValidationError("control schedule needs at least one segment")
        if any(not math.isfinite(u) for u in amps):
            raise ValidationError(f"non-finite control amplitude in {amps!r}")
        if not (math.isfinite(self.dt) and self.dt >= 0.0):
            raise ValidationError(f"segment duration must be >= 0, got {self.dt!r}")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "dt", float(self.dt))

    @property
    def segment_count(self) -> int:
        return len(self.amplitudes)


@dataclass(frozen=True)
class ObjectiveSpec:
    """Initial state, target operator, and (optionally) a control model."""

    initial_state: DensityMatrix
    target_operator: HermitianOperator
    model: SystemModel | None = None

    def __post_init__(self) -> None:
        if self.initial_state.dim != self.target_operator.dim:
            raise ValidationError(
                f"dimension mismatch: initial_state has dim "
                f"{self.initial_state.dim}, target has dim {self.target_operator.dim}"
            )
        if self.model is not None and self.model.dim != self.initial_state.dim:
            raise ValidationError(
                f"dimension mismatch: model has dim {self.model.dim}, "
                f"state has dim {self.initial_state.dim}"
            )

    @property
    def dim(self) -> int:
        return self.initial_state.dim


@dataclass(frozen=True)
class OptimizerConfig:
    """Optimizer settings with reproducible defaults."""

    tolerance: float = 1e-9
    max_iters: int = 10000
    seed: int = 0
    multi_starts: int = 8
    grid_points: int = 32
    u_max: float = 10.0
    eval_cap: int = 100_000_000

    def __post_init__(self) -> None:
        if not (self.tolerance > 0.0 and math.isfinite(self.tolerance)):
            raise ValidationError(f"tolerance must be positive, got {self.tolerance!r}")
        if self.max_iters < 1:
            raise ValidationError(f"max_iters must be >= 1, got {self.max_iters!r}")
        if self.multi_starts < 1:
            raise ValidationError(f"multi_starts must be >= 1, got {self.multi_starts!r}")
        if self.grid_points < 2:
            raise ValidationError(f"grid_points must be >= 2, got {self.grid_points!r}")
        if not (self.u_max > 0.0 and math.isfinite(self.u_max)):
            raise ValidationError(f"u_max must be positive, got {self.u_max!r}")
        if self.eval_cap < 1:
            raise ValidationError(f"eval_cap must be >= 1, got {self.eval_cap!r}")


@dataclass(frozen=True)
class OptimizationResult:
    """Outcome of an optimization run.

    ``trace`` records ``(iteration, running best value)`` pairs and is
    non-decreasing in the value; ``best_value`` is reproducible by
    re-evaluating ``best_plan`` (and ``best_controls``) with
    :func:`evaluate_objective`.
    """

    best_plan: MeasurementPlan
    best_value: float
    evaluations: int
    converged: bool
    trace: tuple[tuple[int, float], ...]
    best_controls: tuple[ControlSchedule, ...] | None = None


# ---------------------------------------------------------------------------
# Objective evaluation (reference matrix pipeline)


def _check_controls(n: int, controls, model) -> None:
    if controls is None:
        return
    if model is None:
        raise ValidationError("controls supplied but the spec has no model")
    if len(controls) != n + 1:
        raise ValidationError(
            f"need one control schedule per gap: expected {n + 1} "
            f"for {n} measurements, got {len(controls)}"
        )


def pipeline_states(spec: ObjectiveSpec, plan: MeasurementPlan, controls=None):
    """States along the composed evolution, one per trajectory step.

    Returns ``n + 1`` states: the state after the leading control gap
    (step 0, equal to the initial state when there are no controls), then
    the state after each measurement/gap pair.
    """
    observables = plan.to_observables()
    if observables and observables[0].dim != spec.dim:
        raise ValidationError(
            f"dimension mismatch: plan observables have dim "
            f"{observables[0].dim}, spec has dim {spec.dim}"
        )
    _check_controls(len(observables), controls, spec.model)

    def run_gap(state: DensityMatrix, gap: int) -> DensityMatrix:
        if controls is None:
            return state
        schedule = controls[gap]
        for u in schedule.amplitudes:
            state = evolve_unitary(state, spec.model, u, schedule.dt)
        return state

    states = []
    rho = run_gap(spec.initial_state, 0)
    states.append(rho)
    for i, q in enumerate(observables):
        rho = apply_measurement(rho, q)
        rho = run_gap(rho, i + 1)
        states.append(rho)
    return tuple(states)


def evaluate_objective(spec: ObjectiveSpec, plan: MeasurementPlan, controls=None) -> float:
    """Objective ``Tr[rho_final O]`` for a plan (and optional controls).

    The composition applies the leading control gap, then alternates
    measurements and gaps, so ``n`` measurements come with ``n + 1``
    control schedules.  Without controls this reduces to the bare
    measurement sequence.
    """
    states = pipeline_states(spec, plan, controls)
    return expectation(states[-1], spec.target_operator)


# ---------------------------------------------------------------------------
# Qubit target decomposition


def _target_affine(spec: ObjectiveSpec):
    """Write ``Tr[rho O] = c + s * (2*K - 1)`` with ``K`` the Bloch objective.

    ``O = c*I + v.sigma`` gives ``Tr[rho O] = c + b.v``; ``K`` is the
    kernel value ``(1 + b.v_hat)/2``, so maximizing ``K`` maximizes the
    objective whenever ``s = |v| > 0``.
    """
    o = spec.target_operator.matrix
    c = 0.5 * (o[0, 0] + o[1, 1]).real
    vx = o[1, 0].real
    vy = o[1, 0].imag
    vz = 0.5 * (o[0, 0] - o[1, 1]).real
    s = math.sqrt(vx * vx + vy * vy + vz * vz)
    if s < 1e-12:
        raise ValidationError(
            "target operator is proportional to the identity; "
            "the objective does not depend on the measurements"
        )
    return c, s, (vx / s, vy / s, vz / s)


def _canonical_pair(theta: float, phi: float) -> tuple[float, float]:
    theta = math.fmod(theta, _TWO_PI)
    if theta < 0.0:
        theta += _TWO_PI
    if theta > math.pi:
        theta = _TWO_PI - theta
        phi += math.pi
    phi = math.fmod(phi, _TWO_PI)
    if phi < 0.0:
        phi += _TWO_PI
    if phi >= _TWO_PI:
        phi = 0.0
    return theta, phi


def _affine_value(c: float, s: float, kernel_value: float) -> float:
    return c + s * (2.0 * kernel_value - 1.0)


# ---------------------------------------------------------------------------
# Generic scalar maximizer (Python mirror of the kernel coordinate step)


def _improve_scalar(f, t_cur, f_cur, lo, hi, steps, wrap, gtol):
    """Coarse scan plus golden-section refinement of ``f`` on one coordinate.

    Returns ``(t_best, f_best, evaluations)`` with ``f_best >= f_cur``.
    """
    best_t = t_cur
    best_f = f_cur
    h = (hi - lo) / steps
    npts = steps if wrap else steps + 1
    for j in range(npts):
        t = lo + h * j
        ft = f(t)
        if ft > best_f:
            best_t = t
            best_f = ft
    a = best_t - h
    b = best_t + h
    if not wrap:
        a = max(a, lo)
        b = min(b, hi)
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1 = f(x1)
    f2 = f(x2)
    evals = npts + 2
    if f1 > best_f:
        best_t, best_f = x1, f1
    if f2 > best_f:
        best_t, best_f = x2, f2
    while (b - a) > gtol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
            evals += 1
            if f2 > best_f:
                best_t, best_f = x2, f2
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
            evals += 1
            if f1 > best_f:
                best_t, best_f = x1, f1
    return best_t, best_f, evals


def _relative_gain(new: float, old: float) -> float:
    return (new - old) / max(abs(old), 1e-12)


# ---------------------------------------------------------------------------
# Qubit measurement-only optimizer (kernel-backed)


def _optimize_qubit_directions(spec, m, cfg):
    """Multi-start coordinate ascent over ``m`` free qubit directions.

    Returns ``(kernel_value, thetas, phis, evaluations, converged, trace)``
    where ``trace`` holds the running best kernel value per sweep.
    """
    b0 = rho_to_bloch(spec.initial_state)
    _, _, wt = _target_affine(spec)
    a0x, a0y, a0z = b0.x, b0.y, b0.z
    wtx, wty, wtz = wt

    evaluations = 0
    trace = []
    if m == 0:
        empty = np.empty(0, dtype=np.float64)
        value = _kernels.qubit_fold(a0x, a0y, a0z, wtx, wty, wtz, empty, empty)
        return value, empty, empty, 1, True, [(0, value)]

    rng = np.random.default_rng(cfg.seed)
    best_value = -np.inf
    best_thetas = None
    best_phis = None
    best_converged = False
    sweep_counter = 0
    running = -np.inf
    for _ in range(cfg.multi_starts):
        thetas = np.arccos(rng.uniform(-1.0, 1.0, size=m))
        phis = rng.uniform(0.0, _TWO_PI, size=m)
        previous = -np.inf
        converged = False
        for _ in range(cfg.max_iters):
            value, ev = _kernels.sweep_pass(
                a0x, a0y, a0z, wtx, wty, wtz, thetas, phis,
                _THETA_STEPS, _PHI_STEPS, _ANGLE_GOLDEN_TOL,
            )
            evaluations += ev
            sweep_counter += 1
            running = max(running, value)
            trace.append((sweep_counter, running))
            if previous > -np.inf and _relative_gain(value, previous) < cfg.tolerance:
                converged = True
                break
            previous = value
        final = _kernels.qubit_fold(a0x, a0y, a0z, wtx, wty, wtz, thetas, phis)
        evaluations += 1
        if final > best_value:
            best_value = final
            best_thetas = thetas
            best_phis = phis
            best_converged = converged
    return best_value, best_thetas, best_phis, evaluations, best_converged, trace


def _finish_qubit_plan(spec, thetas, phis, pin_final):
    """Canonicalize angles, append the pinned target, and re-evaluate."""
    c, s, wt = _target_affine(spec)
    pairs = [_canonical_pair(t, p) for t, p in zip(thetas, phis)]
    if pin_final:
        pairs.append(direction_angles(wt))
    plan = MeasurementPlan(angles=tuple(pairs))
    th = np.array([t for t, _ in pairs], dtype=np.float64)
    ph = np.array([p for _, p in pairs], dtype=np.float64)
    b0 = rho_to_bloch(spec.initial_state)
    kernel_value = _kernels.qubit_fold(b0.x, b0.y, b0.z, wt[0], wt[1], wt[2], th, ph)
    return plan, _affine_value(c, s, kernel_value)


# ---------------------------------------------------------------------------
# Experimental d > 2 parameterization: observables V D V^dag with V built
# from complex Givens rotations over a fixed distinct diagonal D.


def _givens_pairs(dim: int):
    return [(p, q) for p in range(dim) for q in range(p + 1, dim)]


def _basis_from_angles(dim, thetas, phis):
    v = np.eye(dim, dtype=np.complex128)
    for (p, q), theta, phi in zip(_givens_pairs(dim), thetas, phis):
        g = np.eye(dim, dtype=np.complex128)
        ct = math.cos(theta)
        st = math.sin(theta)
        phase = complex(math.cos(phi), math.sin(phi))
        g[p, p] = ct
        g[q, q] = ct
        g[p, q] = -st * phase.conjugate()
        g[q, p] = st * phase
        v = v @ g
    return v


def _measure_in_basis(rho: np.ndarray, basis: np.ndarray) -> np.ndarray:
    a = basis.conj().T @ rho @ basis
    return (basis * np.diag(a).real) @ basis.conj().T


def _observable_from_basis(basis: np.ndarray) -> HermitianOperator:
    d = basis.shape[0]
    q = (basis * np.arange(d, dtype=np.float64)) @ basis.conj().T
    return HermitianOperator(0.5 * (q + q.conj().T))


def _optimize_general_directions(spec, m, cfg, pinned_projectors):
    """Coordinate ascent over Givens angles for dim > 2 (experimental)."""
    dim = spec.dim
    pairs = _givens_pairs(dim)
    k = len(pairs)
    rho0 = spec.initial_state.matrix
    o = spec.target_operator.matrix

    def value_of(thetas, phis):
        rho = rho0
        for i in range(m):
            basis = _basis_from_angles(dim, thetas[i], phis[i])
            rho = _measure_in_basis(rho, basis)
        if pinned_projectors is not None:
            acc = np.zeros_like(rho)
            for proj in pinned_projectors:
                acc += proj @ rho @ proj
            rho = acc
        return float(np.trace(rho @ o).real)

    evaluations = 0
    trace = []
    if m == 0:
        value = value_of((), ())
        return value, [], [], 1, True, [(0, value)]

    rng = np.random.default_rng(cfg.seed)
    best = (-np.inf, None, None, False)
    sweep_counter = 0
    best_value_running = -np.inf
    for _ in range(cfg.multi_starts):
        thetas = [list(rng.uniform(0.0, _TWO_PI, size=k)) for _ in range(m)]
        phis = [list(rng.uniform(0.0, _TWO_PI, size=k)) for _ in range(m)]
        previous = -np.inf
        converged = False
        current = value_of(thetas, phis)
        evaluations += 1
        for _ in range(cfg.max_iters):
            for i in range(m):
                for j in range(k):
                    for angles in (thetas, phis):
                        def slice_f(t, i=i, j=j, angles=angles):
                            saved = angles[i][j]
                            angles[i][j] = t
                            out = value_of(thetas, phis)
                            angles[i][j] = saved
                            return out

                        t_new, current, ev = _improve_scalar(
                            slice_f, angles[i][j], current,
                            0.0, _TWO_PI, _PHI_STEPS, True, _ANGLE_GOLDEN_TOL,
                        )
                        angles[i][j] = t_new
                        evaluations += ev
            sweep_counter += 1
            best_value_running = max(best_value_running, current)
            trace.append((sweep_counter, best_value_running))
            if previous > -np.inf and _relative_gain(current, previous) < cfg.tolerance:
                converged = True
                break
            previous = current
        if current > best[0]:
            best = (current, [list(t) for t in thetas], [list(p) for p in phis], converged)
    return best[0], best[1], best[2], evaluations, best[3], trace


def _finish_general_plan(spec, thetas, phis, pin_final):
    observables = [
        _observable_from_basis(_basis_from_angles(spec.dim, th, ph))
        for th, ph in zip(thetas, phis)
    ]
    if pin_final:
        observables.append(spec.target_operator)
    plan = MeasurementPlan(observables=tuple(observables))
    return plan, evaluate_objective(spec, plan)


# ---------------------------------------------------------------------------
# Public optimizers


def optimize_measurements(
    spec: ObjectiveSpec,
    n_measurements: int,
    config: OptimizerConfig | None = None,
    *,
    pin_final: bool = True,
) -> OptimizationResult:
    """Maximize the objective over a sequence of measured observables.

    Parameters
    ----------
    spec : ObjectiveSpec
        Initial state and target operator (any model is ignored here).
    n_measurements : int
        Total plan length ``n >= 1``.
    config : OptimizerConfig, optional
        Tolerances, seed, and multi-start count.
    pin_final : bool, optional
        When true (default) the last of the ``n`` measurements is the
        target observable itself and the remaining ``n - 1`` are free;
        when false all ``n`` directions are optimized.

    Returns
    -------
    OptimizationResult
        Deterministic for a fixed spec, config, and seed.
    """
    if not isinstance(n_measurements, int) or isinstance(n_measurements, bool) or n_measurements < 1:
        raise ValidationError(
            f"n_measurements must be an integer >= 1, got {n_measurements!r}"
        )
    cfg = config or OptimizerConfig()
    m = n_measurements - 1 if pin_final else n_measurements

    if spec.dim == 2:
        _, thetas, phis, evaluations, converged, raw_trace = _optimize_qubit_directions(
            spec, m, cfg
        )
        plan, best_value = _finish_qubit_plan(spec, thetas, phis, pin_final)
        c, s, _ = _target_affine(spec)
        trace = tuple((i, _affine_value(c, s, v)) for i, v in raw_trace)
    else:
        pinned = (
            spectral_decompose(spec.target_operator).projectors if pin_final else None
        )
        _, thetas, phis, evaluations, converged, raw_trace = _optimize_general_directions(
            spec, m, cfg, pinned
        )
        plan, best_value = _finish_general_plan(spec, thetas, phis, pin_final)
        trace = tuple(raw_trace)
    return OptimizationResult(
        best_plan=plan,
        best_value=best_value,
        evaluations=evaluations,
        converged=converged,
        trace=trace,
    )


def brute_force_grid(
    spec: ObjectiveSpec,
    n_measurements: int,
    config: OptimizerConfig | None = None,
    *,
    pin_final: bool = True,
) -> OptimizationResult:
    """Exhaustive qubit oracle over a uniform ``(theta, phi)`` product grid.

    Scans ``grid_points`` polar by ``grid_points`` azimuth values per free
    direction (the final measurement is pinned to the target by default,
    matching :func:`optimize_measurements`).  Ties keep the
    lexicographically smallest grid indices.  Raises
    :class:`ResourceLimitError` when the total evaluation count would
    exceed ``config.eval_cap``.
    """
    if spec.dim != 2:
        raise ValidationError(
            f"brute-force grid search is defined for dim 2, got dim {spec.dim}"
        )
    if not isinstance(n_measurements, int) or isinstance(n_measurements, bool) or n_measurements < 1:
        raise ValidationError(
            f"n_measurements must be an integer >= 1, got {n_measurements!r}"
        )
    cfg = config or OptimizerConfig()
    m = n_measurements - 1 if pin_final else n_measurements
    c, s, wt = _target_affine(spec)
    b0 = rho_to_bloch(spec.initial_state)

    if m == 0:
        plan, best_value = _finish_qubit_plan(spec, (), (), pin_final)
        return OptimizationResult(
            best_plan=plan,
            best_value=best_value,
            evaluations=1,
            converged=True,
            trace=((0, best_value),),
        )

    g = cfg.grid_points
    n_candidates = g * g
    total = n_candidates**m
    if total > cfg.eval_cap:
        raise ResourceLimitError(
            f"grid search needs {total} evaluations, over the cap {cfg.eval_cap}"
        )
    theta_values = np.linspace(0.0, math.pi, g)
    phi_values = np.linspace(0.0, _TWO_PI, g, endpoint=False)
    theta_grid = np.repeat(theta_values, g)
    phi_grid = np.tile(phi_values, g)
    sin_t = np.sin(theta_grid)
    wxs = np.ascontiguousarray(sin_t * np.cos(phi_grid))
    wys = np.ascontiguousarray(sin_t * np.sin(phi_grid))
    wzs = np.ascontiguousarray(np.cos(theta_grid))

    best_k_value, best_index, evaluations = _kernels.grid_scan(
        b0.x, b0.y, b0.z, wt[0], wt[1], wt[2], wxs, wys, wzs, m, total
    )

    digits = []
    remaining = int(best_index)
    for _ in range(m):
        digits.append(remaining % n_candidates)
        remaining //= n_candidates
    digits.reverse()
    pairs = [
        (float(theta_values[d // g]), float(phi_values[d % g])) for d in digits
    ]
    if pin_final:
        pairs.append(direction_angles(wt))
    plan = MeasurementPlan(angles=tuple(pairs))
    best_value = _affine_value(c, s, best_k_value)
    return OptimizationResult(
        best_plan=plan,
        best_value=best_value,
        evaluations=int(evaluations),
        converged=True,
        trace=((0, best_value),),
    )


def optimize_joint(
    spec: ObjectiveSpec,
    n_measurements: int,
    config: OptimizerConfig | None = None,
    *,
    segments_per_gap: int = 1,
    dt: float = 1.0,
    pin_final: bool = True,
) -> OptimizationResult:
    """Alternate measurement-direction and control-amplitude ascent.

    The composed evolution applies a control gap before, between, and after
    the measurements (``n + 1`` gaps of ``segments_per_gap`` constant
    segments of duration ``dt`` each); amplitudes are confined to
    ``|u| <= config.u_max``.  Each outer iteration sweeps all measurement
    coordinates with controls held fixed, then all amplitudes with
    measurements held fixed; the outer trace is non-decreasing and the loop
    stops when its relative improvement falls below ``config.tolerance``.

    ``n_measurements`` may be 0 (control-only optimization).  For qubits
    with ``pin_final=True`` the last measurement is the target observable;
    the trailing gap remains free, and the optimizer is left to discover
    target-preserving amplitudes for it.
    """
    if spec.model is None:
        raise ValidationError("joint optimization requires a spec with a model")
    if not isinstance(n_measurements, int) or isinstance(n_measurements, bool) or n_measurements < 0:
        raise ValidationError(
            f"n_measurements must be an integer >= 0, got {n_measurements!r}"
        )
    if segments_per_gap < 1:
        raise ValidationError(
            f"segments_per_gap must be >= 1, got {segments_per_gap!r}"
        )
    if not (math.isfinite(dt) and dt >= 0.0):
        raise ValidationError(f"dt must be >= 0, got {dt!r}")
    cfg = config or OptimizerConfig()
    n = n_measurements
    m = max(n - 1, 0) if pin_final else n
    dim = spec.dim
    if dim != 2:
        raise ValidationError(
            "joint optimization is implemented for dim 2 "
            f"(got dim {dim}); optimize measurements alone for higher dims"
        )

    c, s, wt = _target_affine(spec)
    pin_measurement = pin_final and n >= 1
    wt_theta, wt_phi = direction_angles(wt)

    rho0 = spec.initial_state.matrix
    o_mat = spec.target_operator.matrix
    h0 = spec.model.h0.matrix
    mu = spec.model.mu.matrix
    n_gaps = n + 1

    def propagate(rho, u):
        evals, vecs = np.linalg.eigh(h0 - u * mu)
        prop = (vecs * np.exp(-1j * evals * dt)) @ vecs.conj().T
        return prop @ rho @ prop.conj().T

    def measure_angles(rho, theta, phi):
        st = math.sin(theta)
        wx = st * math.cos(phi)
        wy = st * math.sin(phi)
        wz = math.cos(theta)
        p = 0.5 * np.array(
            [[1.0 + wz, wx - 1j * wy], [wx + 1j * wy, 1.0 - wz]],
            dtype=np.complex128,
        )
        comp = np.eye(2, dtype=np.complex128) - p
        return p @ rho @ p + comp @ rho @ comp

    def value_of(thetas, phis, amps):
        rho = rho0
        for seg_u in amps[0]:
            rho = propagate(rho, seg_u)
        for i in range(n):
            if i < m:
                rho = measure_angles(rho, thetas[i], phis[i])
            else:
                rho = measure_angles(rho, wt_theta, wt_phi)
            for seg_u in amps[i + 1]:
                rho = propagate(rho, seg_u)
        return float(np.trace(rho @ o_mat).real)

    rng = np.random.default_rng(cfg.seed)
    evaluations = 0
    best = None
    trace = []
    running_best = -np.inf
    iteration_counter = 0
    for _ in range(cfg.multi_starts):
        thetas = list(np.arccos(rng.uniform(-1.0, 1.0, size=m)))
        phis = list(rng.uniform(0.0, _TWO_PI, size=m))
        amps = [
            list(rng.uniform(-cfg.u_max, cfg.u_max, size=segments_per_gap))
            for _ in range(n_gaps)
        ]
        current = value_of(thetas, phis, amps)
        evaluations += 1
        previous = -np.inf
        converged = False
        for _ in range(cfg.max_iters):
            for i in range(m):
                def f_theta(t, i=i):
                    saved = thetas[i]
                    thetas[i] = t
                    out = value_of(thetas, phis, amps)
                    thetas[i] = saved
                    return out

                thetas[i], current, ev = _improve_scalar(
                    f_theta, thetas[i], current, 0.0, math.pi,
                    _THETA_STEPS, False, _ANGLE_GOLDEN_TOL,
                )
                evaluations += ev

                def f_phi(t, i=i):
                    saved = phis[i]
                    phis[i] = t
                    out = value_of(thetas, phis, amps)
                    phis[i] = saved
                    return out

                phis[i], current, ev = _improve_scalar(
                    f_phi, phis[i], current, 0.0, _TWO_PI,
                    _PHI_STEPS, True, _ANGLE_GOLDEN_TOL,
                )
                evaluations += ev
            for gap in range(n_gaps):
                for seg in range(segments_per_gap):
                    def f_amp(u, gap=gap, seg=seg):
                        saved = amps[gap][seg]
                        amps[gap][seg] = u
                        out = value_of(thetas, phis, amps)
                        amps[gap][seg] = saved
                        return out

                    amps[gap][seg], current, ev = _improve_scalar(
                        f_amp, amps[gap][seg], current, -cfg.u_max, cfg.u_max,
                        _AMP_STEPS, False, _AMP_GOLDEN_TOL,
                    )
                    evaluations += ev
            iteration_counter += 1
            running_best = max(running_best, current)
            trace.append((iteration_counter, running_best))
            if previous > -np.inf and _relative_gain(current, previous) < cfg.tolerance:
                converged = True
                break
            previous = current
        if best is None or current > best[0]:
            best = (current, list(thetas), list(phis), [list(a) for a in amps], converged)

    _, bth, bph, bamps, bconv = best
    pairs = [_canonical_pair(t, p) for t, p in zip(bth, bph)]
    if pin_measurement:
        pairs.append((wt_theta, wt_phi))
    plan = MeasurementPlan(angles=tuple(pairs))
    controls = tuple(ControlSchedule(tuple(a), dt) for a in bamps)
    best_value = evaluate_objective(spec, plan, controls)
    return OptimizationResult(
        best_plan=plan,
        best_value=best_value,
        evaluations=evaluations,
        converged=bconv,
        trace=tuple(trace),
        best_controls=controls,
    )
