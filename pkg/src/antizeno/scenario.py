"""Scenario configs, execution, and trajectory/summary emission.

A scenario is a YAML document selecting one run mode and its inputs:

.. code-block:: yaml

    mode: analytic-qubit        # or optimize-measurements, optimize-joint,
    dim: 2                      #    brute-force, evaluate
    initial_state: [0.0, 0.0, 1.0]     # Bloch triple, or a complex matrix
    target: [0.0, 0.0, -1.0]           #    as rows of [re, im] pairs
    n_measurements: 10
    plan:                       # evaluate-mode input / analytic plane hint
      directions: [[0.0, 0.0, 1.0]]
    model:                      # required by optimize-joint
      h0: [[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]
      mu: [[[0.0, 0.0], [1.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]]]
    controls:
      segments_per_gap: 1
      dt: 1.0
      u_max: 10.0
    optimizer:
      tolerance: 1.0e-9
      seed: 0
    output:
      trajectory_path: trajectory.csv
      summary_path: summary.yaml

Unknown keys are rejected (listing them), missing optional sections get
defaults, and Bloch triples are only legal for ``dim: 2``.  Parsing and
rendering round-trip exactly, and a fixed config (including the seed)
yields byte-identical output files run to run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
import yaml

from .bloch import BlochVector, as_bloch, bloch_to_rho, rho_to_bloch
from .bloch import analytic_optimal_sequence, direction_from_angles
from .errors import NumericalError, ResourceLimitError, ValidationError
from .optimize import (
    ControlSchedule,
    MeasurementPlan,
    ObjectiveSpec,
    OptimizationResult,
    OptimizerConfig,
    _target_affine,
    brute_force_grid,
    evaluate_objective,
    optimize_joint,
    optimize_measurements,
    pipeline_states,
)
from .quantum import (
    DensityMatrix,
    HermitianOperator,
    SystemModel,
    expectation,
    purity,
)

__all__ = [
    "ScenarioConfig",
    "PlanSection",
    "ControlsSection",
    "OutputSection",
    "TrajectoryRecord",
    "MODES",
    "parse_scenario",
    "render_scenario",
    "run_scenario",
    "build_records",
    "emit_trajectory",
    "build_summary",
    "emit_summary",
]

MODES = (
    "analytic-qubit",
    "optimize-measurements",
    "optimize-joint",
    "brute-force",
    "evaluate",
)

_Matrix = tuple[tuple[complex, ...], ...]
_Triple = tuple[float, float, float]


@dataclass(frozen=True)
class PlanSection:
    """Explicit plan input (evaluate mode) or analytic-mode plane hint."""

    directions: tuple[_Triple, ...] | None = None
    angles: tuple[tuple[float, float], ...] | None = None
    observables: tuple[_Matrix, ...] | None = None
    plane_hint: _Triple | None = None


@dataclass(frozen=True)
class ControlsSection:
    segments_per_gap: int = 1
    dt: float = 1.0
    u_max: float = 10.0
    amplitudes: tuple[tuple[float, ...], ...] | None = None


@dataclass(frozen=True)
class OutputSection:
    trajectory_path: str = "trajectory.csv"
    summary_path: str = "summary.yaml"


@dataclass(frozen=True)
class ScenarioConfig:
    """A fully validated scenario with all defaults filled in."""

    mode: str
    initial_state: _Triple | _Matrix
    target: _Triple | _Matrix
    dim: int = 2
    n_measurements: int | None = None
    plan: PlanSection | None = None
    model: tuple[_Matrix, _Matrix] | None = None
    controls: ControlsSection = field(default_factory=ControlsSection)
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    pin_final: bool = True
    output: OutputSection = field(default_factory=OutputSection)


@dataclass(frozen=True)
class TrajectoryRecord:
    """One trajectory step: state summary plus the direction measured.

    Bloch coordinates and measured directions are only present for
    ``dim = 2``; the direction fields are ``None`` at step 0 (no
    measurement has happened yet) and for control-only steps.
    """

    step: int
    purity: float
    objective_so_far: float
    bx: float | None = None
    by: float | None = None
    bz: float | None = None
    wx: float | None = None
    wy: float | None = None
    wz: float | None = None


# ---------------------------------------------------------------------------
# Parsing helpers


def _require_mapping(value, where: str) -> dict:
    if not isinstance(value, dict):
        raise ValidationError(f"{where} must be a mapping, got {type(value).__name__}")
    return value


def _reject_unknown(mapping: dict, allowed, where: str) -> None:
    unknown = sorted(set(mapping) - set(allowed))
    if unknown:
        raise ValidationError(f"unknown keys in {where}: {', '.join(unknown)}")


def _as_float(value, key: str) -> float:
    if isinstance(value, bool):
        raise ValidationError(f"{key} must be a number, got a boolean")
    if isinstance(value, (int, float)):
        out = float(value)
    elif isinstance(value, str):
        try:
            out = float(value)
        except ValueError:
            raise ValidationError(f"{key} must be a number, got {value!r}") from None
    else:
        raise ValidationError(f"{key} must be a number, got {type(value).__name__}")
    if not math.isfinite(out):
        raise ValidationError(f"{key} must be finite, got {out!r}")
    return out


def _as_int(value, key: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"{key} must be an integer, got {value!r}")
    return value


def _as_bool(value, key: str) -> bool:
    if not isinstance(value, bool):
        raise ValidationError(f"{key} must be true or false, got {value!r}")
    return value


def _parse_triple(value, key: str) -> _Triple:
    if not (isinstance(value, (list, tuple)) and len(value) == 3):
        raise ValidationError(f"{key} must be a list of three numbers")
    return tuple(_as_float(v, f"{key}[{i}]") for i, v in enumerate(value))


def _parse_matrix(value, key: str) -> _Matrix:
    """Rows of ``[re, im]`` entry pairs -> tuple-of-tuples of complex."""
    if not (isinstance(value, (list, tuple)) and value):
        raise ValidationError(f"{key} must be a non-empty list of rows")
    rows = []
    for i, row in enumerate(value):
        if not isinstance(row, (list, tuple)):
            raise ValidationError(f"{key} row {i} must be a list of [re, im] pairs")
        entries = []
        for j, entry in enumerate(row):
            if not (isinstance(entry, (list, tuple)) and len(entry) == 2):
                raise ValidationError(
                    f"{key}[{i}][{j}] must be a [re, im] pair, got {entry!r}"
                )
            re = _as_float(entry[0], f"{key}[{i}][{j}].re")
            im = _as_float(entry[1], f"{key}[{i}][{j}].im")
            entries.append(complex(re, im))
        rows.append(tuple(entries))
    n_rows = len(rows)
    if any(len(r) != n_rows for r in rows):
        raise ValidationError(f"{key} must be square, got rows of differing length")
    return tuple(rows)


def _is_triple_form(value) -> bool:
    return (
        isinstance(value, (list, tuple))
        and len(value) == 3
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    )


def _parse_state_or_matrix(value, key: str) -> _Triple | _Matrix:
    if _is_triple_form(value):
        return _parse_triple(value, key)
    return _parse_matrix(value, key)


def _value_dim(value: _Triple | _Matrix) -> int:
    if value and isinstance(value[0], tuple):
        return len(value)
    return 2


def _matrix_array(value: _Matrix) -> np.ndarray:
    return np.array(value, dtype=np.complex128)


def _parse_plan(raw, dim: int) -> PlanSection:
    raw = _require_mapping(raw, "plan")
    _reject_unknown(raw, ("directions", "angles", "observables", "plane_hint"), "plan")
    given = [k for k in ("directions", "angles", "observables") if k in raw]
    if len(given) > 1:
        raise ValidationError(
            f"plan may use only one of directions/angles/observables, got {', '.join(given)}"
        )
    directions = angles = observables = plane_hint = None
    if "directions" in raw:
        value = raw["directions"]
        if not isinstance(value, (list, tuple)):
            raise ValidationError("plan.directions must be a list of triples")
        directions = tuple(
            _parse_triple(v, f"plan.directions[{i}]") for i, v in enumerate(value)
        )
    if "angles" in raw:
        value = raw["angles"]
        if not isinstance(value, (list, tuple)):
            raise ValidationError("plan.angles must be a list of [theta, phi] pairs")
        pairs = []
        for i, pair in enumerate(value):
            if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
                raise ValidationError(
                    f"plan.angles[{i}] must be a [theta, phi] pair, got {pair!r}"
                )
            pairs.append(
                (
                    _as_float(pair[0], f"plan.angles[{i}].theta"),
                    _as_float(pair[1], f"plan.angles[{i}].phi"),
                )
            )
        angles = tuple(pairs)
    if "observables" in raw:
        value = raw["observables"]
        if not isinstance(value, (list, tuple)):
            raise ValidationError("plan.observables must be a list of matrices")
        observables = tuple(
            _parse_matrix(v, f"plan.observables[{i}]") for i, v in enumerate(value)
        )
    if "plane_hint" in raw:
        plane_hint = _parse_triple(raw["plane_hint"], "plan.plane_hint")
    if (directions is not None or angles is not None) and dim != 2:
        raise ValidationError(
            f"plan directions/angles are Bloch inputs for dim 2, but dim is {dim}"
        )
    return PlanSection(
        directions=directions,
        angles=angles,
        observables=observables,
        plane_hint=plane_hint,
    )


def _parse_controls(raw) -> ControlsSection:
    raw = _require_mapping(raw, "controls")
    _reject_unknown(
        raw, ("segments_per_gap", "dt", "u_max", "amplitudes"), "controls"
    )
    section = ControlsSection()
    if "segments_per_gap" in raw:
        spg = _as_int(raw["segments_per_gap"], "controls.segments_per_gap")
        if spg < 1:
            raise ValidationError(
                f"controls.segments_per_gap must be >= 1, got {spg}"
            )
        section = replace(section, segments_per_gap=spg)
    if "dt" in raw:
        dt = _as_float(raw["dt"], "controls.dt")
        if dt < 0.0:
            raise ValidationError(f"controls.dt must be >= 0, got {dt}")
        section = replace(section, dt=dt)
    if "u_max" in raw:
        u_max = _as_float(raw["u_max"], "controls.u_max")
        if u_max <= 0.0:
            raise ValidationError(f"controls.u_max must be positive, got {u_max}")
        section = replace(section, u_max=u_max)
    if "amplitudes" in raw:
        value = raw["amplitudes"]
        if not isinstance(value, (list, tuple)):
            raise ValidationError(
                "controls.amplitudes must be a list of per-gap amplitude lists"
            )
        gaps = []
        for i, gap in enumerate(value):
            if not isinstance(gap, (list, tuple)) or not gap:
                raise ValidationError(
                    f"controls.amplitudes[{i}] must be a non-empty list of numbers"
                )
            gaps.append(
                tuple(
                    _as_float(u, f"controls.amplitudes[{i}][{j}]")
                    for j, u in enumerate(gap)
                )
            )
        section = replace(section, amplitudes=tuple(gaps))
    return section


def _parse_optimizer(raw) -> tuple[OptimizerConfig, bool]:
    raw = _require_mapping(raw, "optimizer")
    allowed = (
        "tolerance",
        "max_iters",
        "seed",
        "multi_starts",
        "grid_points",
        "u_max",
        "eval_cap",
        "pin_final",
    )
    _reject_unknown(raw, allowed, "optimizer")
    kwargs = {}
    if "tolerance" in raw:
        kwargs["tolerance"] = _as_float(raw["tolerance"], "optimizer.tolerance")
    for key in ("max_iters", "seed", "multi_starts", "grid_points", "eval_cap"):
        if key in raw:
            kwargs[key] = _as_int(raw[key], f"optimizer.{key}")
    if "u_max" in raw:
        kwargs["u_max"] = _as_float(raw["u_max"], "optimizer.u_max")
    if "seed" in kwargs and kwargs["seed"] < 0:
        raise ValidationError(f"optimizer.seed must be >= 0, got {kwargs['seed']}")
    pin_final = True
    if "pin_final" in raw:
        pin_final = _as_bool(raw["pin_final"], "optimizer.pin_final")
    return OptimizerConfig(**kwargs), pin_final


def _parse_output(raw) -> OutputSection:
    raw = _require_mapping(raw, "output")
    _reject_unknown(raw, ("trajectory_path", "summary_path"), "output")
    section = OutputSection()
    for key in ("trajectory_path", "summary_path"):
        if key in raw:
            value = raw[key]
            if not isinstance(value, str) or not value:
                raise ValidationError(f"output.{key} must be a non-empty path")
            section = replace(section, **{key: value})
    return section


def parse_scenario(text: str) -> ScenarioConfig:
    """Parse and validate a scenario document, filling defaults.

    Raises :class:`ValidationError` on unknown keys (listing them),
    dimension mismatches (naming both fields), malformed values, and
    missing mode-required fields.  Non-Hermitian matrix inputs are
    rejected when the scenario is executed, with the maximum violation
    magnitude in the message; here only shapes are checked.
    """
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ValidationError(f"malformed scenario document: {exc}") from None
    raw = _require_mapping(raw, "the scenario document")
    allowed = (
        "mode",
        "dim",
        "initial_state",
        "target",
        "n_measurements",
        "plan",
        "model",
        "controls",
        "optimizer",
        "output",
    )
    _reject_unknown(raw, allowed, "the scenario document")

    if "mode" not in raw:
        raise ValidationError("missing required key: mode")
    mode = raw["mode"]
    if mode not in MODES:
        raise ValidationError(
            f"unknown mode {mode!r}; expected one of {', '.join(MODES)}"
        )

    dim = _as_int(raw.get("dim", 2), "dim")
    if dim < 2:
        raise ValidationError(f"dim must be >= 2, got {dim}")

    for key in ("initial_state", "target"):
        if key not in raw:
            raise ValidationError(f"missing required key: {key}")
    initial_state = _parse_state_or_matrix(raw["initial_state"], "initial_state")
    target = _parse_state_or_matrix(raw["target"], "target")

    for key, value in (("initial_state", initial_state), ("target", target)):
        vdim = _value_dim(value)
        if vdim != dim:
            kind = "a Bloch triple (dim 2)" if not isinstance(value[0], tuple) else f"a dim-{vdim} matrix"
            raise ValidationError(
                f"dim mismatch: dim is {dim} but {key} is {kind}"
            )
    d_init = _value_dim(initial_state)
    d_target = _value_dim(target)
    if d_init != d_target:
        raise ValidationError(
            f"dim mismatch: initial_state has dim {d_init}, target has dim {d_target}"
        )

    n_measurements = None
    if "n_measurements" in raw:
        n_measurements = _as_int(raw["n_measurements"], "n_measurements")
        if n_measurements < 0:
            raise ValidationError(
                f"n_measurements must be >= 0, got {n_measurements}"
            )

    plan = _parse_plan(raw["plan"], dim) if "plan" in raw else None

    model = None
    if "model" in raw:
        section = _require_mapping(raw["model"], "model")
        _reject_unknown(section, ("h0", "mu"), "model")
        for key in ("h0", "mu"):
            if key not in section:
                raise ValidationError(f"model requires both h0 and mu; missing {key}")
        h0 = _parse_matrix(section["h0"], "model.h0")
        mu = _parse_matrix(section["mu"], "model.mu")
        for key, value in (("model.h0", h0), ("model.mu", mu)):
            if len(value) != dim:
                raise ValidationError(
                    f"dim mismatch: dim is {dim} but {key} has dim {len(value)}"
                )
        model = (h0, mu)

    controls = _parse_controls(raw["controls"]) if "controls" in raw else ControlsSection()
    if "optimizer" in raw:
        optimizer, pin_final = _parse_optimizer(raw["optimizer"])
    else:
        optimizer, pin_final = OptimizerConfig(), True
    output = _parse_output(raw["output"]) if "output" in raw else OutputSection()

    cfg = ScenarioConfig(
        mode=mode,
        dim=dim,
        initial_state=initial_state,
        target=target,
        n_measurements=n_measurements,
        plan=plan,
        model=model,
        controls=controls,
        optimizer=optimizer,
        pin_final=pin_final,
        output=output,
    )
    _check_mode_requirements(cfg)
    # Surface semantic problems (non-Hermitian matrices, non-density initial
    # states, bad Bloch norms) at parse time rather than mid-run.
    _objective_spec(cfg)
    if cfg.plan is not None and (
        cfg.plan.directions is not None
        or cfg.plan.angles is not None
        or cfg.plan.observables is not None
    ):
        _plan_from_section(cfg.plan, cfg.dim)
    return cfg


def _check_mode_requirements(cfg: ScenarioConfig) -> None:
    mode = cfg.mode
    needs_n = {
        "analytic-qubit": 1,
        "optimize-measurements": 1,
        "brute-force": 1,
        "optimize-joint": 0,
    }
    if mode in needs_n:
        if cfg.n_measurements is None:
            raise ValidationError(f"mode {mode!r} requires n_measurements")
        if cfg.n_measurements < needs_n[mode]:
            raise ValidationError(
                f"mode {mode!r} requires n_measurements >= {needs_n[mode]}, "
                f"got {cfg.n_measurements}"
            )
    if mode in ("analytic-qubit", "brute-force") and cfg.dim != 2:
        raise ValidationError(f"mode {mode!r} requires dim 2, got dim {cfg.dim}")
    if mode == "optimize-joint" and cfg.model is None:
        raise ValidationError("mode 'optimize-joint' requires a model section")
    if mode == "evaluate":
        if cfg.plan is None or (
            cfg.plan.directions is None
            and cfg.plan.angles is None
            and cfg.plan.observables is None
        ):
            raise ValidationError(
                "mode 'evaluate' requires a plan section with "
                "directions, angles, or observables"
            )
        plan_len = len(
            cfg.plan.directions
            if cfg.plan.directions is not None
            else cfg.plan.angles
            if cfg.plan.angles is not None
            else cfg.plan.observables
        )
        if cfg.n_measurements is not None and cfg.n_measurements != plan_len:
            raise ValidationError(
                f"n_measurements ({cfg.n_measurements}) disagrees with "
                f"plan length ({plan_len})"
            )
    if mode != "evaluate" and cfg.controls.amplitudes is not None:
        raise ValidationError(
            "controls.amplitudes is an evaluate-mode input; "
            f"mode {mode!r} determines amplitudes itself"
        )
    if cfg.controls.amplitudes is not None:
        n = len(
            cfg.plan.directions
            if cfg.plan.directions is not None
            else cfg.plan.angles
            if cfg.plan.angles is not None
            else cfg.plan.observables
        )
        if len(cfg.controls.amplitudes) != n + 1:
            raise ValidationError(
                f"controls.amplitudes needs one list per gap: expected "
                f"{n + 1} for {n} measurements, got {len(cfg.controls.amplitudes)}"
            )
        if cfg.model is None:
            raise ValidationError("controls.amplitudes requires a model section")
        widths = {len(g) for g in cfg.controls.amplitudes}
        if widths != {cfg.controls.segments_per_gap}:
            raise ValidationError(
                f"controls.amplitudes lists must all have segments_per_gap "
                f"= {cfg.controls.segments_per_gap} entries, got lengths "
                f"{sorted(widths)}"
            )


# ---------------------------------------------------------------------------
# Rendering


def _render_matrix(value: _Matrix):
    return [[[float(e.real), float(e.imag)] for e in row] for row in value]


def _render_state_or_matrix(value):
    if value and isinstance(value[0], tuple):
        return _render_matrix(value)
    return [float(v) for v in value]


def render_scenario(cfg: ScenarioConfig) -> str:
    """Render a config back to YAML; inverse of :func:`parse_scenario`."""
    doc: dict = {"mode": cfg.mode, "dim": cfg.dim}
    doc["initial_state"] = _render_state_or_matrix(cfg.initial_state)
    doc["target"] = _render_state_or_matrix(cfg.target)
    if cfg.n_measurements is not None:
        doc["n_measurements"] = cfg.n_measurements
    if cfg.plan is not None:
        plan: dict = {}
        if cfg.plan.directions is not None:
            plan["directions"] = [[float(v) for v in w] for w in cfg.plan.directions]
        if cfg.plan.angles is not None:
            plan["angles"] = [[float(t), float(p)] for t, p in cfg.plan.angles]
        if cfg.plan.observables is not None:
            plan["observables"] = [_render_matrix(q) for q in cfg.plan.observables]
        if cfg.plan.plane_hint is not None:
            plan["plane_hint"] = [float(v) for v in cfg.plan.plane_hint]
        doc["plan"] = plan
    if cfg.model is not None:
        doc["model"] = {
            "h0": _render_matrix(cfg.model[0]),
            "mu": _render_matrix(cfg.model[1]),
        }
    controls: dict = {
        "segments_per_gap": cfg.controls.segments_per_gap,
        "dt": cfg.controls.dt,
        "u_max": cfg.controls.u_max,
    }
    if cfg.controls.amplitudes is not None:
        controls["amplitudes"] = [[float(u) for u in gap] for gap in cfg.controls.amplitudes]
    doc["controls"] = controls
    doc["optimizer"] = {
        "tolerance": cfg.optimizer.tolerance,
        "max_iters": cfg.optimizer.max_iters,
        "seed": cfg.optimizer.seed,
        "multi_starts": cfg.optimizer.multi_starts,
        "grid_points": cfg.optimizer.grid_points,
        "u_max": cfg.optimizer.u_max,
        "eval_cap": cfg.optimizer.eval_cap,
        "pin_final": cfg.pin_final,
    }
    doc["output"] = {
        "trajectory_path": cfg.output.trajectory_path,
        "summary_path": cfg.output.summary_path,
    }
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=None)


# ---------------------------------------------------------------------------
# Execution


def _state_from_config(value, what: str) -> DensityMatrix:
    if value and isinstance(value[0], tuple):
        return DensityMatrix(_matrix_array(value))
    b = as_bloch(value)
    if b.norm() > 1.0 + 1e-9:
        raise ValidationError(
            f"{what} Bloch vector has norm {b.norm():.6f} > 1"
        )
    return bloch_to_rho(b)


def _target_from_config(value) -> HermitianOperator:
    if value and isinstance(value[0], tuple):
        return HermitianOperator(_matrix_array(value))
    b = as_bloch(value)
    if abs(b.norm() - 1.0) > 1e-9:
        raise ValidationError(
            f"target Bloch direction must be unit length, got norm {b.norm():.6f}"
        )
    m = np.array(
        [
            [1.0 + b.z, b.x - 1j * b.y],
            [b.x + 1j * b.y, 1.0 - b.z],
        ],
        dtype=np.complex128,
    )
    return HermitianOperator(0.5 * m)


def _objective_spec(cfg: ScenarioConfig) -> ObjectiveSpec:
    model = None
    if cfg.model is not None:
        model = SystemModel(
            h0=HermitianOperator(_matrix_array(cfg.model[0])),
            mu=HermitianOperator(_matrix_array(cfg.model[1])),
        )
    return ObjectiveSpec(
        initial_state=_state_from_config(cfg.initial_state, "initial_state"),
        target_operator=_target_from_config(cfg.target),
        model=model,
    )


def _plan_from_section(section: PlanSection, dim: int) -> MeasurementPlan:
    if section.directions is not None:
        return MeasurementPlan.from_directions(
            [as_bloch(w) for w in section.directions]
        )
    if section.angles is not None:
        return MeasurementPlan(angles=section.angles)
    observables = tuple(
        HermitianOperator(_matrix_array(q)) for q in section.observables
    )
    if observables and observables[0].dim != dim:
        raise ValidationError(
            f"dim mismatch: dim is {dim} but plan.observables[0] has dim "
            f"{observables[0].dim}"
        )
    return MeasurementPlan(observables=observables)


def _schedules_from_config(cfg: ScenarioConfig):
    if cfg.controls.amplitudes is None:
        return None
    return tuple(
        ControlSchedule(gap, cfg.controls.dt) for gap in cfg.controls.amplitudes
    )


def build_records(spec, plan, controls=None):
    """Replay a plan through the matrix pipeline into trajectory records."""
    states = pipeline_states(spec, plan, controls)
    qubit = spec.dim == 2
    directions = plan.directions() if (qubit and plan.angles is not None) else None
    records = []
    for step, rho in enumerate(states):
        b = rho_to_bloch(rho) if qubit else None
        w = directions[step - 1] if (directions is not None and step >= 1) else None
        records.append(
            TrajectoryRecord(
                step=step,
                purity=purity(rho),
                objective_so_far=expectation(rho, spec.target_operator),
                bx=b.x if b else None,
                by=b.y if b else None,
                bz=b.z if b else None,
                wx=w.x if w else None,
                wy=w.y if w else None,
                wz=w.z if w else None,
            )
        )
    return tuple(records)


def run_scenario(cfg: ScenarioConfig):
    """Execute a scenario; returns ``(outcome, trajectory_records)``.

    The outcome is the analytic plan for ``analytic-qubit`` mode, an
    :class:`OptimizationResult` for the optimizer modes, and the bare
    objective value for ``evaluate`` mode.  Records always start with the
    state after the leading control gap (step 0).
    """
    try:
        return _run_scenario_inner(cfg)
    except (ValidationError, NumericalError, ResourceLimitError) as exc:
        raise type(exc)(f"scenario mode {cfg.mode!r}: {exc}") from exc


def _run_scenario_inner(cfg: ScenarioConfig):
    spec = _objective_spec(cfg)
    mode = cfg.mode
    if mode == "analytic-qubit":
        a0 = rho_to_bloch(spec.initial_state)
        if abs(a0.norm() - 1.0) > 1e-9:
            raise ValidationError(
                "analytic-qubit mode needs a pure initial state "
                f"(unit Bloch vector), got norm {a0.norm():.6f}"
            )
        _, _, wt = _target_affine(spec)
        hint = None
        if cfg.plan is not None and cfg.plan.plane_hint is not None:
            hint = as_bloch(cfg.plan.plane_hint)
        qplan = analytic_optimal_sequence(
            a0, BlochVector(*wt), cfg.n_measurements, plane_hint=hint
        )
        plan = MeasurementPlan.from_directions(qplan.directions)
        records = build_records(spec, plan)
        return qplan, records
    if mode == "optimize-measurements":
        result = optimize_measurements(
            spec, cfg.n_measurements, cfg.optimizer, pin_final=cfg.pin_final
        )
        records = build_records(spec, result.best_plan)
        return result, records
    if mode == "brute-force":
        result = brute_force_grid(
            spec, cfg.n_measurements, cfg.optimizer, pin_final=cfg.pin_final
        )
        records = build_records(spec, result.best_plan)
        return result, records
    if mode == "optimize-joint":
        result = optimize_joint(
            spec,
            cfg.n_measurements,
            cfg.optimizer,
            segments_per_gap=cfg.controls.segments_per_gap,
            dt=cfg.controls.dt,
            pin_final=cfg.pin_final,
        )
        records = build_records(spec, result.best_plan, result.best_controls)
        return result, records
    # evaluate
    plan = _plan_from_section(cfg.plan, cfg.dim)
    controls = _schedules_from_config(cfg)
    value = evaluate_objective(spec, plan, controls)
    records = build_records(spec, plan, controls)
    return value, records


# ---------------------------------------------------------------------------
# Emission


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def emit_trajectory(records, path, *, dim: int = 2) -> None:
    """Write records as CSV with 12-significant-digit reals.

    Qubit runs get Bloch and direction columns; higher dimensions emit
    only step, purity, and objective.  Direction cells are empty where no
    measurement produced the step (always at step 0).
    """
    if dim == 2:
        header = "step,bx,by,bz,purity,objective_so_far,wx,wy,wz"
    else:
        header = "step,purity,objective_so_far"
    lines = [header]
    for rec in records:
        if dim == 2:
            w_cells = (
                [_fmt(rec.wx), _fmt(rec.wy), _fmt(rec.wz)]
                if rec.wx is not None
                else ["", "", ""]
            )
            cells = (
                [str(rec.step), _fmt(rec.bx), _fmt(rec.by), _fmt(rec.bz)]
                + [_fmt(rec.purity), _fmt(rec.objective_so_far)]
                + w_cells
            )
        else:
            cells = [str(rec.step), _fmt(rec.purity), _fmt(rec.objective_so_far)]
        lines.append(",".join(cells))
    text = "\n".join(lines) + "\n"
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write trajectory file {path}: {exc}") from exc


def build_summary(outcome, cfg: ScenarioConfig, records, wall_time_s: float) -> dict:
    """Key-value run summary (mode, best value, evaluations, directions...)."""
    summary: dict = {"mode": cfg.mode, "dim": cfg.dim}
    directions = None
    if isinstance(outcome, OptimizationResult):
        summary["n_measurements"] = outcome.best_plan.n
        summary["best_value"] = float(outcome.best_value)
        summary["evaluations"] = int(outcome.evaluations)
        summary["converged"] = bool(outcome.converged)
        if outcome.best_plan.angles is not None:
            directions = outcome.best_plan.directions()
        if outcome.best_controls is not None:
            summary["controls"] = {
                "dt": outcome.best_controls[0].dt,
                "amplitudes": [list(s.amplitudes) for s in outcome.best_controls],
            }
    elif isinstance(outcome, (int, float)):
        summary["n_measurements"] = len(records) - 1
        summary["best_value"] = float(outcome)
        summary["evaluations"] = 1
        summary["converged"] = True
    else:  # analytic plan
        summary["n_measurements"] = outcome.n
        summary["best_value"] = records[-1].objective_so_far if records else None
        summary["evaluations"] = 0
        summary["converged"] = True
        directions = outcome.directions
    summary["seed"] = cfg.optimizer.seed
    if directions is not None:
        summary["directions"] = [[w.x, w.y, w.z] for w in directions]
    summary["wall_time_s"] = float(wall_time_s)
    return summary


def emit_summary(summary: dict, path) -> None:
    """Write the summary mapping as YAML."""
    text = yaml.safe_dump(summary, sort_keys=False, default_flow_style=None)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write summary file {path}: {exc}") from exc
