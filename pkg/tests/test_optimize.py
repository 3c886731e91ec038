import math

import numpy as np
import pytest

from antizeno import (
    BlochVector,
    ControlSchedule,
    DensityMatrix,
    HermitianOperator,
    MeasurementPlan,
    ObjectiveSpec,
    OptimizerConfig,
    ResourceLimitError,
    SystemModel,
    ValidationError,
    analytic_optimal_sequence,
    bloch_to_rho,
    brute_force_grid,
    evaluate_objective,
    optimize_joint,
    optimize_measurements,
    pipeline_states,
    projector_from_direction,
    qubit_objective,
)

from conftest import SIGMA_X, SIGMA_Y, bloch_projector, random_unit_vector

KET0 = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=np.complex128)
KET1 = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=np.complex128)
ZERO2 = np.zeros((2, 2), dtype=np.complex128)


def antipodal_spec(model=None):
    """Steer |0><0| toward the south pole projector |1><1|."""
    return ObjectiveSpec(
        initial_state=DensityMatrix(KET0),
        target_operator=HermitianOperator(KET1),
        model=model,
    )


def spec_for(a0, wt, model=None):
    return ObjectiveSpec(
        initial_state=bloch_to_rho(BlochVector(*a0)),
        target_operator=bloch_projector(wt),
        model=model,
    )


# ---------------------------------------------------------------------------
# Plan / schedule / spec types


def test_plan_needs_exactly_one_representation():
    with pytest.raises(ValidationError):
        MeasurementPlan()
    with pytest.raises(ValidationError):
        MeasurementPlan(
            angles=((0.0, 0.0),),
            observables=(HermitianOperator(SIGMA_X),),
        )


def test_plan_validates_angle_ranges():
    with pytest.raises(ValidationError):
        MeasurementPlan(angles=((4.0, 0.0),))  # theta > pi
    with pytest.raises(ValidationError):
        MeasurementPlan(angles=((0.5, -0.1),))  # phi < 0
    with pytest.raises(ValidationError):
        MeasurementPlan(angles=((0.5, 2.0 * math.pi),))  # phi = 2pi excluded


def test_plan_round_trips_directions():
    dirs = [BlochVector(*random_unit_vector(np.random.default_rng(s))) for s in range(4)]
    plan = MeasurementPlan.from_directions(dirs)
    for original, recovered in zip(dirs, plan.directions()):
        assert recovered.as_tuple() == pytest.approx(original.as_tuple(), abs=1e-12)


def test_control_schedule_validation():
    with pytest.raises(ValidationError):
        ControlSchedule((), 1.0)
    with pytest.raises(ValidationError):
        ControlSchedule((1.0,), -0.5)
    with pytest.raises(ValidationError):
        ControlSchedule((math.inf,), 1.0)
    sched = ControlSchedule((0.5, -0.25), 0.1)
    assert sched.segment_count == 2


def test_objective_spec_dim_mismatch():
    with pytest.raises(ValidationError, match="dim"):
        ObjectiveSpec(
            initial_state=DensityMatrix(KET0),
            target_operator=HermitianOperator(np.eye(3, dtype=complex)),
        )


def test_optimizer_config_validation():
    with pytest.raises(ValidationError):
        OptimizerConfig(tolerance=0.0)
    with pytest.raises(ValidationError):
        OptimizerConfig(multi_starts=0)
    with pytest.raises(ValidationError):
        OptimizerConfig(grid_points=1)
    with pytest.raises(ValidationError):
        OptimizerConfig(u_max=-1.0)


# ---------------------------------------------------------------------------
# evaluate_objective / pipeline_states


def test_empty_plan_reads_initial_expectation():
    spec = antipodal_spec()
    assert evaluate_objective(spec, MeasurementPlan(angles=())) == pytest.approx(0.0)


def test_equal_angle_plan_matches_frozen_objective():
    plan10 = analytic_optimal_sequence(BlochVector(0, 0, 1), BlochVector(0, 0, -1), 10)
    value = evaluate_objective(
        antipodal_spec(), MeasurementPlan.from_directions(plan10.directions)
    )
    assert value == pytest.approx(0.8027145248565531, abs=1e-12)


def test_rabi_flip_through_controls():
    model = SystemModel(
        h0=HermitianOperator(ZERO2), mu=HermitianOperator(SIGMA_X)
    )
    spec = antipodal_spec(model)
    controls = (ControlSchedule((-math.pi / 2.0,), 1.0),)
    value = evaluate_objective(spec, MeasurementPlan(angles=()), controls)
    assert value == pytest.approx(1.0, abs=1e-12)


def test_controls_length_must_be_gaps():
    model = SystemModel(
        h0=HermitianOperator(ZERO2), mu=HermitianOperator(SIGMA_X)
    )
    spec = antipodal_spec(model)
    plan = MeasurementPlan(angles=((math.pi / 2.0, 0.0),))
    with pytest.raises(ValidationError, match="2"):
        evaluate_objective(spec, plan, (ControlSchedule((0.0,), 1.0),))


def test_controls_require_model():
    spec = antipodal_spec()
    with pytest.raises(ValidationError, match="model"):
        evaluate_objective(
            spec, MeasurementPlan(angles=()), (ControlSchedule((0.0,), 1.0),)
        )


@pytest.mark.parametrize("seed", range(10))
def test_matrix_pipeline_equals_bloch_fold(seed):
    rng = np.random.default_rng(seed)
    a0 = random_unit_vector(rng)
    wt = random_unit_vector(rng)
    dirs = [BlochVector(*random_unit_vector(rng)) for _ in range(4)]
    spec = spec_for(a0, wt)
    via_matrix = evaluate_objective(spec, MeasurementPlan.from_directions(dirs))
    via_bloch = qubit_objective(BlochVector(*a0), BlochVector(*wt), dirs)
    assert via_matrix == pytest.approx(via_bloch, abs=1e-10)


def test_pipeline_states_counts_and_replays():
    plan = analytic_optimal_sequence(BlochVector(0, 0, 1), BlochVector(0, 0, -1), 5)
    spec = antipodal_spec()
    states = pipeline_states(spec, MeasurementPlan.from_directions(plan.directions))
    assert len(states) == 6
    np.testing.assert_allclose(states[0].matrix, KET0, atol=1e-15)


# ---------------------------------------------------------------------------
# optimize_measurements


def test_optimize_ten_steps_recovers_closed_form():
    result = optimize_measurements(antipodal_spec(), 10)
    assert result.best_value == pytest.approx(0.8027145248565531, abs=1e-4)
    assert result.converged
    assert result.best_plan.n == 10
    # re-evaluation through the matrix pipeline reproduces the reported value
    replay = evaluate_objective(antipodal_spec(), result.best_plan)
    assert replay == pytest.approx(result.best_value, abs=1e-12)


def test_optimize_recovered_plan_is_a_rotated_geodesic():
    """Optimal directions form equal angular steps; the plane is free."""
    n = 6
    result = optimize_measurements(antipodal_spec(), n)
    dirs = [w.as_tuple() for w in result.best_plan.directions()]
    step = math.pi / n
    for w1, w2 in zip(dirs, dirs[1:]):
        gap = abs(sum(a * b for a, b in zip(w1, w2)))
        assert gap == pytest.approx(math.cos(step), abs=1e-4)
    # realized trajectory norms follow the cosine-power law
    states = pipeline_states(antipodal_spec(), result.best_plan)
    for i, state in enumerate(states[1:], start=1):
        m = state.matrix
        b = np.array(
            [2 * m[1, 0].real, 2 * m[1, 0].imag, (m[0, 0] - m[1, 1]).real]
        )
        assert np.linalg.norm(b) == pytest.approx(math.cos(step) ** i, abs=1e-4)


def test_optimize_already_at_target():
    spec = spec_for((0, 0, 1), (0, 0, 1))
    result = optimize_measurements(spec, 3)
    assert result.best_value == pytest.approx(1.0, abs=1e-9)
    for w in result.best_plan.directions():
        assert abs(w.z) == pytest.approx(1.0, abs=1e-6)


def test_optimize_two_antipodal_measurements():
    result = optimize_measurements(antipodal_spec(), 2)
    assert result.best_value == pytest.approx(0.5, abs=1e-6)


def test_unpinned_search_beats_pinned_for_antipodal_pair():
    # With the final measurement free, two measurements reach
    # (1 + cos^3(pi/3))/2 = 0.5625 instead of 0.5: the last projection
    # no longer has to align with the readout axis.
    pinned = optimize_measurements(antipodal_spec(), 2, pin_final=True)
    free = optimize_measurements(antipodal_spec(), 2, pin_final=False)
    assert pinned.best_value == pytest.approx(0.5, abs=1e-6)
    assert free.best_value == pytest.approx(0.5625, abs=1e-6)
    assert free.best_value > pinned.best_value + 0.05


@pytest.mark.parametrize("n", [2, 5, 9])
@pytest.mark.parametrize("seed", [1, 2, 3, 4, 5])
def test_optimize_matches_analytic_value(n, seed):
    rng = np.random.default_rng(seed)
    a0 = random_unit_vector(rng)
    wt = random_unit_vector(rng)
    theta = math.acos(float(np.clip(np.dot(a0, wt), -1.0, 1.0)))
    expected = 0.5 * (1.0 + math.cos(theta / n) ** n)
    result = optimize_measurements(spec_for(a0, wt), n)
    assert result.best_value == pytest.approx(expected, abs=1e-4)


def test_optimize_is_deterministic():
    spec = antipodal_spec()
    cfg = OptimizerConfig(seed=42)
    r1 = optimize_measurements(spec, 4, cfg)
    r2 = optimize_measurements(spec, 4, cfg)
    assert r1.best_value == r2.best_value
    assert r1.best_plan.angles == r2.best_plan.angles
    assert r1.evaluations == r2.evaluations
    assert r1.trace == r2.trace


def test_optimize_seed_changes_search_path():
    spec = antipodal_spec()
    r1 = optimize_measurements(spec, 3, OptimizerConfig(seed=0))
    r2 = optimize_measurements(spec, 3, OptimizerConfig(seed=99))
    # same optimum, generally different angles (degenerate great circles)
    assert r1.best_value == pytest.approx(r2.best_value, abs=1e-6)


def test_optimize_trace_is_non_decreasing():
    result = optimize_measurements(antipodal_spec(), 5)
    values = [v for _, v in result.trace]
    assert all(b >= a for a, b in zip(values, values[1:]))


def test_optimize_rejects_bad_n():
    with pytest.raises(ValidationError):
        optimize_measurements(antipodal_spec(), 0)
    with pytest.raises(ValidationError):
        optimize_measurements(antipodal_spec(), True)


def test_optimize_rejects_identity_target():
    spec = ObjectiveSpec(
        initial_state=DensityMatrix(KET0),
        target_operator=HermitianOperator(np.eye(2, dtype=complex)),
    )
    with pytest.raises(ValidationError, match="identity"):
        optimize_measurements(spec, 2)


def test_optimize_generic_hermitian_target():
    """Non-projector targets use the same machinery through an affine map."""
    o = HermitianOperator(np.array([[2.0, 0.3], [0.3, -1.0]], dtype=complex))
    spec = ObjectiveSpec(initial_state=DensityMatrix(KET0), target_operator=o)
    result = optimize_measurements(spec, 4)
    assert evaluate_objective(spec, result.best_plan) == pytest.approx(
        result.best_value, abs=1e-12
    )
    # optimum saturates the Bloch bound c + s*cos^n(Theta/n) analytically
    evals = np.linalg.eigvalsh(o.matrix)
    c, s = (evals[1] + evals[0]) / 2.0, (evals[1] - evals[0]) / 2.0
    v = np.array([0.3, 0.0, 1.5])
    theta = math.acos(float(v[2] / np.linalg.norm(v)))
    expected = c + s * math.cos(theta / 4.0) ** 4
    assert result.best_value == pytest.approx(expected, abs=1e-4)


# ---------------------------------------------------------------------------
# Higher-dimensional (experimental) path


def test_optimize_dim3_improves_and_replays():
    rng = np.random.default_rng(5)
    g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    w = g @ g.conj().T
    rho0 = DensityMatrix(w / np.trace(w).real)
    target = HermitianOperator(np.diag([0.0, 0.0, 1.0]).astype(complex))
    spec = ObjectiveSpec(initial_state=rho0, target_operator=target)
    baseline = evaluate_objective(spec, MeasurementPlan(observables=()))
    result = optimize_measurements(
        spec, 2, OptimizerConfig(multi_starts=2, max_iters=40)
    )
    assert result.best_plan.observables is not None
    assert len(result.best_plan.observables) == 2
    assert result.best_value >= baseline - 1e-12
    replay = evaluate_objective(spec, result.best_plan)
    assert replay == pytest.approx(result.best_value, abs=1e-12)


# ---------------------------------------------------------------------------
# brute_force_grid


def test_grid_aligned_target_peaks_at_north_pole():
    spec = spec_for((0, 0, 1), (0, 0, 1))
    result = brute_force_grid(spec, 1, pin_final=False)
    assert result.best_value == pytest.approx(1.0, abs=1e-12)
    # theta=0 wins the tie against theta=pi by lexicographic order
    assert result.best_plan.angles[0] == (0.0, 0.0)


def test_grid_antipodal_single_direction_plateau():
    spec = antipodal_spec()
    cfg = OptimizerConfig(grid_points=48)
    result = brute_force_grid(spec, 1, cfg, pin_final=False)
    assert result.best_value == pytest.approx(0.5, abs=1e-3)
    assert result.best_value <= 0.5 + 1e-12
    theta, _ = result.best_plan.angles[0]
    assert theta == pytest.approx(math.pi / 2.0, abs=0.1)


def test_grid_quarter_turn_two_measurements():
    spec = spec_for((0, 0, 1), (1, 0, 0))
    result = brute_force_grid(spec, 2, OptimizerConfig(grid_points=64))
    assert result.best_value == pytest.approx(0.75, abs=5e-3)


def test_grid_agrees_with_optimizer_small_n():
    for seed in range(5):
        rng = np.random.default_rng(seed)
        spec = spec_for(random_unit_vector(rng), random_unit_vector(rng))
        for n in (1, 2):
            grid = brute_force_grid(spec, n)
            opt = optimize_measurements(spec, n)
            assert opt.best_value >= grid.best_value - 1e-6


def test_grid_eval_cap_guard():
    spec = antipodal_spec()
    with pytest.raises(ResourceLimitError, match="cap"):
        brute_force_grid(spec, 4, OptimizerConfig(grid_points=32))


def test_grid_is_deterministic():
    spec = antipodal_spec()
    r1 = brute_force_grid(spec, 2)
    r2 = brute_force_grid(spec, 2)
    assert r1.best_value == r2.best_value
    assert r1.best_plan.angles == r2.best_plan.angles


def test_grid_rejects_higher_dims():
    rho = DensityMatrix(np.eye(3, dtype=complex) / 3.0)
    target = HermitianOperator(np.diag([0.0, 0.0, 1.0]).astype(complex))
    with pytest.raises(ValidationError, match="dim 2"):
        brute_force_grid(ObjectiveSpec(rho, target), 1)


# ---------------------------------------------------------------------------
# optimize_joint


def sx_model():
    return SystemModel(h0=HermitianOperator(ZERO2), mu=HermitianOperator(SIGMA_X))


def test_joint_requires_model():
    with pytest.raises(ValidationError, match="model"):
        optimize_joint(antipodal_spec(), 0)


def test_joint_rabi_reaches_full_inversion():
    spec = antipodal_spec(sx_model())
    result = optimize_joint(spec, 0, segments_per_gap=1, dt=1.0)
    assert result.best_value >= 1.0 - 1e-6
    assert result.best_controls is not None
    assert len(result.best_controls) == 1
    u = result.best_controls[0].amplitudes[0]
    # the winning amplitude sits on the sin^2(u) = 1 family
    assert math.sin(u) ** 2 == pytest.approx(1.0, abs=1e-6)


def test_joint_zero_hamiltonian_reduces_to_measurements_only():
    model = SystemModel(
        h0=HermitianOperator(ZERO2), mu=HermitianOperator(ZERO2)
    )
    spec = antipodal_spec(model)
    cfg = OptimizerConfig(multi_starts=3, max_iters=60)
    joint = optimize_joint(spec, 1, cfg, segments_per_gap=1, dt=1.0)
    plain = optimize_measurements(antipodal_spec(), 1, cfg)
    assert joint.best_value == pytest.approx(plain.best_value, abs=1e-10)


def test_joint_at_least_as_good_as_measurements_alone():
    model = SystemModel(
        h0=HermitianOperator(ZERO2), mu=HermitianOperator(SIGMA_Y)
    )
    spec = antipodal_spec(model)
    cfg = OptimizerConfig(multi_starts=4, max_iters=60)
    joint = optimize_joint(spec, 2, cfg, segments_per_gap=1, dt=1.0)
    assert joint.best_value >= 0.5 - 1e-9


def test_joint_trace_monotone_and_reproducible():
    spec = antipodal_spec(sx_model())
    cfg = OptimizerConfig(multi_starts=2, max_iters=40)
    result = optimize_joint(spec, 1, cfg, segments_per_gap=1, dt=1.0)
    values = [v for _, v in result.trace]
    assert all(b >= a for a, b in zip(values, values[1:]))
    replay = evaluate_objective(spec, result.best_plan, result.best_controls)
    assert replay == pytest.approx(result.best_value, abs=1e-12)
    again = optimize_joint(spec, 1, cfg, segments_per_gap=1, dt=1.0)
    assert again.best_value == result.best_value
    assert again.best_plan.angles == result.best_plan.angles


def test_joint_respects_amplitude_box():
    spec = antipodal_spec(sx_model())
    cfg = OptimizerConfig(multi_starts=2, max_iters=30, u_max=2.0)
    result = optimize_joint(spec, 1, cfg, segments_per_gap=2, dt=0.5)
    for sched in result.best_controls:
        assert sched.segment_count == 2
        for u in sched.amplitudes:
            assert abs(u) <= 2.0 + 1e-12
