"""Quantum measurement back-action as a control resource.

Simulates density-matrix evolution under sequences of non-selective
projective measurements, optionally interleaved with coherent control
pulses, and optimizes the measured observables (and control amplitudes)
so the final state maximizes a target-operator expectation.  For qubits
the optimal measurement directions follow the geodesic between the
initial and target Bloch vectors and are available in closed form; the
numerical optimizers reproduce them and extend to objectives with
control fields or higher-dimensional systems.
"""

from ._kernels import BACKEND
from .bloch import (
    BlochVector,
    QubitPlan,
    analytic_optimal_sequence,
    bloch_to_rho,
    direction_angles,
    direction_from_angles,
    measure_bloch,
    projector_from_direction,
    qubit_objective,
    rho_to_bloch,
)
from .errors import NumericalError, ResourceLimitError, ValidationError
from .optimize import (
    ControlSchedule,
    MeasurementPlan,
    ObjectiveSpec,
    OptimizationResult,
    OptimizerConfig,
    brute_force_grid,
    evaluate_objective,
    optimize_joint,
    optimize_measurements,
    pipeline_states,
)
from .quantum import (
    DensityMatrix,
    HermitianOperator,
    SpectralDecomposition,
    SystemModel,
    apply_measurement,
    apply_sequence,
    evolve_unitary,
    expectation,
    purity,
    spectral_decompose,
)
from .scenario import (
    ScenarioConfig,
    TrajectoryRecord,
    emit_summary,
    emit_trajectory,
    parse_scenario,
    render_scenario,
    run_scenario,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BACKEND",
    "ValidationError",
    "NumericalError",
    "ResourceLimitError",
    "HermitianOperator",
    "DensityMatrix",
    "SpectralDecomposition",
    "SystemModel",
    "spectral_decompose",
    "apply_measurement",
    "apply_sequence",
    "evolve_unitary",
    "expectation",
    "purity",
    "BlochVector",
    "QubitPlan",
    "bloch_to_rho",
    "rho_to_bloch",
    "projector_from_direction",
    "measure_bloch",
    "qubit_objective",
    "direction_angles",
    "direction_from_angles",
    "analytic_optimal_sequence",
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
    "ScenarioConfig",
    "TrajectoryRecord",
    "parse_scenario",
    "render_scenario",
    "run_scenario",
    "emit_trajectory",
    "emit_summary",
]
