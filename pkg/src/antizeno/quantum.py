"""Finite-dimensional states, observables, and the non-selective measurement channel.

A non-selective projective measurement of an observable ``Q = sum_i q_i P_i``
maps a density matrix ``rho`` to ``sum_i P_i rho P_i``, where the ``P_i``
project onto the eigenspaces of ``Q``.  This module provides validated
operator types, the spectral decomposition with eigenvalue clustering, the
measurement channel and its sequential composition, unitary evolution under
a controlled Hamiltonian ``H0 - u * mu``, and the scalar readouts
(expectation values, purity) used by the optimizers.

All operators are square complex matrices.  Validation happens once, at
construction; the channel operations assume validated inputs so that inner
optimization loops do not pay for repeated checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ValidationError

__all__ = [
    "HERMITICITY_ATOL",
    "TRACE_ATOL",
    "EIGENVALUE_FLOOR",
    "PROJECTOR_ATOL",
    "IMAG_RESIDUE_ATOL",
    "CLUSTER_TOL",
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
]

#: Maximum allowed deviation from Hermitian symmetry, ``max |M - M^dag|``.
HERMITICITY_ATOL = 1e-12
#: Maximum allowed deviation of a density-matrix trace from one.
TRACE_ATOL = 1e-12
#: Most negative eigenvalue tolerated in a density matrix.
EIGENVALUE_FLOOR = -1e-10
#: Tolerance for projector idempotence / orthogonality / completeness checks.
PROJECTOR_ATOL = 1e-10
#: Largest imaginary residue discarded when reading out a real expectation.
IMAG_RESIDUE_ATOL = 1e-10
#: Default absolute gap below which adjacent eigenvalues share an eigenspace.
CLUSTER_TOL = 1e-8


def _as_square_complex(matrix, name: str) -> np.ndarray:
    arr = np.asarray(matrix, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"{name} must be a square matrix, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise ValidationError(f"{name} must have dimension >= 1")
    if not np.all(np.isfinite(arr.view(np.float64))):
        raise ValidationError(f"{name} contains non-finite entries")
    return arr


def _check_hermitian(arr: np.ndarray, name: str) -> None:
    deviation = float(np.max(np.abs(arr - arr.conj().T)))
    if deviation > HERMITICITY_ATOL:
        raise ValidationError(
            f"{name} is not Hermitian: max |M - M^dag| = {deviation:.3e} "
            f"exceeds {HERMITICITY_ATOL:.0e}"
        )


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """A validated Hermitian matrix (an observable or Hamiltonian term).

    Parameters
    ----------
    matrix : array_like
        Square complex matrix, Hermitian within ``HERMITICITY_ATOL``.

    Raises
    ------
    ValidationError
        If the matrix is not square, not finite, or not Hermitian.
    """

    matrix: np.ndarray

    def __post_init__(self) -> None:
        arr = _as_square_complex(self.matrix, "operator")
        _check_hermitian(arr, "operator")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "matrix", arr)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def _trusted(cls, matrix: np.ndarray) -> "HermitianOperator":
        """Wrap a matrix known-valid by construction, skipping checks."""
        obj = object.__new__(cls)
        matrix.flags.writeable = False
        object.__setattr__(obj, "matrix", matrix)
        return obj


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated quantum state.

    The matrix must be Hermitian within ``HERMITICITY_ATOL``, have unit trace
    within ``TRACE_ATOL``, and have no eigenvalue below ``EIGENVALUE_FLOOR``.

    Raises
    ------
    ValidationError
        If any state condition fails.
    """

    matrix: np.ndarray

    def __post_init__(self) -> None:
        arr = _as_square_complex(self.matrix, "state")
        _check_hermitian(arr, "state")
        trace_dev = abs(complex(np.trace(arr)) - 1.0)
        if trace_dev > TRACE_ATOL:
            raise ValidationError(
                f"state trace deviates from 1 by {trace_dev:.3e} "
                f"(tolerance {TRACE_ATOL:.0e})"
            )
        lowest = float(np.linalg.eigvalsh(arr)[0])
        if lowest < EIGENVALUE_FLOOR:
            raise ValidationError(
                f"state has negative eigenvalue {lowest:.3e} "
                f"below floor {EIGENVALUE_FLOOR:.0e}"
            )
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "matrix", arr)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def _trusted(cls, matrix: np.ndarray) -> "DensityMatrix":
        """Wrap a matrix known-valid by construction, skipping checks."""
        obj = object.__new__(cls)
        matrix.flags.writeable = False
        object.__setattr__(obj, "matrix", matrix)
        return obj


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenvalues and eigenspace projectors of a Hermitian operator.

    ``eigenvalues`` are strictly increasing cluster representatives;
    ``projectors[i]`` projects onto the eigenspace of ``eigenvalues[i]``.
    The projectors are idempotent, mutually orthogonal, and complete
    (``sum_i P_i = I``) within ``PROJECTOR_ATOL``.
    """

    eigenvalues: tuple[float, ...]
    projectors: tuple[np.ndarray, ...]

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]


@dataclass(frozen=True)
class SystemModel:
    """Drift Hamiltonian ``h0`` and control coupling operator ``mu``.

    The controlled Hamiltonian at amplitude ``u`` is ``h0 - u * mu``.
    """

    h0: HermitianOperator
    mu: HermitianOperator

    def __post_init__(self) -> None:
        if self.h0.dim != self.mu.dim:
            raise ValidationError(
                f"model dimension mismatch: h0 has dim {self.h0.dim}, "
                f"mu has dim {self.mu.dim}"
            )

    @property
    def dim(self) -> int:
        return self.h0.dim


def spectral_decompose(
    q: HermitianOperator, cluster_tol: float = CLUSTER_TOL
) -> SpectralDecomposition:
    """Decompose an observable into eigenvalues and eigenspace projectors.

    Eigenvalues closer than ``cluster_tol`` (chained gaps) are merged into a
    single eigenspace: the reported eigenvalue is the cluster mean and the
    projector spans all clustered eigenvectors.  This keeps the measurement
    channel well defined for degenerate observables, where individual
    eigenvector directions inside a degenerate subspace are arbitrary.

    Parameters
    ----------
    q : HermitianOperator
        Observable to decompose.
    cluster_tol : float, optional
        Absolute gap below which adjacent eigenvalues are merged.

    Returns
    -------
    SpectralDecomposition
        Cluster eigenvalues (ascending) and matching projectors satisfying
        ``sum_i q_i P_i = Q`` within ``PROJECTOR_ATOL``.

    Raises
    ------
    NumericalError
        If the eigensolver fails to converge.
    """
    try:
        evals, vecs = np.linalg.eigh(q.matrix)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc

    boundaries = [0]
    for i in range(1, evals.size):
        if evals[i] - evals[i - 1] > cluster_tol:
            boundaries.append(i)
    boundaries.append(evals.size)

    eigenvalues = []
    projectors = []
    for start, stop in zip(boundaries[:-1], boundaries[1:]):
        block = vecs[:, start:stop]
        proj = block @ block.conj().T
        proj = 0.5 * (proj + proj.conj().T)
        proj.flags.writeable = False
        eigenvalues.append(float(np.mean(evals[start:stop])))
        projectors.append(proj)
    return SpectralDecomposition(tuple(eigenvalues), tuple(projectors))


def _sandwich_sum(rho: np.ndarray, projectors: tuple[np.ndarray, ...]) -> np.ndarray:
    out = np.zeros_like(rho)
    for proj in projectors:
        out += proj @ rho @ proj
    return 0.5 * (out + out.conj().T)


def apply_measurement(
    rho: DensityMatrix, q: HermitianOperator, cluster_tol: float = CLUSTER_TOL
) -> DensityMatrix:
    """Apply the non-selective measurement of ``q`` to a state.

    Returns ``sum_i P_i rho P_i`` with ``P_i`` the eigenspace projectors of
    ``q``.  The channel is trace preserving, positivity preserving, and
    idempotent (measuring the same observable twice equals measuring once).

    Parameters
    ----------
    rho : DensityMatrix
        Input state.
    q : HermitianOperator
        Measured observable, same dimension as ``rho``.
    cluster_tol : float, optional
        Eigenvalue clustering tolerance passed to the decomposition.

    Returns
    -------
    DensityMatrix
        The post-measurement state.

    Examples
    --------
    Measuring ``sigma_z`` on the maximally coherent pure state ``|+><+|``
    erases the off-diagonal coherences and returns ``I/2``.
    """
    if rho.dim != q.dim:
        raise ValidationError(
            f"dimension mismatch: state has dim {rho.dim}, observable has dim {q.dim}"
        )
    decomp = spectral_decompose(q, cluster_tol)
    return DensityMatrix._trusted(_sandwich_sum(rho.matrix, decomp.projectors))


def apply_sequence(rho: DensityMatrix, qs) -> DensityMatrix:
    """Apply non-selective measurements of ``qs[0], qs[1], ...`` in order.

    The composition is generally non-commutative: reordering the observables
    changes the final state.

    Parameters
    ----------
    rho : DensityMatrix
        Initial state.
    qs : iterable of HermitianOperator
        Observables, measured first-to-last.  An empty sequence returns
        ``rho`` unchanged.
    """
    out = rho
    for q in qs:
        out = apply_measurement(out, q)
    return out


def evolve_unitary(
    rho: DensityMatrix, model: SystemModel, u: float, dt: float
) -> DensityMatrix:
    """Evolve a state for time ``dt`` under constant control amplitude ``u``.

    Implements ``rho -> U rho U^dag`` with ``U = exp(-i (h0 - u * mu) dt)``,
    computed through the Hermitian eigendecomposition of the controlled
    Hamiltonian.

    Parameters
    ----------
    rho : DensityMatrix
        Input state, same dimension as the model.
    model : SystemModel
        Drift and coupling operators.
    u : float
        Control amplitude (finite).
    dt : float
        Evolution time, ``dt >= 0``.  ``dt == 0`` returns ``rho`` unchanged.

    Raises
    ------
    ValidationError
        On dimension mismatch, non-finite ``u``, or negative ``dt``.
    NumericalError
        If the eigensolver fails to converge.
    """
    if rho.dim != model.dim:
        raise ValidationError(
            f"dimension mismatch: state has dim {rho.dim}, model has dim {model.dim}"
        )
    if not np.isfinite(u):
        raise ValidationError(f"control amplitude must be finite, got {u!r}")
    if dt < 0:
        raise ValidationError(f"evolution time must be non-negative, got {dt!r}")
    if dt == 0.0:
        return rho
    hamiltonian = model.h0.matrix - u * model.mu.matrix
    try:
        evals, vecs = np.linalg.eigh(hamiltonian)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    propagator = (vecs * np.exp(-1j * evals * dt)) @ vecs.conj().T
    out = propagator @ rho.matrix @ propagator.conj().T
    return DensityMatrix._trusted(0.5 * (out + out.conj().T))


def expectation(rho: DensityMatrix, o: HermitianOperator) -> float:
    """Expectation value ``Tr[rho O]`` as a real number.

    Raises
    ------
    NumericalError
        If the imaginary residue of the trace exceeds ``IMAG_RESIDUE_ATOL``
        (cannot happen for validated inputs; guards corrupted data).
    """
    if rho.dim != o.dim:
        raise ValidationError(
            f"dimension mismatch: state has dim {rho.dim}, operator has dim {o.dim}"
        )
    value = complex(np.trace(rho.matrix @ o.matrix))
    if abs(value.imag) > IMAG_RESIDUE_ATOL:
        raise NumericalError(
            f"expectation has imaginary residue {value.imag:.3e} "
            f"above {IMAG_RESIDUE_ATOL:.0e}"
        )
    return value.real


def purity(rho: DensityMatrix) -> float:
    """Purity ``Tr[rho^2]``, between ``1/dim`` (maximally mixed) and ``1`` (pure)."""
    return float(np.trace(rho.matrix @ rho.matrix).real)
