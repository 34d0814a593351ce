"""The quantum probability calculus.

A probability operator is a hermitian, unit-trace, positive semidefinite
operator; the probability it assigns to an eventuality is tr(P e). On
composites, reduced operators arise by partial trace, joint tables by
pairing commuting lifted observables, and conditioning by the projector
sandwich e P e / tr(P e). Decoherence of a provisional operator over an
observable is the sandwich sum over its channels; pure inputs decompose
into branch vectors. Conditioning on an eventuality of probability below
the zero threshold is a loud error, never a silent NaN.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import SpaceMismatchError, StructureError, ZeroProbabilityError
from .hilbert import (
    CompositeSpace,
    HilbertSpace,
    Op,
    Vec,
    cheb_norm,
    partial_trace,
    structure_check,
)
from .lattice import Eventuality
from .observables import Observable

__all__ = [
    "HERMITIAN_TOL",
    "TRACE_TOL",
    "PSD_TOL",
    "ZERO_PROBABILITY_THRESHOLD",
    "ProbabilityOperator",
    "CollapseResult",
    "JointProbabilityMatrix",
    "BranchDecomposition",
    "CorrelationReport",
    "born",
    "reduce_composite",
    "collapse",
    "joint_matrix",
    "conditional",
    "luder",
    "branch_decompose",
    "heisenberg_transport",
    "correlation_check",
]

# Invariant tolerances for a probability operator.
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10

# Below this, an eventuality cannot be conditioned on.
ZERO_PROBABILITY_THRESHOLD = 1e-12


@dataclass(frozen=True, eq=False)
class ProbabilityOperator:
    """A hermitian, unit-trace, positive semidefinite operator.

    The invariants are enforced at construction: hermitian residual within
    1e-10, trace within 1e-10 of 1, smallest eigenvalue above -1e-10.
    """

    space: HilbertSpace
    matrix: Op

    def __post_init__(self):
        if self.matrix.space != self.space:
            raise SpaceMismatchError(f"matrix on {self.matrix.space} does not live on {self.space}")
        herm = structure_check(self.matrix, "hermitian", HERMITIAN_TOL)
        if not herm:
            raise StructureError(
                f"probability operator must be hermitian: residual {herm.residual:.3e} exceeds {HERMITIAN_TOL:.0e}",
                residual=herm.residual,
            )
        trace_residual = abs(self.matrix.trace() - 1.0)
        if trace_residual > TRACE_TOL:
            raise StructureError(
                f"probability operator must have unit trace: residual {trace_residual:.3e} exceeds {TRACE_TOL:.0e}",
                residual=trace_residual,
            )
        psd = structure_check(self.matrix, "psd", PSD_TOL)
        if not psd:
            raise StructureError(
                f"probability operator must be positive semidefinite: residual {psd.residual:.3e} exceeds {PSD_TOL:.0e}",
                residual=psd.residual,
            )

    # -- constructors -------------------------------------------------

    @classmethod
    def from_entries(cls, space: HilbertSpace, entries) -> "ProbabilityOperator":
        return cls(space, Op(space, entries))

    @classmethod
    def pure(cls, state: Vec, tol: float = 1e-10) -> "ProbabilityOperator":
        state.require_unit(tol)
        return cls(state.space, state.outer(state))

    @classmethod
    def isotropic(cls, space: HilbertSpace) -> "ProbabilityOperator":
        """The no-information operator I/N."""
        return cls(space, Op(space, np.eye(space.dim, dtype=np.complex128) / space.dim))

    @classmethod
    def diagonal(cls, space: HilbertSpace, weights) -> "ProbabilityOperator":
        w = np.array(list(weights), dtype=np.float64)
        if w.shape != (space.dim,):
            raise ValueError(f"{w.shape[0]} weights do not fit dim {space.dim}")
        return cls(space, Op(space, np.diag(w.astype(np.complex128))))

    def __repr__(self) -> str:
        return f"ProbabilityOperator({self.space})"


def born(prob: ProbabilityOperator, e: Eventuality) -> float:
    """Probability tr(P e) of an eventuality. Raw value; clamping to
    [0, 1] is presentation-side only."""
    if prob.space != e.space:
        raise SpaceMismatchError(f"operator on {prob.space} does not match eventuality on {e.space}")
    return float(np.trace(prob.matrix.entries @ e.projector.entries).real)


def reduce_composite(state, comp: CompositeSpace, keep: int) -> ProbabilityOperator:
    """Reduced probability operator on one factor of a composite. Accepts
    a composite state vector or probability operator."""
    if isinstance(state, Vec):
        state = ProbabilityOperator.pure(state)
    if not isinstance(state, ProbabilityOperator):
        raise TypeError("reduce_composite needs a Vec or a ProbabilityOperator")
    reduced = partial_trace(state.matrix, comp, keep)
    return ProbabilityOperator(reduced.space, reduced)


class CollapseResult(NamedTuple):
    operator: ProbabilityOperator
    probability: float


def collapse(
    prob: ProbabilityOperator,
    e: Eventuality,
    threshold: float = ZERO_PROBABILITY_THRESHOLD,
) -> CollapseResult:
    """A-posteriori operator e P e / tr(P e) together with tr(P e).

    Conditioning on an eventuality of probability <= threshold raises
    ZeroProbabilityError.
    """
    p = born(prob, e)
    if p <= threshold:
        raise ZeroProbabilityError(
            f"cannot condition on an eventuality of probability {p:.3e} (threshold {threshold:.0e})",
            probability=p,
            threshold=threshold,
        )
    proj = e.projector
    sandwich = proj @ prob.matrix @ proj
    return CollapseResult(ProbabilityOperator(prob.space, sandwich / p), p)


@dataclass(frozen=True, eq=False)
class JointProbabilityMatrix:
    """Joint probabilities tr(P a_i b_j) over two commuting observables."""

    row_observable: Observable
    col_observable: Observable
    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64)
        expected = (self.row_observable.channel_count, self.col_observable.channel_count)
        if arr.shape != expected:
            raise ValueError(f"joint matrix shape {arr.shape} does not match channel counts {expected}")
        if float(arr.min()) < -1e-10:
            raise ValueError(f"joint matrix has a negative entry: {float(arr.min()):.3e}")
        total_residual = abs(float(arr.sum()) - 1.0)
        if total_residual > 1e-10:
            raise ValueError(f"joint matrix must total 1: residual {total_residual:.3e} exceeds 1e-10")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def row_marginals(self) -> np.ndarray:
        return self.values.sum(axis=1)

    def col_marginals(self) -> np.ndarray:
        return self.values.sum(axis=0)


def joint_matrix(
    prob: ProbabilityOperator,
    rows: Observable,
    cols: Observable,
    tol: float = 1e-10,
) -> JointProbabilityMatrix:
    """Joint probability table over two observables on the operator's
    space. Every channel pair must commute within tol; a violation is
    rejected naming the pair."""
    if rows.space != prob.space or cols.space != prob.space:
        raise SpaceMismatchError("joint_matrix needs observables on the operator's space")
    for la, ea in zip(rows.labels, rows.channels):
        for lb, eb in zip(cols.labels, cols.channels):
            pa, pb = ea.projector.entries, eb.projector.entries
            r = cheb_norm(pa @ pb - pb @ pa)
            if r > tol:
                raise StructureError(
                    f"channels {la!r} and {lb!r} do not commute: residual {r:.3e} exceeds {tol:.0e}",
                    residual=r,
                )
    m = prob.matrix.entries
    out = np.empty((rows.channel_count, cols.channel_count), dtype=np.float64)
    for i, ea in enumerate(rows.channels):
        for j, eb in enumerate(cols.channels):
            out[i, j] = float(np.trace(m @ ea.projector.entries @ eb.projector.entries).real)
    return JointProbabilityMatrix(rows, cols, out)


def conditional(
    prob: ProbabilityOperator,
    given: Eventuality,
    target: Observable,
    threshold: float = ZERO_PROBABILITY_THRESHOLD,
) -> np.ndarray:
    """Probabilities of the target channels after conditioning on `given`."""
    cond = collapse(prob, given, threshold).operator
    return np.array([born(cond, ch) for ch in target.channels], dtype=np.float64)


def luder(prob: ProbabilityOperator, obs: Observable) -> ProbabilityOperator:
    """Decohere over an observable: the sandwich sum of e P e over its
    channels. Idempotent, and it preserves every channel probability."""
    if obs.space != prob.space:
        raise SpaceMismatchError(f"observable on {obs.space} does not match operator on {prob.space}")
    total = np.zeros((prob.space.dim, prob.space.dim), dtype=np.complex128)
    m = prob.matrix.entries
    for ch in obs.channels:
        p = ch.projector.entries
        total = total + p @ m @ p
    return ProbabilityOperator.from_entries(prob.space, total)


@dataclass(frozen=True, eq=False)
class BranchDecomposition:
    """Per-channel outcome of decomposing a state over an observable.

    Posterior operators are absent (None) for channels at or below the
    zero-probability threshold; those channel indices are flagged. For a
    pure input the unnormalized branch vectors e_i |psi> are kept, and
    they sum back to the input vector.
    """

    observable: Observable
    probabilities: tuple[float, ...]
    posteriors: tuple[ProbabilityOperator | None, ...]
    branch_vectors: tuple[Vec, ...] | None
    zero_channels: tuple[int, ...]
    threshold: float


def branch_decompose(
    state,
    obs: Observable,
    threshold: float = ZERO_PROBABILITY_THRESHOLD,
) -> BranchDecomposition:
    """Decompose a pure or mixed state over an observable's channels."""
    vec: Vec | None = None
    if isinstance(state, Vec):
        vec = state
        prob = ProbabilityOperator.pure(state)
    elif isinstance(state, ProbabilityOperator):
        prob = state
    else:
        raise TypeError("branch_decompose needs a Vec or a ProbabilityOperator")
    if obs.space != prob.space:
        raise SpaceMismatchError(f"observable on {obs.space} does not match state on {prob.space}")
    probs = [born(prob, ch) for ch in obs.channels]
    total_residual = abs(sum(probs) - 1.0)
    if total_residual > 1e-10:
        raise ValueError(
            f"channel probabilities must total 1: residual {total_residual:.3e} exceeds 1e-10 "
            "(is the observable complete?)"
        )
    posteriors: list[ProbabilityOperator | None] = []
    zero: list[int] = []
    for i, (p, ch) in enumerate(zip(probs, obs.channels)):
        if p <= threshold:
            posteriors.append(None)
            zero.append(i)
        else:
            posteriors.append(collapse(prob, ch, threshold).operator)
    branch_vectors = None
    if vec is not None:
        branch_vectors = tuple(ch.projector @ vec for ch in obs.channels)
    return BranchDecomposition(
        obs, tuple(probs), tuple(posteriors), branch_vectors, tuple(zero), threshold
    )


def heisenberg_transport(x, u: Op, tol: float = 1e-10):
    """Transport an eventuality or observable by a unitary: the projector
    maps to u^dag P u, so the basis columns map by u^dag. Non-unitary
    input is rejected with its residual."""
    report = structure_check(u, "unitary", tol)
    if not report:
        raise StructureError(
            f"transport needs a unitary: residual {report.residual:.3e} exceeds {tol:.0e}",
            residual=report.residual,
        )
    if isinstance(x, Eventuality):
        if x.space != u.space:
            raise SpaceMismatchError(f"eventuality on {x.space} does not match unitary on {u.space}")
        return Eventuality.from_orthonormal(x.space, u.entries.conj().T @ x.basis_matrix)
    if isinstance(x, Observable):
        channels = tuple(heisenberg_transport(ch, u, tol) for ch in x.channels)
        return Observable(x.space, channels, x.labels)
    raise TypeError("heisenberg_transport needs an Eventuality or an Observable")


@dataclass(frozen=True)
class CorrelationReport:
    """Whether two observables are adequately correlated under a state:
    matching channel counts, small off-diagonal joint mass, and rows of
    the conditional table close to the identity pattern."""

    row_channels: int
    col_channels: int
    off_diagonal_mass: float
    max_conditional_deviation: float
    skipped_rows: tuple[int, ...]
    tol: float

    @property
    def counts_match(self) -> bool:
        return self.row_channels == self.col_channels

    @property
    def adequately_correlated(self) -> bool:
        return (
            self.counts_match
            and self.off_diagonal_mass <= self.tol
            and self.max_conditional_deviation <= self.tol
        )

    def __bool__(self) -> bool:
        return self.adequately_correlated


def correlation_check(
    prob: ProbabilityOperator,
    rows: Observable,
    cols: Observable,
    tol: float = 1e-10,
    threshold: float = ZERO_PROBABILITY_THRESHOLD,
) -> CorrelationReport:
    """Measure how close two observables come to perfect correlation
    under a state: off-diagonal joint mass and the worst deviation of the
    conditional table from the identity. Rows whose marginal is at or
    below the zero threshold are skipped and reported."""
    jm = joint_matrix(prob, rows, cols, tol=max(tol, 1e-10))
    n, k = jm.values.shape
    off_mass = float(jm.values.sum() - np.trace(jm.values[: min(n, k), : min(n, k)]))
    marginals = jm.row_marginals()
    worst = 0.0
    skipped: list[int] = []
    for i in range(n):
        if marginals[i] <= threshold:
            skipped.append(i)
            continue
        row = jm.values[i] / marginals[i]
        for j in range(k):
            want = 1.0 if i == j else 0.0
            worst = max(worst, abs(row[j] - want))
    return CorrelationReport(n, k, off_mass, worst, tuple(skipped), tol)
