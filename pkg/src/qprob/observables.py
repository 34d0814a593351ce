"""Observables: complete families of mutually exclusive eventualities.

An observable is a labelled tuple of eventualities meant to be pairwise
orthogonal and to jointly span the space. Construction is permissive so
that defective families can be inspected; `validate_observable` reports
the orthogonality and completeness residuals instead of guessing. A
quantitative observable attaches a distinct real value to every channel.
Lifting embeds a factor-local observable into a composite space; conjoining
two commuting lifted observables multiplies their channel families.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SpaceMismatchError, StructureError
from .hilbert import CompositeSpace, HilbertSpace, Op, cheb_norm, structure_check
from .lattice import RANK_TOL, Eventuality

__all__ = [
    "ORTHOGONALITY_TOL",
    "Observable",
    "QuantitativeObservable",
    "ObservableValidation",
    "validate_observable",
    "build_operator",
    "expectation",
    "spectral_observable",
    "lift_eventuality",
    "lift",
    "conjoin",
]

# Default tolerance for orthogonality/completeness residuals.
ORTHOGONALITY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Observable:
    """A labelled family of eventualities on one space."""

    space: HilbertSpace
    channels: tuple[Eventuality, ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        channels = tuple(self.channels)
        if not channels:
            raise ValueError("an observable needs at least one channel")
        for ch in channels:
            if ch.space != self.space:
                raise SpaceMismatchError(f"channel on {ch.space} does not live on {self.space}")
        labels = tuple(self.labels) or tuple(f"e{i + 1}" for i in range(len(channels)))
        if len(labels) != len(channels):
            raise ValueError(f"{len(channels)} channels but {len(labels)} labels")
        if len(set(labels)) != len(labels):
            raise ValueError("channel labels must be distinct")
        object.__setattr__(self, "channels", channels)
        object.__setattr__(self, "labels", labels)

    @property
    def channel_count(self) -> int:
        return len(self.channels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"no channel labelled {label!r}; have {list(self.labels)}") from None

    def channel(self, label: str) -> Eventuality:
        return self.channels[self.index(label)]

    def __repr__(self) -> str:
        return f"Observable({self.space}, {list(self.labels)})"


@dataclass(frozen=True)
class ObservableValidation:
    """Residual report for the observable invariants."""

    orthogonality_residual: float
    worst_pair: tuple[str, str] | None
    completeness_residual: float
    null_channels: tuple[str, ...]
    tol: float

    @property
    def passed(self) -> bool:
        return (
            self.orthogonality_residual <= self.tol
            and self.completeness_residual <= self.tol
            and not self.null_channels
        )

    def __bool__(self) -> bool:
        return self.passed


def validate_observable(obs: Observable, tol: float = ORTHOGONALITY_TOL) -> ObservableValidation:
    """Report how far an observable is from being a complete, mutually
    exclusive family: max pairwise product residual (with the offending
    pair), completeness residual |sum of projectors - I|, and any empty
    channels."""
    worst = 0.0
    worst_pair: tuple[str, str] | None = None
    mats = [ch.projector.entries for ch in obs.channels]
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            r = cheb_norm(mats[i] @ mats[j])
            if r > worst:
                worst = r
                worst_pair = (obs.labels[i], obs.labels[j])
    total = sum(mats, np.zeros((obs.space.dim, obs.space.dim), dtype=np.complex128))
    completeness = cheb_norm(total - np.eye(obs.space.dim))
    nulls = tuple(lbl for lbl, ch in zip(obs.labels, obs.channels) if ch.is_null)
    return ObservableValidation(worst, worst_pair, completeness, nulls, tol)


@dataclass(frozen=True, eq=False)
class QuantitativeObservable:
    """An observable with a distinct real value on every channel."""

    base: Observable
    values: tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        if len(values) != self.base.channel_count:
            raise ValueError(f"{self.base.channel_count} channels but {len(values)} values")
        if len(set(values)) != len(values):
            raise ValueError(f"channel values must be pairwise distinct, got {values}")
        object.__setattr__(self, "values", values)

    @property
    def space(self) -> HilbertSpace:
        return self.base.space


def build_operator(q: QuantitativeObservable) -> Op:
    """The hermitian operator sum(value_i * projector_i)."""
    total = np.zeros((q.space.dim, q.space.dim), dtype=np.complex128)
    for value, ch in zip(q.values, q.base.channels):
        total = total + value * ch.projector.entries
    return Op(q.space, total)


def expectation(q: QuantitativeObservable, prob) -> float:
    """Expectation value tr(P E). Accepts a probability operator or a
    bare Op; equals sum(value_i * tr(P e_i)) for a valid observable."""
    m = getattr(prob, "matrix", prob)
    if not isinstance(m, Op):
        raise TypeError("expectation needs a probability operator or an Op")
    if m.space != q.space:
        raise SpaceMismatchError(f"operator on {m.space} does not match observable on {q.space}")
    return float(np.trace(m.entries @ build_operator(q).entries).real)


def spectral_observable(m: Op, tol: float = 1e-8) -> QuantitativeObservable:
    """Spectral decomposition of a hermitian operator.

    Eigenvalues within tol of each other cluster into one channel whose
    value is the cluster mean; channels are ordered by descending value
    and labelled E0, E1, ... Rebuilding the operator from the result
    reproduces the input within tol.
    """
    report = structure_check(m, "hermitian", tol)
    if not report:
        raise StructureError(
            f"spectral decomposition needs a hermitian operator: residual {report.residual:.3e} exceeds {tol:.0e}",
            residual=report.residual,
        )
    w, v = np.linalg.eigh(m.entries)
    clusters: list[list[int]] = [[0]]
    for k in range(1, len(w)):
        if w[k] - w[clusters[-1][-1]] <= tol:
            clusters[-1].append(k)
        else:
            clusters.append([k])
    clusters.reverse()  # descending value
    channels = []
    values = []
    for idx in clusters:
        channels.append(Eventuality.from_orthonormal(m.space, v[:, idx]))
        values.append(float(np.mean(w[idx])))
    labels = tuple(f"E{i}" for i in range(len(clusters)))
    return QuantitativeObservable(Observable(m.space, tuple(channels), labels), tuple(values))


def _resolve_factor(comp: CompositeSpace, space: HilbertSpace, factor: int | None) -> int:
    if factor is None:
        return comp.factor_index(space)
    if not 0 <= factor < len(comp.factors):
        raise ValueError(f"factor index {factor} out of range")
    if comp.factors[factor] != space:
        raise SpaceMismatchError(f"factor {factor} of {comp.space} is {comp.factors[factor]}, not {space}")
    return factor


def lift_eventuality(e: Eventuality, comp: CompositeSpace, factor: int | None = None) -> Eventuality:
    """Embed a factor-local eventuality into the composite space: identity
    on every other factor. The lifted basis is the Kronecker product of
    the factor basis with the standard bases of the other factors, so no
    re-orthogonalization is needed and rank scales by the traced-out
    dimension."""
    idx = _resolve_factor(comp, e.space, factor)
    before = np.eye(comp.dim_before(idx), dtype=np.complex128)
    after = np.eye(comp.dim_after(idx), dtype=np.complex128)
    cols = np.kron(np.kron(before, e.basis_matrix), after)
    return Eventuality.from_orthonormal(comp.space, cols)


def lift(obs: Observable, comp: CompositeSpace, factor: int | None = None) -> Observable:
    """Lift every channel of a factor-local observable; labels carry over."""
    idx = _resolve_factor(comp, obs.space, factor)
    channels = tuple(lift_eventuality(ch, comp, idx) for ch in obs.channels)
    return Observable(comp.space, channels, obs.labels)


def conjoin(a: Observable, b: Observable, tol: float = ORTHOGONALITY_TOL) -> Observable:
    """Combine two commuting observables on one space into the observable
    of channel pairs, channel (i, j) being meet(a_i, b_j). Rejects
    non-commuting channel pairs, naming the offending pair."""
    if a.space != b.space:
        raise SpaceMismatchError(f"cannot conjoin observables on {a.space} and {b.space}")
    for la, ea in zip(a.labels, a.channels):
        for lb, eb in zip(b.labels, b.channels):
            r = cheb_norm(
                ea.projector.entries @ eb.projector.entries - eb.projector.entries @ ea.projector.entries
            )
            if r > tol:
                raise StructureError(
                    f"channels {la!r} and {lb!r} do not commute: residual {r:.3e} exceeds {tol:.0e}",
                    residual=r,
                )
    channels = []
    labels = []
    for la, ea in zip(a.labels, a.channels):
        for lb, eb in zip(b.labels, b.channels):
            channels.append(ea.meet(eb))
            labels.append(f"{la}&{lb}")
    return Observable(a.space, tuple(channels), tuple(labels))
