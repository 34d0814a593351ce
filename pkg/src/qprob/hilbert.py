"""Complex vectors and operators on small finite-dimensional Hilbert spaces.

Values are immutable and every function is pure. The Kronecker convention
is row-major (first factor is the slow index); all composite index
arithmetic in the package derives from that single choice. Structural
predicates (hermitian, unitary, projector, psd) are toleranced and report
their defining residual in the Chebyshev (max absolute entry) norm.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from string import ascii_lowercase

import numpy as np

from .errors import SpaceMismatchError, StructureError

__all__ = [
    "HilbertSpace",
    "Vec",
    "Op",
    "CompositeSpace",
    "StructureReport",
    "STRUCTURE_KINDS",
    "cheb_norm",
    "commutator",
    "tensor",
    "partial_trace",
    "structure_check",
]


def cheb_norm(a) -> float:
    """Chebyshev norm of an array: the maximum absolute entry."""
    arr = np.asarray(a)
    return 0.0 if arr.size == 0 else float(np.abs(arr).max())


@dataclass(frozen=True)
class HilbertSpace:
    """A finite-dimensional complex Hilbert space, identified by dimension
    and label. Two spaces compare equal iff both match."""

    dim: int
    label: str = ""

    def __post_init__(self):
        if not isinstance(self.dim, int) or self.dim < 1:
            raise ValueError(f"Hilbert space dimension must be a positive integer, got {self.dim!r}")

    def __str__(self) -> str:
        return self.label or f"H{self.dim}"


def _require_same_space(a: HilbertSpace, b: HilbertSpace, what: str) -> None:
    if a != b:
        raise SpaceMismatchError(f"{what} requires matching spaces, got {a} (dim {a.dim}) and {b} (dim {b.dim})")


def _frozen_complex(data, shape: tuple[int, ...], what: str) -> np.ndarray:
    arr = np.array(data, dtype=np.complex128)
    if arr.shape != shape:
        raise ValueError(f"{what} must have shape {shape}, got {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Vec:
    """An immutable vector with complex components on a fixed space."""

    space: HilbertSpace
    components: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "components", _frozen_complex(self.components, (self.space.dim,), "vector components")
        )

    @classmethod
    def basis(cls, space: HilbertSpace, index: int) -> "Vec":
        if not 0 <= index < space.dim:
            raise ValueError(f"basis index {index} out of range for dim {space.dim}")
        comp = np.zeros(space.dim, dtype=np.complex128)
        comp[index] = 1.0
        return cls(space, comp)

    def norm(self) -> float:
        return float(np.linalg.norm(self.components))

    def inner(self, other: "Vec") -> complex:
        """Inner product <self|other>, conjugate-linear in self."""
        _require_same_space(self.space, other.space, "inner product")
        return complex(np.vdot(self.components, other.components))

    def outer(self, other: "Vec") -> "Op":
        """Rank-one operator |self><other|."""
        _require_same_space(self.space, other.space, "outer product")
        return Op(self.space, np.outer(self.components, other.components.conj()))

    def is_unit(self, tol: float = 1e-10) -> bool:
        return abs(self.norm() ** 2 - 1.0) <= tol

    def require_unit(self, tol: float = 1e-10) -> "Vec":
        residual = abs(self.norm() ** 2 - 1.0)
        if residual > tol:
            raise StructureError(
                f"state vector must have unit squared norm: residual {residual:.3e} exceeds {tol:.0e}",
                residual=residual,
            )
        return self

    def __add__(self, other: "Vec") -> "Vec":
        _require_same_space(self.space, other.space, "vector sum")
        return Vec(self.space, self.components + other.components)

    def __sub__(self, other: "Vec") -> "Vec":
        _require_same_space(self.space, other.space, "vector difference")
        return Vec(self.space, self.components - other.components)

    def __mul__(self, scalar) -> "Vec":
        return Vec(self.space, self.components * complex(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "Vec":
        return Vec(self.space, -self.components)

    def __repr__(self) -> str:
        return f"Vec({self.space}, {np.array2string(self.components, precision=6)})"


@dataclass(frozen=True, eq=False)
class Op:
    """An immutable square operator with complex entries on a fixed space."""

    space: HilbertSpace
    entries: np.ndarray

    def __post_init__(self):
        d = self.space.dim
        object.__setattr__(self, "entries", _frozen_complex(self.entries, (d, d), "operator entries"))

    @classmethod
    def identity(cls, space: HilbertSpace) -> "Op":
        return cls(space, np.eye(space.dim, dtype=np.complex128))

    @classmethod
    def zero(cls, space: HilbertSpace) -> "Op":
        return cls(space, np.zeros((space.dim, space.dim), dtype=np.complex128))

    def dagger(self) -> "Op":
        return Op(self.space, self.entries.conj().T)

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def allclose(self, other: "Op", tol: float = 1e-10) -> bool:
        _require_same_space(self.space, other.space, "operator comparison")
        return cheb_norm(self.entries - other.entries) <= tol

    def __matmul__(self, other):
        if isinstance(other, Op):
            _require_same_space(self.space, other.space, "operator product")
            return Op(self.space, self.entries @ other.entries)
        if isinstance(other, Vec):
            _require_same_space(self.space, other.space, "operator application")
            return Vec(self.space, self.entries @ other.components)
        return NotImplemented

    def __add__(self, other: "Op") -> "Op":
        _require_same_space(self.space, other.space, "operator sum")
        return Op(self.space, self.entries + other.entries)

    def __sub__(self, other: "Op") -> "Op":
        _require_same_space(self.space, other.space, "operator difference")
        return Op(self.space, self.entries - other.entries)

    def __mul__(self, scalar) -> "Op":
        return Op(self.space, self.entries * complex(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "Op":
        return Op(self.space, self.entries / complex(scalar))

    def __neg__(self) -> "Op":
        return Op(self.space, -self.entries)

    def __repr__(self) -> str:
        return f"Op({self.space}, {np.array2string(self.entries, precision=6)})"


def commutator(a: Op, b: Op) -> Op:
    _require_same_space(a.space, b.space, "commutator")
    return Op(a.space, a.entries @ b.entries - b.entries @ a.entries)


def _product_label(a: HilbertSpace, b: HilbertSpace) -> str:
    # Flat join keeps labels associative, matching entrywise associativity
    # of the Kronecker product. ASCII so CLI output is locale-independent.
    return f"{a}*{b}"


@dataclass(frozen=True)
class CompositeSpace:
    """An ordered tensor factorization. The product space is derived with
    the same label rule as `tensor`, so factor-built and tensor-built
    values land on equal spaces."""

    factors: tuple[HilbertSpace, ...]

    def __post_init__(self):
        factors = tuple(self.factors)
        if not factors:
            raise ValueError("a composite space needs at least one factor")
        object.__setattr__(self, "factors", factors)

    @cached_property
    def space(self) -> HilbertSpace:
        dim = 1
        for f in self.factors:
            dim *= f.dim
        label = str(self.factors[0])
        for f in self.factors[1:]:
            label = f"{label}*{f}"
        return HilbertSpace(dim, label)

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(f.dim for f in self.factors)

    def dim_before(self, index: int) -> int:
        out = 1
        for f in self.factors[:index]:
            out *= f.dim
        return out

    def dim_after(self, index: int) -> int:
        out = 1
        for f in self.factors[index + 1:]:
            out *= f.dim
        return out

    def factor_index(self, space: HilbertSpace) -> int:
        """Resolve the unique factor equal to `space`; ambiguity is an error."""
        hits = [i for i, f in enumerate(self.factors) if f == space]
        if not hits:
            raise SpaceMismatchError(f"space {space} is not a factor of {self.space}")
        if len(hits) > 1:
            raise SpaceMismatchError(f"space {space} appears {len(hits)} times in {self.space}; pass the factor index")
        return hits[0]


def tensor(a, b):
    """Kronecker product of two vectors or two operators (row-major:
    the first argument is the slow index)."""
    if isinstance(a, Vec) and isinstance(b, Vec):
        space = HilbertSpace(a.space.dim * b.space.dim, _product_label(a.space, b.space))
        return Vec(space, np.kron(a.components, b.components))
    if isinstance(a, Op) and isinstance(b, Op):
        space = HilbertSpace(a.space.dim * b.space.dim, _product_label(a.space, b.space))
        return Op(space, np.kron(a.entries, b.entries))
    raise TypeError("tensor expects two Vec or two Op arguments")


def partial_trace(m: Op, comp: CompositeSpace, keep: int) -> Op:
    """Trace out every factor of `comp` except `keep`.

    The operator must live on exactly the composite's product space;
    anything else is a structural error, not a reshape guess.
    """
    if m.space != comp.space:
        raise SpaceMismatchError(
            f"operator on {m.space} (dim {m.space.dim}) does not match factorization {comp.space} (dim {comp.dim})"
        )
    n = len(comp.factors)
    if not 0 <= keep < n:
        raise ValueError(f"keep index {keep} out of range for {n} factors")
    dims = comp.dims
    boxed = m.entries.reshape(dims + dims)
    row = ascii_lowercase[:n]
    col = list(row)
    col[keep] = "z"
    subscript = f"{row}{''.join(col)}->{row[keep]}{col[keep]}"
    reduced = np.einsum(subscript, boxed)
    return Op(comp.factors[keep], reduced)


STRUCTURE_KINDS = ("hermitian", "unitary", "projector", "psd")


@dataclass(frozen=True)
class StructureReport:
    """Outcome of a toleranced structural predicate."""

    kind: str
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tol

    def __bool__(self) -> bool:
        return self.passed


def structure_check(m: Op, kind: str, tol: float = 1e-10) -> StructureReport:
    """Check a structural predicate and report its defining residual.

    Residuals (Chebyshev norm):
      hermitian  |m - m^dag|
      unitary    |m^dag m - I|
      projector  max(hermitian, |m^2 - m|)
      psd        max(hermitian, deficit of the smallest eigenvalue below 0)
    """
    if tol <= 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    if kind not in STRUCTURE_KINDS:
        raise ValueError(f"unknown structure kind {kind!r}, expected one of {STRUCTURE_KINDS}")
    a = m.entries
    herm = cheb_norm(a - a.conj().T)
    if kind == "hermitian":
        residual = herm
    elif kind == "unitary":
        residual = cheb_norm(a.conj().T @ a - np.eye(m.space.dim))
    elif kind == "projector":
        residual = max(herm, cheb_norm(a @ a - a))
    else:
        lowest = float(np.linalg.eigvalsh((a + a.conj().T) / 2.0).min())
        residual = max(herm, max(0.0, -lowest))
    return StructureReport(kind, residual, tol)
