"""Bipartite qutrit pure states over the 3x3 product basis.

Single-particle levels are labelled by the trits +1, 0, -1.  A joint basis
cell pairs one trit for particle A (the row) with one for particle B (the
column); the nine cells carry the short labels

    U1 U2 U3     row +1
    V1 V2 V3     row  0
    W1 W2 W3     row -1

with the column subscript 1, 2, 3 standing for +1, 0, -1.  A pure state is
a unit-Frobenius-norm complex 3x3 coefficient matrix over these cells.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

#: trit labels in row/column order: index 0 -> +1, 1 -> 0, 2 -> -1
TRITS = (1, 0, -1)
_ROW_LETTERS = "UVW"

NORM_TOL = 1e-12
NORM_WARN_TOL = 1e-9


class CellParseError(ValueError):
    """Raised when a basis-cell label cannot be parsed."""


class StateConstructionError(ValueError):
    """Raised for invalid term lists (duplicates, all-zero input)."""


class SingularOperatorError(ValueError):
    """Raised when a local operator is numerically singular."""


@dataclass(frozen=True, order=True)
class BasisCell:
    """One product-basis cell, stored as (row trit, column trit)."""

    row: int
    col: int

    def __post_init__(self):
        if self.row not in TRITS or self.col not in TRITS:
            raise CellParseError(f"trit labels must be in {TRITS}, got ({self.row}, {self.col})")

    @property
    def row_index(self) -> int:
        return TRITS.index(self.row)

    @property
    def col_index(self) -> int:
        return TRITS.index(self.col)

    @property
    def flat_index(self) -> int:
        """Row-major position in 0..8 with the (+1, 0, -1) ordering."""
        return 3 * self.row_index + self.col_index

    @property
    def label(self) -> str:
        """Short label such as ``U1`` or ``W3``."""
        return f"{_ROW_LETTERS[self.row_index]}{self.col_index + 1}"

    @classmethod
    def from_flat(cls, index: int) -> "BasisCell":
        if not 0 <= index <= 8:
            raise CellParseError(f"flat index out of range: {index}")
        return cls(TRITS[index // 3], TRITS[index % 3])

    def __str__(self) -> str:
        return self.label


def parse_cell(label: str) -> BasisCell:
    """Parse a cell label (``U1`` .. ``W3``, case-insensitive) or a pair form
    like ``(+1,-1)`` giving (row trit, column trit)."""
    if not isinstance(label, str):
        raise CellParseError(f"cell label must be a string, got {type(label).__name__}")
    text = label.strip()
    compact = text.replace(" ", "")
    if compact.startswith("(") and compact.endswith(")"):
        parts = compact[1:-1].split(",")
        if len(parts) != 2:
            raise CellParseError(f"pair form needs two trits: {label!r}")
        try:
            row, col = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise CellParseError(f"bad trit in {label!r}") from exc
        if row not in TRITS or col not in TRITS:
            raise CellParseError(f"trits must be +1, 0 or -1: {label!r}")
        return BasisCell(row, col)
    up = compact.upper()
    if len(up) == 2 and up[0] in _ROW_LETTERS and up[1] in "123":
        return BasisCell(TRITS[_ROW_LETTERS.index(up[0])], TRITS[int(up[1]) - 1])
    raise CellParseError(f"unknown basis cell label: {label!r}")


ALL_CELLS: tuple[BasisCell, ...] = tuple(BasisCell.from_flat(i) for i in range(9))


@dataclass(frozen=True)
class SupportPattern:
    """A subset of the nine basis cells, canonically a 9-bit mask."""

    bitmask: int

    def __post_init__(self):
        if not 0 < self.bitmask < 512:
            raise ValueError(f"bitmask must select between 1 and 9 cells, got {self.bitmask}")

    @classmethod
    def from_cells(cls, cells: Iterable[BasisCell]) -> "SupportPattern":
        mask = 0
        for cell in cells:
            mask |= 1 << cell.flat_index
        return cls(mask)

    @classmethod
    def from_labels(cls, labels: str | Iterable[str]) -> "SupportPattern":
        if isinstance(labels, str):
            labels = [part for part in labels.split(",") if part.strip()]
        return cls.from_cells(parse_cell(lab) for lab in labels)

    @property
    def cells(self) -> tuple[BasisCell, ...]:
        """Member cells in ascending flat-index order."""
        return tuple(ALL_CELLS[i] for i in range(9) if self.bitmask >> i & 1)

    @property
    def k(self) -> int:
        return bin(self.bitmask).count("1")

    @property
    def labels(self) -> str:
        return ",".join(cell.label for cell in self.cells)

    def complement(self) -> "SupportPattern":
        return SupportPattern(0b111111111 ^ self.bitmask)

    def __contains__(self, cell: BasisCell) -> bool:
        return bool(self.bitmask >> cell.flat_index & 1)

    def __iter__(self):
        return iter(self.cells)

    def __len__(self) -> int:
        return self.k

    def __str__(self) -> str:
        return self.labels


@dataclass(frozen=True)
class TermSpec:
    """One expansion term: a cell, a nonnegative magnitude and a phase."""

    cell: BasisCell
    magnitude: float
    phase: float = 0.0

    def __post_init__(self):
        if self.magnitude < 0:
            raise StateConstructionError(f"magnitude must be >= 0, got {self.magnitude}")
        object.__setattr__(self, "phase", float(self.phase) % (2 * np.pi))

    @property
    def value(self) -> complex:
        return self.magnitude * np.exp(1j * self.phase)


@dataclass(frozen=True)
class PureState:
    """Normalized coefficient matrix; psi = sum_{r,c} coeff[r,c] |r>|c>."""

    coeff: np.ndarray
    input_norm: float = 1.0
    norm_warning: bool = field(default=False, compare=False)

    def __post_init__(self):
        mat = np.array(self.coeff, dtype=complex)
        if mat.shape != (3, 3):
            raise StateConstructionError(f"coefficient matrix must be 3x3, got {mat.shape}")
        norm = float(np.linalg.norm(mat))
        if norm == 0.0:
            raise StateConstructionError("all-zero state")
        if abs(norm - 1.0) > NORM_TOL:
            raise StateConstructionError(f"state not normalized: |M| = {norm!r}")
        mat.setflags(write=False)
        object.__setattr__(self, "coeff", mat)

    def amplitude(self, cell: BasisCell) -> complex:
        return complex(self.coeff[cell.row_index, cell.col_index])

    def terms(self, tol: float = 1e-12) -> list[TermSpec]:
        """Decompose back into term specs (cells with |amplitude| > tol)."""
        out = []
        for cell in ALL_CELLS:
            z = self.amplitude(cell)
            if abs(z) > tol:
                out.append(TermSpec(cell, abs(z), float(np.angle(z) % (2 * np.pi))))
        return out


def build_state(terms: Sequence[TermSpec], normalize: bool = True) -> PureState:
    """Assemble a state from term specs.

    Duplicate cells and all-zero term lists are rejected.  With ``normalize``
    the matrix is scaled to unit Frobenius norm; an input norm off by more
    than 1e-9 is recorded on the state and reported through ``warnings``.
    """
    if not terms:
        raise StateConstructionError("term list is empty")
    seen = set()
    mat = np.zeros((3, 3), dtype=complex)
    for term in terms:
        if term.cell in seen:
            raise StateConstructionError(f"duplicate cell {term.cell.label}")
        seen.add(term.cell)
        mat[term.cell.row_index, term.cell.col_index] = term.value
    norm = float(np.linalg.norm(mat))
    if norm == 0.0:
        raise StateConstructionError("all magnitudes are zero")
    deviated = abs(norm - 1.0) > NORM_WARN_TOL
    if normalize:
        if deviated:
            warnings.warn(f"input norm {norm:.9g} deviates from 1; renormalizing", stacklevel=2)
        mat = mat / norm
    return PureState(mat, input_norm=norm, norm_warning=deviated)


def support_of(state: PureState, tol: float = 1e-12) -> SupportPattern:
    """Cells where |coefficient| exceeds ``tol``."""
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    cells = [cell for cell in ALL_CELLS if abs(state.amplitude(cell)) > tol]
    return SupportPattern.from_cells(cells)


def random_state(pattern: SupportPattern, seed) -> PureState:
    """Seeded random state supported on ``pattern``.

    Real and imaginary parts on pattern cells are independent standard
    normals from ``numpy.random.default_rng(seed)``; the matrix is then
    normalized.  Equal seeds give byte-identical coefficients.
    """
    rng = np.random.default_rng(seed)
    mat = np.zeros((3, 3), dtype=complex)
    for cell in pattern.cells:
        re, im = rng.standard_normal(2)
        mat[cell.row_index, cell.col_index] = re + 1j * im
    mat /= np.linalg.norm(mat)
    return PureState(mat)


def apply_local(state: PureState, op_a: np.ndarray, op_b: np.ndarray,
                renormalize: bool = True) -> PureState:
    """Apply local operators to the two particles.

    The coefficient matrix transforms as ``op_a @ M @ op_b.T``: particle A
    acts on rows, particle B enters transposed so matrix algebra matches
    the tensor action (Q_A tensor Q_B).  Operators must be nonsingular
    (smallest singular value > 1e-12).
    """
    op_a = np.asarray(op_a, dtype=complex)
    op_b = np.asarray(op_b, dtype=complex)
    for name, op in (("op_a", op_a), ("op_b", op_b)):
        if op.shape != (3, 3):
            raise SingularOperatorError(f"{name} must be 3x3, got {op.shape}")
        smin = np.linalg.svd(op, compute_uv=False)[-1]
        if smin <= 1e-12:
            raise SingularOperatorError(f"{name} is singular (smallest singular value {smin:.3g})")
    mat = op_a @ state.coeff @ op_b.T
    norm = float(np.linalg.norm(mat))
    if renormalize:
        return PureState(mat / norm, input_norm=norm)
    if abs(norm - 1.0) > NORM_TOL:
        raise StateConstructionError(
            f"result norm {norm:.9g} != 1; pass renormalize=True for non-unitary operators")
    return PureState(mat)


# -- reference states -------------------------------------------------------

_SQ2 = 1.0 / np.sqrt(2.0)
_SQ3 = 1.0 / np.sqrt(3.0)
_SQ6 = 1.0 / np.sqrt(6.0)


def type_i_state() -> PureState:
    """(|11> + |00>)/sqrt(2): the two-term extremal representative."""
    return build_state([TermSpec(parse_cell("U1"), _SQ2), TermSpec(parse_cell("V2"), _SQ2)])


def type_ii_state() -> PureState:
    """(|11> + |00> + |-1-1>)/sqrt(3): the maximally entangled representative."""
    return build_state([TermSpec(parse_cell(lab), _SQ3) for lab in ("U1", "V2", "W3")])


def type_iii_state() -> PureState:
    """Six-term extremal representative with all amplitudes 1/sqrt(6)."""
    cells = ("U1", "W3", "U2", "V1", "V3", "W2")
    return build_state([TermSpec(parse_cell(lab), _SQ6) for lab in cells])


# -- state files ------------------------------------------------------------

def state_to_dict(state: PureState) -> dict:
    """JSON-ready dict in the term-list schema."""
    return {"terms": [
        {"cell": t.cell.label, "magnitude": float(t.magnitude), "phase": float(t.phase)}
        for t in state.terms()
    ]}


def state_from_dict(data: dict, normalize: bool = True) -> PureState:
    """Parse the term-list schema; unknown keys are rejected."""
    if not isinstance(data, dict):
        raise StateConstructionError("state document must be a JSON object")
    extra = set(data) - {"terms"}
    if extra:
        raise StateConstructionError(f"unknown keys in state document: {sorted(extra)}")
    if "terms" not in data or not isinstance(data["terms"], list):
        raise StateConstructionError("state document needs a 'terms' list")
    terms = []
    for i, item in enumerate(data["terms"]):
        if not isinstance(item, dict):
            raise StateConstructionError(f"term {i} is not an object")
        extra = set(item) - {"cell", "magnitude", "phase"}
        if extra:
            raise StateConstructionError(f"unknown keys in term {i}: {sorted(extra)}")
        if "cell" not in item or "magnitude" not in item:
            raise StateConstructionError(f"term {i} needs 'cell' and 'magnitude'")
        terms.append(TermSpec(parse_cell(item["cell"]),
                              float(item["magnitude"]),
                              float(item.get("phase", 0.0))))
    return build_state(terms, normalize=normalize)


def load_state(path) -> PureState:
    """Load a state file (JSON term list)."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise StateConstructionError(f"invalid JSON in {path}: {exc}") from exc
    return state_from_dict(data)


def save_state(state: PureState, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(state_to_dict(state), fh, indent=2)
        fh.write("\n")
