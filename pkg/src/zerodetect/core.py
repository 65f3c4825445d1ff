"""Core types and operations shared by every other module.

Conventions: indices in user-facing structures are 1-based, matrices are
dense row-major complex128, and all randomness flows through RngSpec
(counter-based Philox streams, so equal seeds give bit-identical draws).
All types here are immutable after construction and safe to share across
concurrent tasks; the operations are pure functions.
"""

import re
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadValue,
    CmatFormatError,
    DimensionMismatch,
    ZeroColumn,
)

UNIT_NORM_TOL = 1e-10
ZERO_COLUMN_TOL = 1e-14


def as_complex_matrix(entries) -> np.ndarray:
    """Validate and return a dense complex matrix (n, p >= 1, all entries finite)."""
    a = np.asarray(entries, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise BadValue(f"expected a 2-D matrix with n, p >= 1, got shape {a.shape}")
    if not (np.all(np.isfinite(a.real)) and np.all(np.isfinite(a.imag))):
        raise BadValue("matrix entries must be finite")
    return np.ascontiguousarray(a)


def _locked_copy(a: np.ndarray) -> np.ndarray:
    out = np.array(a, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class GroupPartition:
    """Contiguous equal-size blocks: group i (1-based) covers columns (i-1)r+1 .. ir."""

    q: int
    r: int

    def __post_init__(self):
        if self.q < 1 or self.r < 1:
            raise BadValue(f"group partition needs q, r >= 1, got q={self.q}, r={self.r}")

    @property
    def p(self) -> int:
        return self.q * self.r

    def block(self, group_index: int) -> slice:
        """Column slice (0-based) of the given 1-based group index."""
        if not 1 <= group_index <= self.q:
            raise BadValue(f"group index {group_index} outside 1..{self.q}")
        return slice((group_index - 1) * self.r, group_index * self.r)

    def group_of_column(self, column: int) -> int:
        """1-based group index of a 1-based column index."""
        if not 1 <= column <= self.p:
            raise BadValue(f"column {column} outside 1..{self.p}")
        return (column - 1) // self.r + 1


@dataclass(frozen=True, eq=False)
class MeasurementMatrix:
    """Complex n x p matrix with unit-norm columns, optionally block-partitioned."""

    matrix: np.ndarray
    groups: GroupPartition | None = None

    def __post_init__(self):
        a = _locked_copy(as_complex_matrix(self.matrix))
        object.__setattr__(self, "matrix", a)
        norms = column_norms(a)
        bad = np.nonzero(np.abs(norms - 1.0) > UNIT_NORM_TOL)[0]
        if bad.size:
            j = int(bad[0])
            raise BadValue(
                f"column {j + 1} has norm {norms[j]!r}, not unit within {UNIT_NORM_TOL}"
            )
        if self.groups is not None and self.groups.p != a.shape[1]:
            raise BadValue(
                f"partition covers {self.groups.p} columns but matrix has {a.shape[1]}"
            )

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def p(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True)
class SupportSet:
    """Sorted set of 1-based indices over elements or groups."""

    indices: tuple[int, ...]
    domain_size: int

    def __post_init__(self):
        if self.domain_size < 1:
            raise BadValue("domain size must be >= 1")
        prev = 0
        for i in self.indices:
            if not isinstance(i, int) or not 1 <= i <= self.domain_size:
                raise BadValue(f"index {i} outside 1..{self.domain_size}")
            if i <= prev:
                raise BadValue("indices must be strictly increasing (sorted, no duplicates)")
            prev = i

    @classmethod
    def from_indices(cls, indices, domain_size: int) -> "SupportSet":
        ix = sorted(int(i) for i in indices)
        if len(set(ix)) != len(ix):
            raise BadValue("duplicate indices in support set")
        return cls(tuple(ix), domain_size)

    @classmethod
    def from_zero_based(cls, indices, domain_size: int) -> "SupportSet":
        return cls.from_indices((int(i) + 1 for i in indices), domain_size)

    def complement(self) -> "SupportSet":
        inside = set(self.indices)
        return SupportSet(
            tuple(i for i in range(1, self.domain_size + 1) if i not in inside),
            self.domain_size,
        )

    def to_zero_based(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=np.intp) - 1

    def to_set(self) -> set[int]:
        return set(self.indices)

    def __len__(self) -> int:
        return len(self.indices)

    def __contains__(self, i) -> bool:
        return i in set(self.indices)


@dataclass(frozen=True, eq=False)
class SignalInstance:
    """A p-vector together with its support I, zero-support E and sparsity k.

    Invariants: x is nonzero exactly on I, E is the complement of I, |I| = k.
    """

    x: np.ndarray
    support: SupportSet
    zero_support: SupportSet
    k: int

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.complex128)
        if x.ndim != 1:
            raise BadValue("signal must be a 1-D vector")
        object.__setattr__(self, "x", _locked_copy(x))
        p = x.shape[0]
        if self.support.domain_size != p or self.zero_support.domain_size != p:
            raise BadValue("support domain size does not match signal length")
        if len(self.support) != self.k:
            raise BadValue(f"|support| = {len(self.support)} but k = {self.k}")
        if self.zero_support.indices != self.support.complement().indices:
            raise BadValue("zero-support is not the complement of the support")
        on = self.x[self.support.to_zero_based()]
        off = self.x[self.zero_support.to_zero_based()]
        if np.any(on == 0):
            raise BadValue("signal is zero somewhere on its declared support")
        if np.any(off != 0):
            raise BadValue("signal is nonzero somewhere on its declared zero-support")

    @classmethod
    def from_vector(cls, x) -> "SignalInstance":
        x = np.asarray(x, dtype=np.complex128)
        nz = np.nonzero(x)[0]
        p = x.shape[0]
        support = SupportSet.from_zero_based(nz, p)
        return cls(x, support, support.complement(), len(nz))

    @property
    def p(self) -> int:
        return self.x.shape[0]


def _seed_words(value: int) -> tuple[int, int]:
    # split a 64-bit value into uint32 words for SeedSequence spawn keys
    return (value & 0xFFFFFFFF, value >> 32)


@dataclass(frozen=True)
class RngSpec:
    """Reproducible random source: (masterSeed, streamId) fully determine all draws.

    Streams are backed by Philox, a counter-based generator, so draws are a
    pure function of the key; derived substreams are order-independent and
    safe to evaluate concurrently.
    """

    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_id"):
            v = getattr(self, name)
            if not isinstance(v, int) or not 0 <= v < 2**64:
                raise BadValue(f"{name} must be a 64-bit unsigned integer, got {v!r}")

    def _sequence(self, path: tuple[int, ...]) -> np.random.SeedSequence:
        key = _seed_words(self.stream_id)
        for v in path:
            if not isinstance(v, int) or not 0 <= v < 2**64:
                raise BadValue(f"substream path entries must be 64-bit unsigned, got {v!r}")
            key += _seed_words(v)
        return np.random.SeedSequence(entropy=self.master_seed, spawn_key=key)

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(self._sequence(())))

    def substream(self, *path: int) -> np.random.Generator:
        """Generator for a derived stream; equal (spec, path) give identical draws."""
        return np.random.Generator(np.random.Philox(self._sequence(path)))


# ---------------------------------------------------------------------------
# operations


def _matrix_of(m) -> np.ndarray:
    if isinstance(m, MeasurementMatrix):
        return m.matrix
    return as_complex_matrix(m)


def column_norms(m) -> np.ndarray:
    """Euclidean norm of every column."""
    return np.linalg.norm(_matrix_of(m), axis=0)


def normalize_columns(m) -> MeasurementMatrix:
    """Scale each column to unit norm, preserving direction.

    Raises ZeroColumn for any column with norm below 1e-14. Group metadata is
    preserved when the input is already a MeasurementMatrix.
    """
    groups = m.groups if isinstance(m, MeasurementMatrix) else None
    a = _matrix_of(m)
    norms = column_norms(a)
    small = np.nonzero(norms < ZERO_COLUMN_TOL)[0]
    if small.size:
        raise ZeroColumn(int(small[0]) + 1)
    return MeasurementMatrix(a / norms[np.newaxis, :], groups=groups)


def hermitian_apply(m, y) -> np.ndarray:
    """Correlate measurements with every column: s_j = <a_j, y> = a_j^H y."""
    a = _matrix_of(m)
    y = np.asarray(y, dtype=np.complex128)
    if y.ndim != 1 or y.shape[0] != a.shape[0]:
        raise DimensionMismatch(
            f"expected a length-{a.shape[0]} vector, got shape {y.shape}"
        )
    return a.conj().T @ y


# ---------------------------------------------------------------------------
# CMAT v1 text format
#
# Line 1: "n p". Optional comment lines start with '#'; a "# meta:" comment
# carries space-separated key=value tokens. Then n rows of p whitespace-
# separated entries, each written as re{+|-}imj with 17 significant digits
# (readers also accept an 'i' suffix or a bare real token).

_ENTRY_RE = re.compile(r"^[0-9eE+\-.]+[ij]?$")


def format_cmat_entry(z: complex) -> str:
    return f"{z.real:.17g}{z.imag:+.17g}j"


def parse_cmat_entry(token: str) -> complex:
    t = token.strip()
    if not t or not _ENTRY_RE.match(t):
        raise CmatFormatError(f"malformed complex entry {token!r}")
    if t[-1] in "iI":
        t = t[:-1] + "j"
    try:
        return complex(t)
    except ValueError as exc:
        raise CmatFormatError(f"malformed complex entry {token!r}") from exc


def write_cmat(path, m, meta: dict | None = None) -> None:
    """Write a matrix in CMAT v1, with an optional '# meta:' comment line."""
    a = _matrix_of(m)
    n, p = a.shape
    lines = [f"{n} {p}"]
    if meta:
        for key, value in meta.items():
            if " " in str(key) or " " in str(value):
                raise BadValue("meta keys and values must not contain spaces")
        tokens = " ".join(f"{k}={v}" for k, v in meta.items())
        lines.append(f"# meta: {tokens}")
    for row in a:
        lines.append(" ".join(format_cmat_entry(z) for z in row))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def read_cmat(path) -> tuple[np.ndarray, dict[str, str]]:
    """Read a CMAT v1 file; returns (matrix, meta). Comment lines are skipped."""
    meta: dict[str, str] = {}
    header: tuple[int, int] | None = None
    rows: list[list[complex]] = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("meta:"):
                    for token in body[len("meta:"):].split():
                        if "=" not in token:
                            raise CmatFormatError(f"line {lineno}: bad meta token {token!r}")
                        k, v = token.split("=", 1)
                        meta[k] = v
                continue
            if header is None:
                parts = line.split()
                if len(parts) != 2:
                    raise CmatFormatError(f"line {lineno}: expected header 'n p'")
                try:
                    header = (int(parts[0]), int(parts[1]))
                except ValueError as exc:
                    raise CmatFormatError(f"line {lineno}: expected header 'n p'") from exc
                if header[0] < 1 or header[1] < 1:
                    raise CmatFormatError(f"line {lineno}: header must satisfy n, p >= 1")
                continue
            tokens = line.split()
            if len(tokens) != header[1]:
                raise CmatFormatError(
                    f"line {lineno}: expected {header[1]} entries, found {len(tokens)}"
                )
            rows.append([parse_cmat_entry(t) for t in tokens])
    if header is None:
        raise CmatFormatError("missing 'n p' header line")
    if len(rows) != header[0]:
        raise CmatFormatError(f"expected {header[0]} data rows, found {len(rows)}")
    return np.asarray(rows, dtype=np.complex128), meta
