"""Square binary matrices over the (or, and) semiring.

Rows are stored as Python int bitmasks (bit j of ``rows[i]`` is entry
``(i, j)``), which makes joins, products and powers cheap word operations.
The nilpotency test and the strict-triangularization search are implemented
by two independent routes on purpose: matrix powers for the former, source
elimination on the dependency digraph for the latter.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .caps import DEFAULT, Caps
from .intervals import IntervalSet, Universe


def _bits_of(mask: int):
    j = 0
    while mask:
        if mask & 1:
            yield j
        mask >>= 1
        j += 1


@dataclass(frozen=True, slots=True)
class BoolMatrix:
    n: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if self.n < 0 or len(self.rows) != self.n:
            raise ValueError("row count must equal the declared dimension")
        if self.n > DEFAULT.matrix_dim:
            raise ValueError(f"matrix dimension {self.n} exceeds cap {DEFAULT.matrix_dim}")
        mask = (1 << self.n) - 1
        for r in self.rows:
            if r & ~mask:
                raise ValueError("row mask has bits outside the matrix")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]]) -> "BoolMatrix":
        masks = []
        for row in rows:
            m = 0
            for j, bit in enumerate(row):
                if bit not in (0, 1, False, True):
                    raise ValueError("entries must be 0 or 1")
                if bit:
                    m |= 1 << j
            masks.append(m)
        return cls(len(masks), tuple(masks))

    @classmethod
    def zero(cls, n: int) -> "BoolMatrix":
        return cls(n, (0,) * n)

    @classmethod
    def identity(cls, n: int) -> "BoolMatrix":
        return cls(n, tuple(1 << i for i in range(n)))

    def entry(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1

    def is_zero(self) -> bool:
        return not any(self.rows)

    def __matmul__(self, other: "BoolMatrix") -> "BoolMatrix":
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        out = []
        for row in self.rows:
            acc = 0
            for k in _bits_of(row):
                acc |= other.rows[k]
            out.append(acc)
        return BoolMatrix(self.n, tuple(out))

    def power(self, k: int) -> "BoolMatrix":
        if k < 0:
            raise ValueError("negative power")
        result = BoolMatrix.identity(self.n)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def apply(self, v: "BoolVector") -> "BoolVector":
        if v.n != self.n:
            raise ValueError("dimension mismatch")
        mask = 0
        for i, row in enumerate(self.rows):
            if row & v.mask:
                mask |= 1 << i
        return BoolVector(self.n, mask)

    def transpose(self) -> "BoolMatrix":
        out = [0] * self.n
        for i, row in enumerate(self.rows):
            for j in _bits_of(row):
                out[j] |= 1 << i
        return BoolMatrix(self.n, tuple(out))

    def le(self, other: "BoolMatrix") -> bool:
        """Elementwise order: every 1 of self is a 1 of other."""
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        return all(r & ~s == 0 for r, s in zip(self.rows, other.rows))

    def kron_identity(self, k: int) -> "BoolMatrix":
        """Kronecker product with the k-dimensional identity.

        Index layout is variable-major: original index i maps to the block
        of indices i*k .. i*k + k - 1.
        """
        big = []
        for row in self.rows:
            block = 0
            for j in _bits_of(row):
                block |= 1 << (j * k)
            for h in range(k):
                big.append(block << h)
        return BoolMatrix(self.n * k, tuple(big))

    def to_lists(self) -> list[list[int]]:
        return [[self.entry(i, j) for j in range(self.n)] for i in range(self.n)]

    def __str__(self) -> str:
        return "\n".join(" ".join(str(self.entry(i, j)) for j in range(self.n)) for i in range(self.n))


@dataclass(frozen=True, slots=True)
class BoolVector:
    n: int
    mask: int

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BoolVector":
        mask = 0
        count = 0
        for j, bit in enumerate(bits):
            count += 1
            if bit:
                mask |= 1 << j
        return cls(count, mask)

    def bit(self, j: int) -> int:
        return (self.mask >> j) & 1

    def bits(self) -> tuple[int, ...]:
        return tuple(self.bit(j) for j in range(self.n))

    def scale(self, scalar: int) -> "BoolVector":
        return self if scalar else BoolVector(self.n, 0)

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits())


@dataclass(frozen=True, slots=True)
class Permutation:
    """order[k] = original index placed at position k."""

    order: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.order) != list(range(len(self.order))):
            raise ValueError("not a permutation")

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @property
    def n(self) -> int:
        return len(self.order)

    def to_matrix(self) -> BoolMatrix:
        # Column k holds a 1 at row order[k], so P^T A P conjugates by order.
        rows = [0] * self.n
        for k, i in enumerate(self.order):
            rows[i] |= 1 << k
        return BoolMatrix(self.n, tuple(rows))

    def conjugate(self, a: BoolMatrix) -> BoolMatrix:
        if a.n != self.n:
            raise ValueError("dimension mismatch")
        return BoolMatrix.from_rows(
            [[a.entry(self.order[i], self.order[j]) for j in range(self.n)] for i in range(self.n)]
        )

    def permute_vector(self, v: BoolVector) -> BoolVector:
        if v.n != self.n:
            raise ValueError("dimension mismatch")
        return BoolVector.from_bits(v.bit(self.order[i]) for i in range(self.n))


def is_strictly_lower(a: BoolMatrix) -> bool:
    return all(row >> i == 0 for i, row in enumerate(a.rows))


def is_nilpotent(a: BoolMatrix) -> bool:
    """True iff the n-th Boolean power of ``a`` vanishes."""
    if a.n == 0:
        return True
    m = a
    steps = 1
    while steps < a.n:
        m = m @ m
        steps *= 2
    return m.is_zero()


def nilpotency_index(a: BoolMatrix) -> int | None:
    """Smallest positive q with a**q = 0, or None if there is no such q."""
    m = a
    for q in range(1, a.n + 1):
        if m.is_zero():
            return q
        m = m @ a
    return 1 if a.n == 0 else None


def find_strict_triangular_permutation(a: BoolMatrix) -> Permutation | None:
    """A permutation conjugating ``a`` to strictly lower triangular form.

    Runs source elimination on the dependency digraph (edge i -> j when
    entry (i, j) is set): repeatedly emit the lowest-index row that is zero
    on the still-alive columns.  Succeeds exactly when ``a`` is nilpotent.
    """
    alive = (1 << a.n) - 1
    order = []
    for _ in range(a.n):
        pick = None
        for i in _bits_of(alive):
            if a.rows[i] & alive == 0:
                pick = i
                break
        if pick is None:
            return None
        order.append(pick)
        alive &= ~(1 << pick)
    return Permutation(tuple(order))


def find_dependency_cycle(a: BoolMatrix) -> tuple[int, ...] | None:
    """Some directed cycle of the dependency digraph, or None if acyclic."""
    alive = (1 << a.n) - 1
    changed = True
    while changed:
        changed = False
        for i in _bits_of(alive):
            if a.rows[i] & alive == 0:
                alive &= ~(1 << i)
                changed = True
    if alive == 0:
        return None
    start = next(_bits_of(alive))
    path = [start]
    seen = {start: 0}
    while True:
        cur = path[-1]
        nxt = next(_bits_of(a.rows[cur] & alive))
        if nxt in seen:
            return tuple(path[seen[nxt]:])
        seen[nxt] = len(path)
        path.append(nxt)


def column_at_most_one(a: BoolMatrix) -> bool:
    for j in range(a.n):
        if sum(a.entry(i, j) for i in range(a.n)) > 1:
            return False
    return True


# -- spectral tests for matrices of sets -------------------------------------


def has_empty_eigenvalue(entries: Sequence[Sequence[IntervalSet]], universe: Universe) -> bool:
    """True iff some column's union falls short of the whole universe."""
    n = len(entries)
    for row in entries:
        if len(row) != n:
            raise ValueError("matrix must be square")
    for j in range(n):
        col_union = IntervalSet.empty()
        for i in range(n):
            col_union = col_union | entries[i][j]
        if col_union != universe.carrier:
            return True
    return False


def has_universe_eigenvalue(entries: Sequence[Sequence[IntervalSet]], universe: Universe) -> bool:
    """For matrices with entries in {empty, universe} only: whether the
    whole-universe scalar is an eigenvalue, decided on the 0/1 projection."""
    n = len(entries)
    rows = []
    for row in entries:
        if len(row) != n:
            raise ValueError("matrix must be square")
        mask = 0
        for j, e in enumerate(row):
            if e == universe.carrier:
                mask |= 1 << j
            elif not e.is_empty():
                raise ValueError(f"entry {e} is neither empty nor the universe")
        rows.append(mask)
    shadow = BoolMatrix(n, tuple(rows))
    return find_strict_triangular_permutation(shadow) is None
