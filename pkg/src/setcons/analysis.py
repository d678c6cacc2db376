"""Top-level convergence analyzers for set-valued systems.

Global contractivity is decided on the 0/1 projection of the incidence
matrix and, when a partition is supplied, cross-checked against nilpotency
of the translated map's block incidence on n*kappa bits.  Local
attractiveness of an equilibrium is decided on the derivative of the
translated binary map.  Consensus existence for linear maps reduces to the
intersection of row unions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .bindyn import equilibria as binary_equilibria
from .bindyn import is_vnn_attractive
from .boolmat import (
    BoolMatrix,
    Permutation,
    column_at_most_one,
    find_dependency_cycle,
    find_strict_triangular_permutation,
    is_nilpotent,
    nilpotency_index,
)
from .caps import DEFAULT, Caps
from .encoding import EncodedSystem, Partition, translate_map
from .errors import CapExceeded
from .expr import LinearSetMap, SetMap
from .intervals import IntervalSet

SetVector = tuple[IntervalSet, ...]


def set_distance(x: Sequence[IntervalSet], y: Sequence[IntervalSet]) -> SetVector:
    """Componentwise symmetric difference of two set vectors."""
    if len(x) != len(y):
        raise ValueError("arity mismatch")
    return tuple(a ^ b for a, b in zip(x, y))


def incidence_apply(b: BoolMatrix, d: Sequence[IntervalSet]) -> SetVector:
    """Incidence matrix times set vector: row i unions the d_j it selects."""
    if b.n != len(d):
        raise ValueError("dimension mismatch")
    out = []
    for i in range(b.n):
        acc = IntervalSet.empty()
        for j in range(b.n):
            if b.entry(i, j):
                acc = acc | d[j]
        out.append(acc)
    return tuple(out)


def check_distance_bound(f: SetMap, x: Sequence[IntervalSet], y: Sequence[IntervalSet]) -> bool:
    """Whether distance(f(x), f(y)) is componentwise inside B(f) * distance(x, y).

    Always true; exposed as a test utility.
    """
    lhs = set_distance(f.eval(x), f.eval(y))
    rhs = incidence_apply(f.incidence(), set_distance(x, y))
    return all(l.is_subset(r) for l, r in zip(lhs, rhs))


def find_bound_counterexample(
    f: SetMap, m: BoolMatrix, partition: Partition, caps: Caps = DEFAULT
) -> tuple[SetVector, SetVector] | None:
    """A state pair violating the distance bound for a candidate matrix ``m``.

    Exists exactly when ``m`` misses a live dependency of ``f``; the pair is
    built from one cell region and a binary witness of that dependency.
    """
    from .bindyn import dependency_witness, semantic_incidence

    enc = translate_map(f, partition)
    live = semantic_incidence(enc.cell_map(0), caps)
    for i in range(f.arity):
        for j in range(f.arity):
            if live.entry(i, j) and not m.entry(i, j):
                bits = dependency_witness(enc.cell_map(0), i, j, caps)
                assert bits is not None
                region = partition.regions[0]
                x = tuple(region if b else IntervalSet.empty() for b in bits)
                y = x[:j] + (x[j] ^ region,) + x[j + 1 :]
                lhs = set_distance(f.eval(x), f.eval(y))
                rhs = incidence_apply(m, set_distance(x, y))
                assert not lhs[i].is_subset(rhs[i])
                return x, y
    return None


@dataclass(frozen=True)
class ContractivityVerdict:
    """Outcome of the global convergence test on an n-variable map.

    ``witness`` triangularizes the 0/1 incidence projection when the map is
    contractive; ``cycle`` names a dependency cycle when it is not.  ``q``
    bounds the number of rounds to the unique fixed point.
    """

    contractive: bool
    witness: Permutation | None = None
    q: int | None = None
    cycle: tuple[int, ...] | None = None

    def __bool__(self) -> bool:
        return self.contractive

    def to_json_dict(self) -> dict:
        return {
            "contractive": self.contractive,
            "witness_order": list(self.witness.order) if self.witness else None,
            "q": self.q,
            "cycle": list(self.cycle) if self.cycle else None,
        }


def is_contractive_sbm(f: SetMap, partition: Partition | None = None) -> ContractivityVerdict:
    """Decide global contractivity on the incidence matrix's 0/1 projection.

    The map must be constant-free (augment first).  With a partition, the
    verdict is cross-validated against nilpotency of the translated map's
    n*kappa block incidence; the two can never disagree.
    """
    if f.constants:
        raise ValueError("contractivity needs a constant-free map; augment it first")
    shadow = f.incidence()
    witness = find_strict_triangular_permutation(shadow)
    if partition is not None:
        enc = translate_map(f, partition)
        big_verdict = is_nilpotent(enc.map.incidence)
        if big_verdict != (witness is not None):
            raise AssertionError("projection and encoded-map verdicts disagree")
    if witness is None:
        cycle = find_dependency_cycle(shadow)
        assert cycle is not None
        return ContractivityVerdict(False, cycle=cycle)
    q = nilpotency_index(shadow)
    return ContractivityVerdict(True, witness=witness, q=q)


def global_fixed_point(
    f: SetMap,
    start: Sequence[IntervalSet],
    partition: Partition | None = None,
    verdict: ContractivityVerdict | None = None,
) -> SetVector:
    """Iterate a contractive map to its unique fixed point.

    The result is verified to be independent of the start by re-running from
    the componentwise complement (frozen components stay pinned).
    """
    verdict = verdict or is_contractive_sbm(f, partition)
    if not verdict.contractive:
        raise ValueError("the map is not contractive; no unique fixed point is guaranteed")
    start = tuple(start)
    if len(start) != f.arity:
        raise ValueError("start state arity mismatch")
    k = f.frozen_count
    if k and start[f.arity - k :] != f.frozen_values:
        raise ValueError("frozen components of the start must carry their pinned values")
    assert verdict.q is not None
    state = start
    for _ in range(verdict.q):
        state = f.eval(state)
    n_visible = f.arity - k
    other = tuple(f.universe.complement(s) for s in start[:n_visible]) + f.frozen_values
    check = other
    for _ in range(verdict.q):
        check = f.eval(check)
    if check != state:
        raise AssertionError("two starts reached different fixed points")
    return state


@dataclass(frozen=True)
class CellEquilibriaReport:
    """Fixed points of the translated map, cell by cell.

    The map's equilibria are exactly the independent combinations of one
    per-cell fixed point for every cell, so ``total`` is the product of the
    per-cell counts.  ``listed`` expands them into set vectors when the
    count stays under the listing cap.
    """

    partition: Partition
    per_cell: tuple[tuple[tuple[int, ...], ...], ...]
    total: int
    listed: tuple[SetVector, ...] | None

    def to_json_dict(self) -> dict:
        out = {
            "cells": self.partition.kappa,
            "per_cell_counts": [len(fps) for fps in self.per_cell],
            "total": self.total,
        }
        if self.listed is not None:
            out["equilibria"] = [[str(s) for s in vec] for vec in self.listed]
        return out


def equilibria_sbm(
    f: SetMap, partition: Partition, caps: Caps = DEFAULT, list_all: bool = True
) -> CellEquilibriaReport:
    """Enumerate equilibria through the per-cell structure of the encoding."""
    enc = translate_map(f, partition)
    n, k = f.arity, partition.kappa
    n_free = n - f.frozen_count
    if n_free > caps.enumeration:
        raise CapExceeded(f"per-cell enumeration needs 2**{n_free} states (cap {caps.enumeration})")
    per_cell: list[tuple[tuple[int, ...], ...]] = []
    for h in range(k):
        g = enc.cell_map(h)
        pinned = tuple(enc.pinned_bits[j][h] for j in range(f.frozen_count))
        fixed = []
        for mask in range(1 << n_free):
            bits = tuple((mask >> i) & 1 for i in range(n_free)) + pinned
            if g.step(bits) == bits:
                fixed.append(bits)
        per_cell.append(tuple(sorted(fixed)))
    total = 1
    for fps in per_cell:
        total *= len(fps)
    listed: tuple[SetVector, ...] | None = None
    if list_all and 0 < total <= caps.listing:
        listed = tuple(_expand_equilibria(enc, per_cell))
    return CellEquilibriaReport(partition, tuple(per_cell), total, listed)


def _expand_equilibria(enc: EncodedSystem, per_cell) -> list[SetVector]:
    n, k = enc.arity, enc.kappa
    out: list[SetVector] = []

    def rec(h: int, chosen: list[tuple[int, ...]]):
        if h == k:
            bits = [0] * (n * k)
            for cell, cell_bits in enumerate(chosen):
                for i in range(n):
                    bits[i * k + cell] = cell_bits[i]
            out.append(enc.decode_state(bits))
            return
        for fp in per_cell[h]:
            rec(h + 1, chosen + [fp])

    rec(0, [])
    return out


def is_locally_attractive_sbm(f: SetMap, x_eq: Sequence[IntervalSet], partition: Partition) -> bool:
    """Attractiveness of an equilibrium in its one-complemented-component
    neighborhood, decided on the translated map's derivative."""
    x_eq = tuple(x_eq)
    if f.eval(x_eq) != x_eq:
        raise ValueError("not an equilibrium")
    k = f.frozen_count
    if k and x_eq[f.arity - k :] != f.frozen_values:
        raise ValueError("frozen components of the equilibrium must carry their pinned values")
    enc = translate_map(f, partition)
    bits = enc.encode_state(x_eq)
    d = enc.derivative_at(bits)
    return is_nilpotent(d) and column_at_most_one(d)


def is_locally_attractive_direct(f: SetMap, x_eq: Sequence[IntervalSet]) -> bool:
    """The same property checked by direct set-level simulation over the
    neighborhood (each neighbor complements one whole component)."""
    x_eq = tuple(x_eq)
    if f.eval(x_eq) != x_eq:
        raise ValueError("not an equilibrium")
    hood = [x_eq] + [
        x_eq[:j] + (f.universe.complement(x_eq[j]),) + x_eq[j + 1 :] for j in range(f.arity)
    ]
    hood_set = set(hood)
    for y in hood:
        if f.eval(y) not in hood_set:
            return False
    for y in hood:
        state = y
        for _ in range(f.arity):
            state = f.eval(state)
        if state != x_eq:
            return False
    return True


@dataclass(frozen=True)
class ConsensusVerdict:
    """Existence and extent of common fixed points of a linear map: every
    nonempty subset of ``region`` is a consensus value."""

    exists: bool
    region: IntervalSet

    def __bool__(self) -> bool:
        return self.exists

    def to_json_dict(self) -> dict:
        return {"exists": self.exists, "region": str(self.region)}


def consensus_region(linear: LinearSetMap) -> ConsensusVerdict:
    """Intersection over rows of each row's coefficient union."""
    region = linear.universe.carrier
    for row in linear.entries:
        row_union = IntervalSet.empty()
        for e in row:
            row_union = row_union | e
        region = region & row_union
    return ConsensusVerdict(not region.is_empty(), region)


def binary_vnn_verdicts(f, caps: Caps = DEFAULT) -> list[tuple[tuple[int, ...], bool]]:
    """Every equilibrium of a binary map with its attractiveness verdict."""
    return [(x, is_vnn_attractive(f, x)) for x in binary_equilibria(f, caps)]
