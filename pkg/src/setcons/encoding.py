"""Partition of the universe into cells and the bit-vector encoding of sets.

The m distinguished generator sets cut the universe into at most 2**m
nonempty cells; every set built from the generators by union, intersection
and complement is an exact union of cells and therefore round-trips through
a kappa-bit vector (bit h = overlap with cell h).  A constant-free update
map translates into kappa independent copies of one n-bit binary map, which
is where all convergence questions are decided.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .bindyn import BinaryMap, discrete_derivative, semantic_incidence
from .boolmat import BoolMatrix
from .caps import DEFAULT, Caps
from .errors import CapExceeded, CellEncodingError
from .expr import SetExpr, SetMap, bit_evaluate
from .intervals import IntervalSet, Universe

Bits = tuple[int, ...]


@dataclass(frozen=True)
class Partition:
    """Nonempty cells generated by the distinguished sets.

    Cells are listed with the all-generators-in signature first, then in
    decreasing order of the signature read as a binary number whose most
    significant bit says "inside generator 1".
    """

    generators: tuple[IntervalSet, ...]
    universe: Universe
    signatures: tuple[Bits, ...]
    regions: tuple[IntervalSet, ...]

    @property
    def kappa(self) -> int:
        return len(self.regions)

    def cells(self):
        return zip(self.signatures, self.regions)

    def encode(self, s: IntervalSet) -> Bits:
        """Bit h = 1 iff the set overlaps cell h; the set must be an exact
        union of cells, otherwise the encoding would be lossy."""
        bits = tuple(0 if (s & region).is_empty() else 1 for region in self.regions)
        if self.decode(bits) != s:
            for bit, region in zip(bits, self.regions):
                if bit and not region.is_subset(s):
                    raise CellEncodingError(
                        f"{s} straddles the cell {region}; it is not in the algebra "
                        "generated by the partition's generators"
                    )
            raise CellEncodingError(f"{s} is not a union of partition cells")
        return bits

    def decode(self, bits: Sequence[int]) -> IntervalSet:
        if len(bits) != self.kappa:
            raise ValueError(f"expected {self.kappa} bits, got {len(bits)}")
        out = IntervalSet.empty()
        for bit, region in zip(bits, self.regions):
            if bit:
                out = out | region
        return out

    def to_json_dict(self) -> dict:
        return {
            "cells": [
                {"signature": "".join(str(b) for b in sig), "region": str(region)}
                for sig, region in self.cells()
            ]
        }


def build_partition(
    generators: Sequence[IntervalSet], universe: Universe, caps: Caps = DEFAULT
) -> Partition:
    """Compute all nonempty signature cells of the generator family."""
    gens = tuple(generators)
    for g in gens:
        if not universe.contains_set(g):
            raise ValueError(f"generator {g} escapes the universe {universe}")
    m = len(gens)
    if m > caps.generators:
        raise CapExceeded(f"{m} generators would create up to 2**{m} cells (cap {caps.generators})")
    complements = [universe.complement(g) for g in gens]
    signatures = []
    regions = []
    for code in range((1 << m) - 1, -1, -1):
        sig = tuple((code >> (m - 1 - i)) & 1 for i in range(m))
        region = universe.carrier
        for i, bit in enumerate(sig):
            region = region & (gens[i] if bit else complements[i])
            if region.is_empty():
                break
        if not region.is_empty():
            signatures.append(sig)
            regions.append(region)
    return Partition(gens, universe, tuple(signatures), tuple(regions))


@dataclass(frozen=True)
class EncodedSystem:
    """A constant-free map together with its binary translation.

    ``cell_map(h)`` is the n-bit map acting inside cell h; frozen components
    output the pinned constant's bit for that cell, every other component is
    the source expression with set operations replaced by bitwise ones.  The
    full map on n*kappa bits (variable-major layout) carries the
    block-structured incidence matrix.
    """

    set_map: SetMap
    partition: Partition
    pinned_bits: tuple[Bits, ...]  # per frozen variable, its kappa-bit encoding

    @property
    def arity(self) -> int:
        return self.set_map.arity

    @property
    def kappa(self) -> int:
        return self.partition.kappa

    def _cell_step(self, h: int):
        n = self.arity
        first_frozen = n - self.set_map.frozen_count
        comps: tuple[SetExpr, ...] = self.set_map.components
        pinned = tuple(self.pinned_bits[j][h] for j in range(self.set_map.frozen_count))

        def fn(bits):
            out = []
            for i in range(n):
                if i >= first_frozen:
                    out.append(pinned[i - first_frozen])
                else:
                    out.append(bit_evaluate(comps[i], bits))
            return tuple(out)

        return fn

    def cell_map(self, h: int) -> BinaryMap:
        return BinaryMap(self.arity, self._cell_step(h))

    @property
    def map(self) -> BinaryMap:
        n, k = self.arity, self.kappa
        cell_steps = [self._cell_step(h) for h in range(k)]

        def fn(bits):
            out = [0] * (n * k)
            for h in range(k):
                cell_in = tuple(bits[i * k + h] for i in range(n))
                cell_out = cell_steps[h](cell_in)
                for i in range(n):
                    out[i * k + h] = cell_out[i]
            return tuple(out)

        return BinaryMap(n * k, fn, incidence=self.set_map.incidence().kron_identity(k))

    def encode_state(self, state: Sequence[IntervalSet]) -> Bits:
        if len(state) != self.arity:
            raise ValueError("state arity mismatch")
        bits: list[int] = []
        for s in state:
            bits.extend(self.partition.encode(s))
        return tuple(bits)

    def decode_state(self, bits: Sequence[int]) -> tuple[IntervalSet, ...]:
        n, k = self.arity, self.kappa
        if len(bits) != n * k:
            raise ValueError("bit vector length mismatch")
        return tuple(self.partition.decode(bits[i * k : (i + 1) * k]) for i in range(n))

    def derivative_at(self, bits: Sequence[int]) -> BoolMatrix:
        """Block-diagonal derivative of the full map: flipping a bit of cell h
        can only move outputs inside cell h."""
        n, k = self.arity, self.kappa
        rows = [0] * (n * k)
        for h in range(k):
            cell_bits = tuple(bits[i * k + h] for i in range(n))
            d = discrete_derivative(self.cell_map(h), cell_bits)
            for i in range(n):
                for j in range(n):
                    if d.entry(i, j):
                        rows[i * k + h] |= 1 << (j * k + h)
        return BoolMatrix(n * k, tuple(rows))


def translate_map(f: SetMap, partition: Partition) -> EncodedSystem:
    """Translate a constant-free map into its binary cell-wise form.

    Named constants must have been folded into frozen variables first; the
    frozen values themselves must be unions of partition cells.
    """
    if f.constants:
        raise ValueError("translate_map needs a constant-free map; augment it first")
    pinned = tuple(partition.encode(v) for v in f.frozen_values)
    return EncodedSystem(f, partition, pinned)


def block_incidence_check(f: SetMap, partition: Partition, caps: Caps = DEFAULT) -> bool:
    """Structural check of the translated map's incidence: the dependency
    matrix extracted from the per-cell binary map, blown up cell-blockwise,
    must equal the source map's incidence Kroneckered with the identity."""
    enc = translate_map(f, partition)
    observed = semantic_incidence(enc.cell_map(0), caps).kron_identity(enc.kappa)
    expected = f.incidence().kron_identity(enc.kappa)
    return observed == expected
