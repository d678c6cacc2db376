"""Expression trees for set-valued update maps.

A :class:`SetMap` bundles one expression per state variable together with the
universe and any named constant sets.  Expressions use only union,
intersection and complement at the core; difference and symmetric difference
desugar into those three.  Maps referencing named constants can be rewritten
into constant-free form by :func:`augment_constants`, which turns every
constant into a trailing frozen state variable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .boolmat import BoolMatrix
from .caps import DEFAULT, Caps
from .errors import CapExceeded
from .intervals import IntervalSet, Universe


class SetExpr:
    """Base class for expression nodes; instances are immutable."""

    __slots__ = ()

    def __or__(self, other: "SetExpr") -> "SetExpr":
        return Union(self, other)

    def __and__(self, other: "SetExpr") -> "SetExpr":
        return Intersect(self, other)

    def __invert__(self) -> "SetExpr":
        return Complement(self)

    def __sub__(self, other: "SetExpr") -> "SetExpr":
        return Difference(self, other)

    def __xor__(self, other: "SetExpr") -> "SetExpr":
        return SymDiff(self, other)


@dataclass(frozen=True, slots=True)
class Var(SetExpr):
    index: int


@dataclass(frozen=True, slots=True)
class ConstRef(SetExpr):
    name: str


@dataclass(frozen=True, slots=True)
class UniverseLit(SetExpr):
    pass


@dataclass(frozen=True, slots=True)
class EmptyLit(SetExpr):
    pass


@dataclass(frozen=True, slots=True)
class Union(SetExpr):
    left: SetExpr
    right: SetExpr


@dataclass(frozen=True, slots=True)
class Intersect(SetExpr):
    left: SetExpr
    right: SetExpr


@dataclass(frozen=True, slots=True)
class Complement(SetExpr):
    child: SetExpr


@dataclass(frozen=True, slots=True)
class Difference(SetExpr):
    left: SetExpr
    right: SetExpr


@dataclass(frozen=True, slots=True)
class SymDiff(SetExpr):
    left: SetExpr
    right: SetExpr


def desugar(e: SetExpr) -> SetExpr:
    """Rewrite difference/symmetric difference into the core three ops."""
    if isinstance(e, (Var, ConstRef, UniverseLit, EmptyLit)):
        return e
    if isinstance(e, Union):
        return Union(desugar(e.left), desugar(e.right))
    if isinstance(e, Intersect):
        return Intersect(desugar(e.left), desugar(e.right))
    if isinstance(e, Complement):
        return Complement(desugar(e.child))
    if isinstance(e, Difference):
        return Intersect(desugar(e.left), Complement(desugar(e.right)))
    if isinstance(e, SymDiff):
        l, r = desugar(e.left), desugar(e.right)
        return Union(Intersect(Complement(l), r), Intersect(l, Complement(r)))
    raise TypeError(f"unknown node {e!r}")


def variables_of(e: SetExpr) -> set[int]:
    if isinstance(e, Var):
        return {e.index}
    if isinstance(e, (ConstRef, UniverseLit, EmptyLit)):
        return set()
    if isinstance(e, Complement):
        return variables_of(e.child)
    return variables_of(e.left) | variables_of(e.right)


def constants_of(e: SetExpr) -> set[str]:
    if isinstance(e, ConstRef):
        return {e.name}
    if isinstance(e, (Var, UniverseLit, EmptyLit)):
        return set()
    if isinstance(e, Complement):
        return constants_of(e.child)
    return constants_of(e.left) | constants_of(e.right)


def evaluate(
    e: SetExpr,
    state: Sequence[IntervalSet],
    constants: Mapping[str, IntervalSet],
    universe: Universe,
) -> IntervalSet:
    if isinstance(e, Var):
        return state[e.index]
    if isinstance(e, ConstRef):
        try:
            return constants[e.name]
        except KeyError:
            raise ValueError(f"unbound constant {e.name!r}") from None
    if isinstance(e, UniverseLit):
        return universe.carrier
    if isinstance(e, EmptyLit):
        return IntervalSet.empty()
    if isinstance(e, Union):
        return evaluate(e.left, state, constants, universe) | evaluate(e.right, state, constants, universe)
    if isinstance(e, Intersect):
        return evaluate(e.left, state, constants, universe) & evaluate(e.right, state, constants, universe)
    if isinstance(e, Complement):
        return universe.complement(evaluate(e.child, state, constants, universe))
    if isinstance(e, Difference):
        left = evaluate(e.left, state, constants, universe)
        right = evaluate(e.right, state, constants, universe)
        return left & universe.complement(right)
    if isinstance(e, SymDiff):
        left = evaluate(e.left, state, constants, universe)
        right = evaluate(e.right, state, constants, universe)
        return left ^ right
    raise TypeError(f"unknown node {e!r}")


def bit_evaluate(e: SetExpr, bits: Sequence[int], const_bits: Mapping[str, int] = {}) -> int:
    """Evaluate an expression in the two-element algebra {0, 1}."""
    if isinstance(e, Var):
        return bits[e.index]
    if isinstance(e, ConstRef):
        try:
            return const_bits[e.name]
        except KeyError:
            raise ValueError(f"unbound constant {e.name!r}") from None
    if isinstance(e, UniverseLit):
        return 1
    if isinstance(e, EmptyLit):
        return 0
    if isinstance(e, Union):
        return bit_evaluate(e.left, bits, const_bits) | bit_evaluate(e.right, bits, const_bits)
    if isinstance(e, Intersect):
        return bit_evaluate(e.left, bits, const_bits) & bit_evaluate(e.right, bits, const_bits)
    if isinstance(e, Complement):
        return 1 - bit_evaluate(e.child, bits, const_bits)
    if isinstance(e, Difference):
        return bit_evaluate(e.left, bits, const_bits) & (1 - bit_evaluate(e.right, bits, const_bits))
    if isinstance(e, SymDiff):
        return bit_evaluate(e.left, bits, const_bits) ^ bit_evaluate(e.right, bits, const_bits)
    raise TypeError(f"unknown node {e!r}")


_PRECEDENCE = {Union: 1, Difference: 2, SymDiff: 2, Intersect: 3}


def expr_to_text(e: SetExpr, names: Sequence[str] | None = None) -> str:
    """Render an expression in the DSL surface syntax with minimal parens."""

    def name(i: int) -> str:
        return names[i] if names is not None else f"X{i + 1}"

    def render(node: SetExpr, parent_prec: int, right_side: bool) -> str:
        if isinstance(node, Var):
            return name(node.index)
        if isinstance(node, ConstRef):
            return node.name
        if isinstance(node, UniverseLit):
            return "X"
        if isinstance(node, EmptyLit):
            return "empty"
        if isinstance(node, Complement):
            return "~" + render(node.child, 4, False)
        op = {Union: "|", Intersect: "&", Difference: "\\", SymDiff: "^"}[type(node)]
        prec = _PRECEDENCE[type(node)]
        assoc = isinstance(node, (Union, Intersect))
        left = render(node.left, prec, False)
        right = render(node.right, prec if assoc else prec + 1, True)
        text = f"{left} {op} {right}"
        if prec < parent_prec or (prec == parent_prec and right_side):
            return f"({text})"
        return text

    return render(e, 0, False)


@dataclass(frozen=True)
class SetMap:
    """A vector of update expressions: component i defines the next value of
    state variable i.  ``frozen_values`` pins the values of the trailing
    variables introduced by constant augmentation; their rules are the
    identity and their incidence rows are reported as zero (they act as
    sources feeding the rest of the system)."""

    components: tuple[SetExpr, ...]
    universe: Universe
    constants: tuple[tuple[str, IntervalSet], ...] = ()
    frozen_values: tuple[IntervalSet, ...] = ()

    def __post_init__(self):
        n = len(self.components)
        if n < 1:
            raise ValueError("a map needs at least one component")
        if len(self.frozen_values) > n:
            raise ValueError("more frozen values than components")
        bound = {name for name, _ in self.constants}
        for i, comp in enumerate(self.components):
            for v in variables_of(comp):
                if not 0 <= v < n:
                    raise ValueError(f"component {i} references variable index {v} outside arity {n}")
            missing = constants_of(comp) - bound
            if missing:
                raise ValueError(f"component {i} references unbound constants {sorted(missing)}")
        k = len(self.frozen_values)
        for offset in range(k):
            idx = n - k + offset
            if self.components[idx] != Var(idx):
                raise ValueError("frozen components must be identity rules")

    @property
    def arity(self) -> int:
        return len(self.components)

    @property
    def frozen_count(self) -> int:
        return len(self.frozen_values)

    @property
    def constants_map(self) -> dict[str, IntervalSet]:
        return dict(self.constants)

    def eval(self, state: Sequence[IntervalSet]) -> tuple[IntervalSet, ...]:
        if len(state) != self.arity:
            raise ValueError(f"state has arity {len(state)}, map has {self.arity}")
        consts = self.constants_map
        for s in state:
            if not self.universe.contains_set(s):
                raise ValueError(f"state component {s} escapes the universe")
        return tuple(evaluate(c, state, consts, self.universe) for c in self.components)

    def incidence(self) -> BoolMatrix:
        """Syntactic dependency matrix; frozen rows reported as zero."""
        n = self.arity
        first_frozen = n - self.frozen_count
        rows = []
        for i, comp in enumerate(self.components):
            if i >= first_frozen:
                rows.append(0)
                continue
            mask = 0
            for v in variables_of(comp):
                mask |= 1 << v
            rows.append(mask)
        return BoolMatrix(n, tuple(rows))

    def incidence_sets(self) -> list[list[IntervalSet]]:
        """The incidence matrix with {empty, universe} entries."""
        b = self.incidence()
        full = self.universe.carrier
        empty = IntervalSet.empty()
        return [[full if b.entry(i, j) else empty for j in range(b.n)] for i in range(b.n)]

    def with_frozen_state(self, visible: Sequence[IntervalSet]) -> tuple[IntervalSet, ...]:
        """Extend a state over the non-frozen variables with the pinned values."""
        if len(visible) != self.arity - self.frozen_count:
            raise ValueError("visible state has the wrong arity")
        return tuple(visible) + self.frozen_values


def augment_constants(f: SetMap) -> SetMap:
    """Turn every named constant into a trailing frozen state variable.

    The rewritten map is constant-free; a constant-free input is returned
    unchanged.  New variables follow the constants' declaration order.
    """
    if not f.constants:
        return f
    n = f.arity
    index_of = {name: n + j for j, (name, _) in enumerate(f.constants)}

    def rewrite(e: SetExpr) -> SetExpr:
        if isinstance(e, ConstRef):
            return Var(index_of[e.name])
        if isinstance(e, (Var, UniverseLit, EmptyLit)):
            return e
        if isinstance(e, Complement):
            return Complement(rewrite(e.child))
        return type(e)(rewrite(e.left), rewrite(e.right))

    components = tuple(rewrite(c) for c in f.components)
    components += tuple(Var(n + j) for j in range(len(f.constants)))
    values = tuple(value for _, value in f.constants)
    return SetMap(
        components=components,
        universe=f.universe,
        constants=(),
        frozen_values=f.frozen_values + values,
    )


def compose(f: SetMap, g: SetMap) -> SetMap:
    """The syntactic composition x -> f(g(x))."""
    if f.arity != g.arity:
        raise ValueError("arity mismatch")
    if f.frozen_values or g.frozen_values:
        raise ValueError("compose is defined for non-augmented maps")
    merged = dict(g.constants)
    for name, value in f.constants:
        if name in merged and merged[name] != value:
            raise ValueError(f"constant {name!r} bound to different values")
        merged[name] = value

    def substitute(e: SetExpr) -> SetExpr:
        if isinstance(e, Var):
            return g.components[e.index]
        if isinstance(e, (ConstRef, UniverseLit, EmptyLit)):
            return e
        if isinstance(e, Complement):
            return Complement(substitute(e.child))
        return type(e)(substitute(e.left), substitute(e.right))

    return SetMap(
        components=tuple(substitute(c) for c in f.components),
        universe=f.universe,
        constants=tuple(merged.items()),
    )


def check_composition_bound(f: SetMap, g: SetMap) -> bool:
    """Whether the composed map's incidence is bounded by the product of the
    factors' incidences (always true; exposed as a test utility)."""
    return compose(f, g).incidence().le(f.incidence() @ g.incidence())


@dataclass(frozen=True)
class NormalForm:
    """Coefficients of the nested-symmetric-difference normal form.

    ``coeffs[mask]`` is 1 when the coefficient of the subset encoded by
    ``mask`` (bit j set = variable j present) is the whole universe, 0 when
    it is the empty set.  Defined for all 2**arity subsets.
    """

    arity: int
    coeffs: tuple[int, ...]

    def coefficient(self, subset) -> int:
        mask = 0
        for j in subset:
            mask |= 1 << j
        return self.coeffs[mask]

    def as_dict(self) -> dict[frozenset, int]:
        return {
            frozenset(j for j in range(self.arity) if mask >> j & 1): bit
            for mask, bit in enumerate(self.coeffs)
        }

    def to_expr(self) -> SetExpr:
        """Rebuild an expression that evaluates to the described component."""
        terms: list[SetExpr] = []
        for mask, bit in enumerate(self.coeffs):
            if not bit:
                continue
            factors = [Var(j) for j in range(self.arity) if mask >> j & 1]
            if not factors:
                term: SetExpr = UniverseLit()
            else:
                term = factors[0]
                for fac in factors[1:]:
                    term = Intersect(term, fac)
            terms.append(term)
        if not terms:
            return EmptyLit()
        out = terms[0]
        for term in terms[1:]:
            out = SymDiff(out, term)
        return out


def normal_form(
    component: SetExpr,
    arity: int,
    constants: Mapping[str, IntervalSet] | None = None,
    universe: Universe | None = None,
    caps: Caps = DEFAULT,
) -> NormalForm:
    """Coefficients computed by the subset parity transform over evaluations
    at indicator inputs (variable j = universe iff j is in the subset).

    Constants must evaluate to the empty set or the whole universe.
    """
    if arity > caps.normal_form:
        raise CapExceeded(f"normal form needs 2**{arity} evaluations (cap {caps.normal_form})")
    const_bits: dict[str, int] = {}
    if constants:
        if universe is None:
            raise ValueError("constants need the universe to be classified")
        for name, value in constants.items():
            if value.is_empty():
                const_bits[name] = 0
            elif value == universe.carrier:
                const_bits[name] = 1
            else:
                raise ValueError(
                    f"constant {name!r} is neither empty nor the universe; augment the map first"
                )
    table = []
    for mask in range(1 << arity):
        bits = tuple((mask >> j) & 1 for j in range(arity))
        table.append(bit_evaluate(component, bits, const_bits))
    # In-place subset parity (Moebius) transform.
    for j in range(arity):
        step = 1 << j
        for mask in range(1 << arity):
            if mask & step:
                table[mask] ^= table[mask ^ step]
    return NormalForm(arity, tuple(table))


def as_linear(f: SetMap) -> "LinearSetMap | None":
    """Detect the shape 'union of (coefficient & variable) terms' per row.

    Returns the coefficient matrix when every component fits, else None.
    Coefficients may be named constants, the empty/universe literals, or a
    bare variable (coefficient = universe); absent terms mean empty.
    """
    n = f.arity
    consts = f.constants_map
    entries = [[IntervalSet.empty() for _ in range(n)] for _ in range(n)]

    def term_coeff(term: SetExpr) -> tuple[int, IntervalSet] | None:
        if isinstance(term, Var):
            return term.index, f.universe.carrier
        if not isinstance(term, Intersect):
            return None
        sides = [term.left, term.right]
        for pos in (0, 1):
            var, coeff = sides[pos], sides[1 - pos]
            if not isinstance(var, Var):
                continue
            if isinstance(coeff, ConstRef):
                return var.index, consts[coeff.name]
            if isinstance(coeff, UniverseLit):
                return var.index, f.universe.carrier
            if isinstance(coeff, EmptyLit):
                return var.index, IntervalSet.empty()
        return None

    def flatten(e: SetExpr, out: list[SetExpr]):
        if isinstance(e, Union):
            flatten(e.left, out)
            flatten(e.right, out)
        else:
            out.append(e)

    for i, comp in enumerate(f.components):
        terms: list[SetExpr] = []
        flatten(comp, terms)
        for term in terms:
            if isinstance(term, EmptyLit):
                continue
            parsed = term_coeff(term)
            if parsed is None:
                return None
            j, coeff = parsed
            entries[i][j] = entries[i][j] | coeff
    return LinearSetMap(tuple(tuple(row) for row in entries), f.universe)


@dataclass(frozen=True)
class LinearSetMap:
    """Update rule 'next_i = union over j of (entries[i][j] & state_j)'."""

    entries: tuple[tuple[IntervalSet, ...], ...]
    universe: Universe

    def __post_init__(self):
        n = len(self.entries)
        for row in self.entries:
            if len(row) != n:
                raise ValueError("coefficient matrix must be square")
            for e in row:
                if not self.universe.contains_set(e):
                    raise ValueError(f"coefficient {e} escapes the universe")

    @property
    def arity(self) -> int:
        return len(self.entries)

    def coefficient_name(self, i: int, j: int) -> str:
        return f"a{i + 1}_{j + 1}"

    def as_set_map(self) -> SetMap:
        """The same dynamics as a SetMap with one named constant per entry."""
        n = self.arity
        constants = []
        components = []
        for i in range(n):
            term: SetExpr | None = None
            for j in range(n):
                name = self.coefficient_name(i, j)
                constants.append((name, self.entries[i][j]))
                piece = Intersect(ConstRef(name), Var(j))
                term = piece if term is None else Union(term, piece)
            assert term is not None
            components.append(term)
        return SetMap(tuple(components), self.universe, tuple(constants))
