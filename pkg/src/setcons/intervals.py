"""Exact algebra of finite interval unions over a real-line universe.

Sets are stored in a canonical form: an ordered tuple of pairwise disjoint,
non-adjacent intervals with exact open/closed endpoints.  Two sets are equal
as sets of points if and only if they are structurally equal, which keeps set
equality decidable and bit-stable.  Finite endpoints are rationals
(``fractions.Fraction``); unbounded endpoints are the float infinities and
are always open.

The union/intersection/complement trio is the core; difference and symmetric
difference are defined on top of it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Union as _Union

NEG_INF = float("-inf")
POS_INF = float("inf")

Value = _Union[Fraction, float]


def as_value(x) -> Value:
    """Coerce ``x`` to a finite Fraction or an infinite float."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("boolean is not a point value")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if x == POS_INF or x == NEG_INF:
            return x
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if s == "inf":
            return POS_INF
        if s == "-inf":
            return NEG_INF
        return Fraction(s)
    raise TypeError(f"cannot use {x!r} as an endpoint value")


def format_value(v: Value) -> str:
    if v == POS_INF:
        return "inf"
    if v == NEG_INF:
        return "-inf"
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"


@dataclass(frozen=True, slots=True)
class Endpoint:
    """One interval bound; infinite values are always open."""

    value: Value
    closed: bool

    def __post_init__(self):
        if self.closed and isinstance(self.value, float):
            raise ValueError("a closed endpoint must be finite")

    def flip(self) -> "Endpoint":
        return Endpoint(self.value, not self.closed)


def _lo_key(e: Endpoint):
    # (value, eps): eps 0 = the point itself, 1 = just above it.
    return (e.value, 0 if e.closed else 1)


def _hi_key(e: Endpoint):
    return (e.value, 0 if e.closed else -1)


def _succ(hi_key):
    # First position strictly after a high key; comparable with low keys.
    return (hi_key[0], hi_key[1] + 1)


@dataclass(frozen=True, slots=True)
class Interval:
    """A single nonempty interval with exact endpoint closedness."""

    lo: Endpoint
    hi: Endpoint

    def __post_init__(self):
        if _lo_key(self.lo) > _hi_key(self.hi):
            raise ValueError(f"empty interval: {self}")

    @classmethod
    def make(cls, lo, hi, lo_closed: bool = True, hi_closed: bool = True) -> "Interval":
        lo_v, hi_v = as_value(lo), as_value(hi)
        if isinstance(lo_v, float):
            lo_closed = False
        if isinstance(hi_v, float):
            hi_closed = False
        return cls(Endpoint(lo_v, lo_closed), Endpoint(hi_v, hi_closed))

    @classmethod
    def closed(cls, lo, hi) -> "Interval":
        return cls.make(lo, hi, True, True)

    @classmethod
    def open(cls, lo, hi) -> "Interval":
        return cls.make(lo, hi, False, False)

    @classmethod
    def closed_open(cls, lo, hi) -> "Interval":
        return cls.make(lo, hi, True, False)

    @classmethod
    def open_closed(cls, lo, hi) -> "Interval":
        return cls.make(lo, hi, False, True)

    @classmethod
    def singleton(cls, p) -> "Interval":
        return cls.make(p, p, True, True)

    @property
    def lo_key(self):
        return _lo_key(self.lo)

    @property
    def hi_key(self):
        return _hi_key(self.hi)

    def contains(self, p) -> bool:
        key = (as_value(p), 0)
        return self.lo_key <= key <= self.hi_key

    def length(self) -> Value:
        if isinstance(self.lo.value, float) or isinstance(self.hi.value, float):
            return POS_INF
        return self.hi.value - self.lo.value

    def __str__(self) -> str:
        lb = "[" if self.lo.closed else "("
        rb = "]" if self.hi.closed else ")"
        return f"{lb}{format_value(self.lo.value)},{format_value(self.hi.value)}{rb}"


def _canonical(spans: Iterable[Interval]) -> tuple[Interval, ...]:
    """Sort and merge overlapping or adjacent intervals."""
    ordered = sorted(spans, key=lambda iv: (iv.lo_key, iv.hi_key))
    out: list[Interval] = []
    for iv in ordered:
        if out and iv.lo_key <= _succ(out[-1].hi_key):
            if iv.hi_key > out[-1].hi_key:
                out[-1] = Interval(out[-1].lo, iv.hi)
        else:
            out.append(iv)
    return tuple(out)


@dataclass(frozen=True, slots=True)
class IntervalSet:
    """Canonical finite union of intervals; immutable and hashable.

    Construct through :meth:`of` / :meth:`from_intervals` (which normalize)
    rather than the raw constructor.
    """

    intervals: tuple[Interval, ...] = ()

    @classmethod
    def of(cls, *spans: Interval) -> "IntervalSet":
        return cls(_canonical(spans))

    @classmethod
    def from_intervals(cls, spans: Iterable[Interval]) -> "IntervalSet":
        return cls(_canonical(spans))

    @classmethod
    def empty(cls) -> "IntervalSet":
        return _EMPTY

    @classmethod
    def full(cls) -> "IntervalSet":
        return _FULL

    @classmethod
    def point(cls, p) -> "IntervalSet":
        return cls((Interval.singleton(p),))

    # -- predicates ------------------------------------------------------

    def is_empty(self) -> bool:
        return not self.intervals

    def __bool__(self) -> bool:
        return bool(self.intervals)

    def contains(self, p) -> bool:
        key = (as_value(p), 0)
        for iv in self.intervals:
            if iv.lo_key > key:
                return False
            if key <= iv.hi_key:
                return True
        return False

    def __contains__(self, p) -> bool:
        return self.contains(p)

    def is_subset(self, other: "IntervalSet") -> bool:
        return (self & other) == self

    # -- core operations -------------------------------------------------

    def __or__(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(_canonical(self.intervals + other.intervals))

    def __and__(self, other: "IntervalSet") -> "IntervalSet":
        raw = []
        for a in self.intervals:
            for b in other.intervals:
                lo = a.lo if a.lo_key >= b.lo_key else b.lo
                hi = a.hi if a.hi_key <= b.hi_key else b.hi
                if _lo_key(lo) <= _hi_key(hi):
                    raw.append(Interval(lo, hi))
        return IntervalSet(_canonical(raw))

    def complement_line(self) -> "IntervalSet":
        """Complement relative to the whole extended real line."""
        if not self.intervals:
            return _FULL
        out = []
        first = self.intervals[0]
        if first.lo.value != NEG_INF:
            out.append(Interval(Endpoint(NEG_INF, False), first.lo.flip()))
        for cur, nxt in zip(self.intervals, self.intervals[1:]):
            out.append(Interval(cur.hi.flip(), nxt.lo.flip()))
        last = self.intervals[-1]
        if last.hi.value != POS_INF:
            out.append(Interval(last.hi.flip(), Endpoint(POS_INF, False)))
        return IntervalSet(tuple(out))

    def complement_in(self, universe: "Universe | IntervalSet") -> "IntervalSet":
        carrier = universe.carrier if isinstance(universe, Universe) else universe
        if not self.is_subset(carrier):
            raise ValueError(f"{self} is not contained in the universe {carrier}")
        return self.complement_line() & carrier

    def __sub__(self, other: "IntervalSet") -> "IntervalSet":
        return self & other.complement_line()

    def __xor__(self, other: "IntervalSet") -> "IntervalSet":
        return (self - other) | (other - self)

    # -- reporting helpers -------------------------------------------------

    def measure(self, window: Interval) -> Value:
        """Total length of the part of the set inside ``window``."""
        clipped = self & IntervalSet((window,))
        total = Fraction(0)
        for iv in clipped.intervals:
            length = iv.length()
            if isinstance(length, float):
                return POS_INF
            total += length
        return total

    def __str__(self) -> str:
        if not self.intervals:
            return "empty"
        return " | ".join(str(iv) for iv in self.intervals)

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.intervals)


_EMPTY = IntervalSet(())
_FULL = IntervalSet((Interval(Endpoint(NEG_INF, False), Endpoint(POS_INF, False)),))


@dataclass(frozen=True, slots=True)
class Universe:
    """The unity element: every set in a system lives inside ``carrier``."""

    carrier: IntervalSet

    def __post_init__(self):
        if self.carrier.is_empty():
            raise ValueError("universe must be nonempty")

    @classmethod
    def of(cls, *spans: Interval) -> "Universe":
        return cls(IntervalSet.of(*spans))

    @classmethod
    def real_line(cls) -> "Universe":
        return cls(IntervalSet.full())

    def contains_set(self, s: IntervalSet) -> bool:
        return s.is_subset(self.carrier)

    def complement(self, s: IntervalSet) -> IntervalSet:
        return s.complement_in(self.carrier)

    def __str__(self) -> str:
        return str(self.carrier)


# -- literal syntax ---------------------------------------------------------
#
# Shared with the system DSL:  [a,b]  (a,b)  [a,b)  (a,b]  joined with `|`,
# plus `empty` and `X` (the universe).  Numbers are decimal rationals
# (7, 3.5, 1/3) and `inf`/`-inf`.

_LIT_TOKEN = re.compile(
    r"\s*(?:(?P<brack>[\[\]\(\)|,])|(?P<inf>-?inf\b)|(?P<num>-?\d+(?:\.\d+)?(?:/\d+)?)"
    r"|(?P<word>[A-Za-z_][A-Za-z0-9_]*))"
)


def _lit_tokens(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _LIT_TOKEN.match(text, pos)
        if not m or m.end() == pos:
            rest = text[pos:].strip()
            if not rest:
                break
            raise ValueError(f"bad interval literal near {rest[:12]!r}")
        out.append(m.group(m.lastgroup))
        pos = m.end()
    return out


def parse_interval_set(text: str, universe: "Universe | None" = None) -> IntervalSet:
    """Parse the textual literal syntax into a canonical IntervalSet."""
    tokens = _lit_tokens(text)
    if not tokens:
        raise ValueError("empty interval literal")
    if tokens == ["empty"]:
        return IntervalSet.empty()
    if tokens == ["X"]:
        if universe is None:
            raise ValueError("universe literal X needs a universe")
        return universe.carrier
    spans = []
    i = 0
    while i < len(tokens):
        opener = tokens[i]
        if opener not in "[(":
            raise ValueError(f"expected interval, found {opener!r}")
        if i + 4 >= len(tokens):
            raise ValueError("truncated interval literal")
        lo, comma, hi, closer = tokens[i + 1 : i + 5]
        if comma != ",":
            raise ValueError("expected ',' inside interval")
        if closer not in ")]":
            raise ValueError(f"expected interval close, found {closer!r}")
        lo_v, hi_v = as_value(lo), as_value(hi)
        if opener == "[" and isinstance(lo_v, float):
            raise ValueError("an infinite endpoint cannot be closed")
        if closer == "]" and isinstance(hi_v, float):
            raise ValueError("an infinite endpoint cannot be closed")
        spans.append(Interval.make(lo_v, hi_v, opener == "[", closer == "]"))
        i += 5
        if i < len(tokens):
            if tokens[i] != "|":
                raise ValueError(f"expected '|' between intervals, found {tokens[i]!r}")
            i += 1
    return IntervalSet.from_intervals(spans)
