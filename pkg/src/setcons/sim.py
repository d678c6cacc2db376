"""Round-based synchronous simulator.

Each state variable is an agent; in every round all agents apply their
update rule to the previous round's values.  Closure (fixed point or cycle)
is detected by hashing the encoded state, which is exact because every
reachable state is a union of partition cells.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .boolmat import BoolMatrix
from .caps import DEFAULT, Caps
from .dsl import SystemSpec
from .encoding import Partition, build_partition, translate_map
from .errors import SetconsError
from .expr import SetMap, augment_constants
from .intervals import Interval, IntervalSet, Universe


@dataclass(frozen=True)
class Trajectory:
    """One simulation run over the visible agents.

    ``distances[t]`` is the number of encoded bits by which round t differs
    from the closure state; ``distance_lengths[t]`` is the same gap as total
    interval length inside the reporting window, for human consumption.
    ``closed`` is False when the round budget ran out before a repeat was
    seen (then transient/period are None).
    """

    agents: tuple[str, ...]
    rounds: tuple[tuple[IntervalSet, ...], ...]
    transient: int | None
    period: int | None
    consensus: IntervalSet | None
    distances: tuple[int, ...]
    distance_lengths: tuple[float, ...]
    closed: bool

    def to_json_dict(self) -> dict:
        return {
            "agents": list(self.agents),
            "rounds": [[str(s) for s in state] for state in self.rounds],
            "transient": self.transient,
            "period": self.period,
            "consensus": str(self.consensus) if self.consensus is not None else None,
            "distances": list(self.distances),
            "distance_lengths": list(self.distance_lengths),
            "closed": self.closed,
        }


@dataclass(frozen=True)
class TopologyView:
    """Communication structure read off the incidence matrix: agent j feeds
    agent i exactly when rule i depends on variable j."""

    agents: tuple[str, ...]
    edges: tuple[tuple[int, int], ...]  # (source j, target i)

    @classmethod
    def from_incidence(cls, agents: Sequence[str], b: BoolMatrix) -> "TopologyView":
        edges = [(j, i) for i in range(b.n) for j in range(b.n) if b.entry(i, j)]
        return cls(tuple(agents), tuple(edges))

    def to_json_dict(self) -> dict:
        return {"agents": list(self.agents), "edges": [[self.agents[j], self.agents[i]] for j, i in self.edges]}


def sampling_window(universe: Universe) -> Interval:
    """A finite window covering the interesting part of the universe: the
    span of its finite endpoints padded by 10 percent (defaults when a side
    is unbounded)."""
    finite = [
        ep.value
        for iv in universe.carrier.intervals
        for ep in (iv.lo, iv.hi)
        if isinstance(ep.value, Fraction)
    ]
    if not finite:
        lo, hi = Fraction(0), Fraction(100)
    else:
        lo, hi = min(finite), max(finite)
        if lo == hi:
            hi = lo + 1
        pad = (hi - lo) / 10
        hi = hi + pad
    return Interval.closed(lo, hi)


def random_interval_set(rng: random.Random, universe: Universe, max_parts: int = 3) -> IntervalSet:
    """A random union of up to ``max_parts`` rational-endpoint intervals
    inside the universe (empty is possible)."""
    window = sampling_window(universe)
    lo, hi = window.lo.value, window.hi.value
    span = hi - lo
    parts = []
    for _ in range(rng.randint(0, max_parts)):
        a = lo + Fraction(rng.randint(0, 64), 64) * span
        b = lo + Fraction(rng.randint(0, 64), 64) * span
        if a > b:
            a, b = b, a
        if a == b and rng.random() < 0.5:
            parts.append(Interval.singleton(a))
            continue
        if a == b:
            continue
        parts.append(Interval.make(a, b, rng.random() < 0.5, rng.random() < 0.5))
    return IntervalSet.from_intervals(parts) & universe.carrier


def dedup_generators(sets: Sequence[IntervalSet]) -> list[IntervalSet]:
    seen = set()
    out = []
    for s in sets:
        if s not in seen and not s.is_empty():
            seen.add(s)
            out.append(s)
    return out


def simulate(
    spec: SystemSpec,
    max_rounds: int | None = None,
    seed: int | None = None,
    random_init: bool = False,
    caps: Caps = DEFAULT,
) -> Trajectory:
    """Run the system until closure or the round budget is exhausted."""
    base = spec.set_map()
    initials = list(spec.initial_state())
    if random_init:
        rng = random.Random(seed)
        initials = [random_interval_set(rng, spec.universe) for _ in spec.variables]
    aug = augment_constants(base)
    generators = dedup_generators(initials + [value for _, value in spec.constants])
    partition = build_partition(generators, spec.universe, caps)
    enc = translate_map(aug, partition)

    if max_rounds is None:
        max_rounds = spec.options_map.get("max_rounds", 2 * aug.arity * partition.kappa)
    if max_rounds < 1:
        raise SetconsError("max_rounds must be at least 1")

    n_visible = len(spec.variables)
    state = tuple(initials) + aug.frozen_values
    states = [state]
    encoded = [enc.encode_state(state)]
    seen = {encoded[0]: 0}
    transient = period = None
    for t in range(1, max_rounds + 1):
        state = aug.eval(state)
        bits = enc.encode_state(state)
        if bits in seen:
            transient = seen[bits]
            period = t - transient
            break
        seen[bits] = t
        states.append(state)
        encoded.append(bits)

    closed = transient is not None
    consensus = None
    if closed and period == 1:
        final = states[transient]
        if all(s == final[0] for s in final[:n_visible]):
            consensus = final[0]
    final_bits = encoded[transient] if closed else encoded[-1]
    distances = tuple(sum(a ^ b for a, b in zip(bits, final_bits)) for bits in encoded)
    window = sampling_window(spec.universe)
    final_state = states[transient] if closed else states[-1]
    distance_lengths = tuple(
        float(
            sum(
                (s ^ t).measure(window)
                for s, t in zip(state[:n_visible], final_state[:n_visible])
            )
        )
        for state in states
    )
    return Trajectory(
        agents=spec.variables,
        rounds=tuple(s[:n_visible] for s in states),
        transient=transient,
        period=period,
        consensus=consensus,
        distances=distances,
        distance_lengths=distance_lengths,
        closed=closed,
    )


def render_timeline(traj: Trajectory, window: Interval, width: int = 48) -> str:
    """ASCII bars marking each agent's set across the window, one block of
    rows per round; deterministic for a given trajectory."""
    lo, hi = window.lo.value, window.hi.value
    if isinstance(lo, float) or isinstance(hi, float):
        raise ValueError("the timeline window must be finite")
    span = hi - lo
    lines = [f"window {window}  ({width} bins)"]
    for t, state in enumerate(traj.rounds):
        lines.append(f"round {t}:")
        for name, s in zip(traj.agents, state):
            cells = []
            for k in range(width):
                mid = lo + span * Fraction(2 * k + 1, 2 * width)
                cells.append("#" if s.contains(mid) else ".")
            lines.append(f"  {name:>6} |{''.join(cells)}|")
    return "\n".join(lines)
