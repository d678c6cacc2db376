"""Command-line front end.

Subcommands::

    setcons analyze FILE       contractivity, equilibria, consensus, local attractiveness
    setcons simulate FILE      round-based run with optional random initial sets
    setcons encode FILE        partition table and per-variable bit vectors
    setcons consensus FILE     common-fixed-point region of a linear system
    setcons equilibria FILE    per-cell equilibrium summary

Exit codes: 0 success, 1 input diagnostics, 2 an enumeration cap was hit.
"""

from __future__ import annotations

import argparse
import sys

from . import analysis, caps as caps_mod, dsl, sim
from .encoding import build_partition, translate_map
from .errors import CapExceeded, SetconsError
from .expr import as_linear, augment_constants
from .intervals import IntervalSet


def _load(path: str) -> dsl.SystemSpec:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise dsl.DslError([dsl.Diagnostic("error", 0, 0, f"cannot read {path}: {exc.strerror}")])
    return dsl.parse(text)


def _prepared(spec: dsl.SystemSpec, caps: caps_mod.Caps, extra_sets=()):
    base = spec.set_map()
    aug = augment_constants(base)
    generators = sim.dedup_generators(
        list(spec.initials) + [v for _, v in spec.constants] + list(extra_sets)
    )
    partition = build_partition(generators, spec.universe, caps)
    names = spec.variables + tuple(name for name, _ in spec.constants)
    return base, aug, partition, names


def _cmd_analyze(args, caps) -> dict:
    spec = _load(args.file)
    base, aug, partition, names = _prepared(spec, caps)
    verdict = analysis.is_contractive_sbm(aug, partition)
    report = {
        "contractive": verdict.contractive,
        "witness_order": [names[i] for i in verdict.witness.order] if verdict.witness else None,
        "q": verdict.q,
        "cycle": [names[i] for i in verdict.cycle] if verdict.cycle else None,
    }
    equil = analysis.equilibria_sbm(aug, partition, caps, list_all=False)
    report["equilibria_summary"] = {
        "cells": equil.partition.kappa,
        "per_cell_counts": [len(fps) for fps in equil.per_cell],
        "total": equil.total,
    }
    linear = as_linear(base)
    report["consensus"] = analysis.consensus_region(linear).to_json_dict() if linear else None
    local = None
    if verdict.contractive:
        start = tuple(spec.initials) + aug.frozen_values
        fixed = analysis.global_fixed_point(aug, start, verdict=verdict)
        local = {
            "equilibrium": [str(s) for s in fixed[: len(spec.variables)]],
            "attractive": analysis.is_locally_attractive_sbm(aug, fixed, partition),
        }
    report["local"] = local
    return report


def _cmd_simulate(args, caps):
    spec = _load(args.file)
    traj = sim.simulate(
        spec,
        max_rounds=args.rounds,
        seed=args.seed,
        random_init=args.random_init,
        caps=caps,
    )
    if args.format == "text":
        window = sim.sampling_window(spec.universe)
        out = [sim.render_timeline(traj, window)]
        out.append(f"transient={traj.transient} period={traj.period} closed={traj.closed}")
        if traj.consensus is not None:
            out.append(f"consensus: {traj.consensus}")
        return "\n".join(out)
    return traj


def _cmd_encode(args, caps) -> dict:
    spec = _load(args.file)
    base, aug, partition, _ = _prepared(spec, caps)
    enc = translate_map(aug, partition)
    state = tuple(spec.initials) + aug.frozen_values
    bits = enc.encode_state(state)
    k = partition.kappa
    report = partition.to_json_dict()
    report["vars"] = {
        name: "".join(str(b) for b in bits[i * k : (i + 1) * k])
        for i, name in enumerate(spec.variables)
    }
    for j, (name, _) in enumerate(spec.constants):
        i = len(spec.variables) + j
        report["vars"][name] = "".join(str(b) for b in bits[i * k : (i + 1) * k])
    return report


def _cmd_consensus(args, caps) -> dict:
    spec = _load(args.file)
    linear = as_linear(spec.set_map())
    if linear is None:
        raise dsl.DslError(
            [dsl.Diagnostic("error", 0, 0, "the system is not linear",
                            "every rule must be a union of (coefficient & variable) terms")]
        )
    return analysis.consensus_region(linear).to_json_dict()


def _cmd_equilibria(args, caps):
    spec = _load(args.file)
    _, aug, partition, _ = _prepared(spec, caps)
    return analysis.equilibria_sbm(aug, partition, caps)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="setcons", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, fn):
        p = sub.add_parser(name)
        p.add_argument("file")
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.set_defaults(fn=fn)
        return p

    add("analyze", _cmd_analyze)
    p_sim = add("simulate", _cmd_simulate)
    p_sim.add_argument("--rounds", type=int, default=None)
    p_sim.add_argument("--seed", type=int, default=None)
    p_sim.add_argument("--random-init", action="store_true")
    add("encode", _cmd_encode)
    add("consensus", _cmd_consensus)
    add("equilibria", _cmd_equilibria)

    args = parser.parse_args(argv)
    try:
        caps = caps_mod.from_env()
        result = args.fn(args, caps)
    except dsl.DslError as exc:
        for diag in exc.diagnostics:
            print(diag.render(), file=sys.stderr)
        return 1
    except CapExceeded as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return 2
    except SetconsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    if isinstance(result, str):
        print(result)
    elif args.format == "text":
        print(_render_text(dsl._jsonify(result)))
    else:
        print(dsl.to_json(result))
    return 0


def _render_text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        lines = []
        for key, value in obj.items():
            if isinstance(value, (dict, list)):
                lines.append(f"{pad}{key}:")
                lines.append(_render_text(value, indent + 1))
            else:
                lines.append(f"{pad}{key}: {value}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(
            _render_text(v, indent) if isinstance(v, (dict, list)) else f"{pad}- {v}"
            for v in obj
        )
    return f"{pad}{obj}"


if __name__ == "__main__":
    raise SystemExit(main())
