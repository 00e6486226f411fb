"""Command line front end: ``permstab gen|check|round|oracle|sweep``.

Relator systems are selected with ``--system``:

* ``commutator`` (default): all ``[x_i, x_j]`` for the tuple's rank
* ``bs:M,N``: the Baumslag-Solitar relator ``x2^-1 x1^M x2 x1^-N``
* ``rel:W1;W2;...``: literal words in the text notation of :mod:`permstab.words`

Exit codes: 0 success/pass, 1 check failed, 2 usage or input error,
3 feasibility cap exceeded, 4 parity repair exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import io as pio
from .instances import GenSpec, generate
from .oracle import nearest_solution
from .rounding import DEFAULT_RADIUS, ParityRepairExhausted, round_tuple, round_tuple_even
from .sweep import SweepConfig, rows_to_csv, run_sweep
from .words import (
    EnumerationCapExceeded,
    RelatorSystem,
    as_fraction,
    bs_system,
    commutator_system,
    defect,
    relator_system,
    strong_solution_check,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_CAP = 3
EXIT_PARITY = 4


class UsageError(Exception):
    pass


def parse_system(selector: str, rank: int) -> RelatorSystem:
    if selector == "commutator":
        return commutator_system(rank)
    if selector.startswith("bs:"):
        try:
            m, n = (int(v) for v in selector[3:].split(","))
        except ValueError as exc:
            raise UsageError(f"bad Baumslag-Solitar selector {selector!r}") from exc
        return bs_system(m, n)
    if selector.startswith("rel:"):
        words = [w for w in selector[4:].split(";") if w.strip()]
        return relator_system(words, rank)
    raise UsageError(f"unknown relator system {selector!r}")


def _parse_lattice(text: str) -> list[list[int]]:
    return [[int(v) for v in row.split(",")] for row in text.split(";")]


def _emit(obj) -> None:
    sys.stdout.write(pio.dumps(obj) + "\n")


def cmd_gen(args) -> int:
    if args.spec:
        spec = GenSpec.from_dict(json.loads(Path(args.spec).read_text()))
    else:
        if args.kind is None:
            raise UsageError("gen needs --kind or --spec")
        spec = GenSpec(
            kind=args.kind,
            seed=args.seed,
            degree=args.degree,
            rank=args.rank,
            lattices=[_parse_lattice(s) for s in args.lattice],
            rate=args.rate,
            c=args.c,
            r=args.r,
            modulus=args.modulus,
            mexp=args.mexp,
            nexp=args.nexp,
        )
    base = pio.read_tuple(args.input) if args.input else None
    t = generate(spec, base)
    pio.write_tuple(args.out, t)
    return EXIT_OK


def cmd_check(args) -> int:
    t = pio.read_tuple(args.input)
    R = parse_system(args.system, t.rank)
    rep = defect(t, R)
    delta = as_fraction(args.delta) if args.delta is not None else None
    out = pio.defect_report_dict(rep, delta)
    ok = rep.is_delta_solution(delta) if delta is not None else rep.is_solution()
    if args.strong:
        if delta is None:
            raise UsageError("--strong needs --delta")
        strong = strong_solution_check(t, R, delta)
        out["strong"] = pio.strong_report_dict(strong)
        ok = strong.passed
    out["passed"] = ok
    _emit(out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_round(args) -> int:
    t = pio.read_tuple(args.input)
    if t.rank < 2:
        raise UsageError("rounding needs at least two generators")
    try:
        rounded, rep = (round_tuple_even if args.even else round_tuple)(t, args.radius)
    except ParityRepairExhausted as exc:
        pio.write_tuple(args.out, exc.rounded)
        out = pio.rounding_report_dict(exc.report)
        out["error"] = "parity-repair exhausted"
        _emit(out)
        return EXIT_PARITY
    if defect(rounded, commutator_system(t.rank)).max_defect != 0:
        raise AssertionError("rounded tuple failed re-validation")
    pio.write_tuple(args.out, rounded)
    _emit(pio.rounding_report_dict(rep))
    return EXIT_OK


def cmd_oracle(args) -> int:
    t = pio.read_tuple(args.input)
    R = parse_system(args.system, t.rank)
    result = nearest_solution(t, R)
    if args.witness:
        pio.write_tuple(args.witness, result.witness)
    _emit(pio.oracle_result_dict(result, args.witness))
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = SweepConfig.load(args.config)
    text = rows_to_csv(run_sweep(config), config.record_time)
    out = args.out or config.output
    if out:
        Path(out).write_bytes(text.encode("ascii"))
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="permstab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance and write a tuple file")
    g.add_argument("--spec", help="JSON file holding a GenSpec")
    g.add_argument("--kind", choices=["zk-action", "perturbed", "amplified", "bs-exact"])
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--degree", type=int)
    g.add_argument("--rank", type=int)
    g.add_argument("--lattice", action="append", default=[], help="rows 'a,b;c,d' whose columns span the lattice")
    g.add_argument("--rate", default="0")
    g.add_argument("--c", type=int, default=1)
    g.add_argument("--r", type=int, default=0)
    g.add_argument("--modulus", type=int)
    g.add_argument("--mexp", type=int)
    g.add_argument("--nexp", type=int)
    g.add_argument("--input", help="base tuple file for perturbed/amplified kinds")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("check", help="measure relator defects (and optionally the strong-solution test)")
    c.add_argument("input")
    c.add_argument("--system", default="commutator")
    c.add_argument("--delta")
    c.add_argument("--strong", action="store_true")
    c.set_defaults(func=cmd_check)

    r = sub.add_parser("round", help="round to an exactly commuting tuple")
    r.add_argument("input")
    r.add_argument("--radius", "-L", type=int, default=DEFAULT_RADIUS)
    r.add_argument("--even", action="store_true")
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_round)

    o = sub.add_parser("oracle", help="exhaustive nearest exact solution")
    o.add_argument("input")
    o.add_argument("--system", default="commutator")
    o.add_argument("--witness", help="path for the witness tuple file")
    o.set_defaults(func=cmd_oracle)

    s = sub.add_parser("sweep", help="run a JSON-configured sweep and write CSV")
    s.add_argument("config")
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "radius", 1) < 1:
        parser.error("radius must be at least 1")
    try:
        return args.func(args)
    except EnumerationCapExceeded as exc:
        print(f"permstab: feasibility cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (UsageError, ValueError, OSError) as exc:
        print(f"permstab: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
