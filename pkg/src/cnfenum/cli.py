"""Command-line interface: ``cnfenum <command> ...``.

Exit codes: 0 ok, 1 verification failed, 2 input error, 3 budget or timeout.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from cnfenum.bench import (
    CSV_COLUMNS,
    AigerError,
    OutputPolicy,
    RandomSpec,
    RunRecord,
    constrain_outputs,
    gen_random,
    load_aiger,
    run_cell,
)
from cnfenum.dimacs import DimacsError, cubes_to_assignments, format_cube, parse_models, write_dimacs
from cnfenum.enumerate import EnumMode, enumerate_projected
from cnfenum.formula import FormulaStore, NodeId
from cnfenum.oracle import BudgetExceeded, verify_ta
from cnfenum.parser import ParseError, parse
from cnfenum.solver import Phase, Solver, SolverConfig, VarOrder
from cnfenum.transform import Encoding, encode

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


class InputError(Exception):
    pass


@dataclass
class Instance:
    name: str
    store: FormulaStore
    root: NodeId
    atoms: list[NodeId] | None  # important atoms when they differ from those of root


def load_instance(path: str, fraction: float = 1.0, seed: int = 0, policy: str = OutputPolicy.RANDOM) -> Instance:
    """Read a formula file, or an ``.aag`` circuit with outputs constrained."""
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    store = FormulaStore()
    try:
        if path.endswith(".aag"):
            circuit = load_aiger(store, text)
            root = constrain_outputs(store, circuit, fraction, seed, policy)
            return Instance(path, store, root, circuit.inputs)
        return Instance(path, store, parse(store, text), None)
    except (ParseError, AigerError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _add_input_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", help="formula file, .aag circuit, or - for stdin")
    p.add_argument("--fraction", type=float, default=1.0, help="share of circuit outputs to constrain")
    p.add_argument("--seed", type=int, default=0, help="seed for output selection")
    p.add_argument("--policy", choices=OutputPolicy.CHOICES, default=OutputPolicy.RANDOM)


def _encoding_arg(p: argparse.ArgumentParser, default: str) -> None:
    p.add_argument("--encoding", choices=[e.value for e in Encoding], default=default)
    p.add_argument("--mutex", choices=("on", "off"), default="on", help="mutual-exclusion clauses for nnf-pg")


def _instance(args) -> Instance:
    return load_instance(args.input, args.fraction, args.seed, args.policy)


def _encode(args, inst: Instance):
    return encode(inst.store, inst.root, args.encoding, mutex=args.mutex == "on", atoms=inst.atoms)


def cmd_encode(args) -> int:
    inst = _instance(args)
    text = write_dimacs(_encode(args, inst))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _parse_prefix(text: str, store: FormulaStore, atom_var: dict[NodeId, int]) -> list[int]:
    out = []
    for tok in text.replace(",", " ").split():
        neg = tok.startswith(("-", "!"))
        body = tok[1:] if neg else tok
        if body.isdigit():
            var = int(body)
            if var not in atom_var.values():
                raise InputError(f"prefix variable {var} is not an important atom")
        else:
            atom = store.lookup_atom(body)
            if atom is None or atom not in atom_var:
                raise InputError(f"prefix atom {body!r} is not an important atom")
            var = atom_var[atom]
        out.append(-var if neg else var)
    return out


def _config(args) -> SolverConfig:
    return SolverConfig(
        phase_policy=Phase(args.phase),
        phase_caching=args.phase_caching,
        var_order=VarOrder(args.var_order),
        label_strategy=args.label_strategy,
    )


def cmd_enumerate(args) -> int:
    inst = _instance(args)
    cnf = _encode(args, inst)
    prefix = _parse_prefix(args.force_prefix or "", inst.store, cnf.atom_var)
    out = sys.stdout

    def emit(cube):
        out.write(format_cube(cube) + "\n")

    res = enumerate_projected(
        cnf, args.mode, _config(args), timeout=args.timeout, max_models=args.max_models, prefix=prefix,
        on_assignment=emit,
    )
    st = res.stats
    stats = RunRecord(
        instance=inst.name,
        encoding=args.encoding,
        mode=args.mode,
        n_vars=cnf.num_vars,
        n_clauses=len(cnf.clauses),
        n_labels=cnf.n_labels,
        n_assignments=st.n_assignments,
        time_ms=st.elapsed * 1000,
        status=st.status.value,
    ).row()
    stats.update(n_sat_calls=st.n_sat_calls, n_minimization_drops=st.n_minimization_drops)
    out.write(json.dumps(stats) + "\n")
    return EXIT_BUDGET if st.status.value == "timeout" else EXIT_OK


def cmd_verify(args) -> int:
    inst = _instance(args)
    atoms = inst.atoms if inst.atoms is not None else inst.store.atoms(inst.root)
    try:
        with open(args.models, encoding="utf-8") as fh:
            cubes = parse_models(fh.read())
        assignments = cubes_to_assignments(cubes, {i + 1: a for i, a in enumerate(atoms)})
    except (OSError, DimacsError, KeyError) as exc:
        raise InputError(f"{args.models}: {exc}") from None
    report = verify_ta(inst.store, inst.root, assignments, args.mode, atoms=atoms, budget=args.budget)
    print(report.render(inst.store))
    return EXIT_OK if report.ok else EXIT_VERIFY


def cmd_gen(args) -> int:
    os.makedirs(args.out_dir, exist_ok=True)
    for i in range(args.count):
        seed = args.seed + i
        spec = RandomSpec(seed=seed, n_atoms=args.atoms, depth=args.depth)
        store = FormulaStore()
        root = gen_random(store, spec)
        path = os.path.join(args.out_dir, f"rand-a{args.atoms}-d{args.depth}-s{seed}.txt")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"# random formula seed={seed} atoms={args.atoms} depth={args.depth}\n")
            fh.write(store.format(root) + "\n")
        print(path)
    return EXIT_OK


def _bench_cell(task):
    path, enc, mode, timeout, config, load_args, verify = task
    try:
        inst = load_instance(path, *load_args)
    except InputError as exc:
        print(exc, file=sys.stderr)
        return RunRecord(path, enc, mode, status="error")
    rec = run_cell(path, inst.store, inst.root, enc, mode, config, timeout, inst.atoms, verify)
    if rec.status == "error":
        print(f"{path} {enc} {mode}: cell failed", file=sys.stderr)
    return rec


def cmd_bench(args) -> int:
    if not args.instances:
        raise InputError("no instances given")
    encodings = [Encoding(e).value for e in args.encodings.split(",")]
    modes = [EnumMode(m).value for m in args.modes.split(",")]
    config = _config(args)
    load_args = (args.fraction, args.seed, args.policy)
    tasks = [
        (path, enc, mode, args.timeout, config, load_args, args.verify)
        for path in args.instances
        for enc in encodings
        for mode in modes
    ]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            records = list(pool.map(_bench_cell, tasks))
    else:
        records = [_bench_cell(t) for t in tasks]
    fh = open(args.csv, "w", newline="", encoding="utf-8") if args.csv else sys.stdout
    try:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for rec in records:
            writer.writerow(rec.row())
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = _instance(args)
    start = time.monotonic()
    cnf = _encode(args, inst)
    res = Solver.from_encoding(cnf, _config(args)).solve()
    elapsed = (time.monotonic() - start) * 1000
    print(f"{'SAT' if res.sat else 'UNSAT'} {elapsed:.1f} ms")
    if res.sat and args.model:
        print(format_cube(res.model[v] for v in cnf.important))
    return EXIT_OK


def _add_solver_args(p: argparse.ArgumentParser, label_strategy: bool) -> None:
    p.add_argument("--phase", choices=[ph.value for ph in Phase], default=Phase.FALSE_FIRST.value)
    p.add_argument("--phase-caching", action="store_true")
    p.add_argument("--var-order", choices=[v.value for v in VarOrder], default=VarOrder.INPUT.value)
    p.add_argument(
        "--label-strategy",
        action=argparse.BooleanOptionalAction,
        default=label_strategy,
        help="decide label variables by clause structure before important atoms",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cnfenum", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="write the CNF encoding of a formula as DIMACS")
    _add_input_args(p)
    _encoding_arg(p, Encoding.NNFPG.value)
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("enumerate", help="enumerate projected partial assignments")
    _add_input_args(p)
    _encoding_arg(p, Encoding.NNFPG.value)
    p.add_argument("--mode", choices=[m.value for m in EnumMode], default=EnumMode.DISJOINT.value)
    _add_solver_args(p, label_strategy=True)
    p.add_argument("--force-prefix", help='literals decided first, e.g. "-A3 -A4 -A7"')
    p.add_argument("--timeout", type=float, help="seconds")
    p.add_argument("--max-models", type=int)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("verify", help="check a model stream against the formula by brute force")
    _add_input_args(p)
    p.add_argument("models", help="file with one '<lit> ... 0' line per assignment")
    p.add_argument("--mode", choices=[m.value for m in EnumMode], default=EnumMode.DISJOINT.value)
    p.add_argument("--budget", type=int, default=22, help="maximum number of atoms")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="generate seeded random formulas")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--atoms", type=int, default=20)
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="run the instance x encoding x mode matrix, write CSV")
    p.add_argument("--instances", nargs="+", required=True)
    p.add_argument("--encodings", default="ts,pg,nnf-pg")
    p.add_argument("--modes", default="disjoint,non-disjoint")
    p.add_argument("--timeout", type=float, default=60.0, help="seconds per cell")
    p.add_argument("--csv", help="output file (default stdout)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--verify", action="store_true", help="replay the oracle on small instances")
    p.add_argument("--fraction", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--policy", choices=OutputPolicy.CHOICES, default=OutputPolicy.RANDOM)
    _add_solver_args(p, label_strategy=False)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("solve", help="plain satisfiability check")
    _add_input_args(p)
    _encoding_arg(p, Encoding.NNFPG.value)
    _add_solver_args(p, label_strategy=False)
    p.add_argument("--model", action="store_true", help="print the important part of the model")
    p.set_defaults(func=cmd_solve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceeded as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
