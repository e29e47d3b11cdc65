"""Command-line entry point: ``chimera-ising {gen,solve,bench,verify,embed}``.

Exit status: 0 success, 1 usage error, 2 solver or I/O failure, 3 when a
generator rejects its draw (a normal outcome, not a failure).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import SOLVERS, Budget, parse_records, records_json, run_batch, summarize, summary_csv
from .chimera import FaultList, read_fault_list
from .exact import DEFAULT_BRUTE_CAP, DEFAULT_WIDTH_CAP, brute_force, solve_exact
from .formats import (FormatError, format_embedding, format_instance, format_spins,
                      parse_embedding, parse_spins, read_instance)
from .instances import (FAMILIES, EmbeddingError, InstanceRejected, build_clique_embedding,
                        embed, generate, load_lga)
from .report import SolveReport
from .selby import HeuristicConfig, run_parallel

EXIT_USAGE, EXIT_FAILURE, EXIT_REJECTED = 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _seed_range(text: str) -> tuple[int, ...]:
    try:
        if ".." in text:
            a, b = (int(x) for x in text.split("..", 1))
            if b < a:
                raise ValueError
            return tuple(range(a, b + 1))
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"--seeds expects 'a..b' or a comma list, got {text!r}") from None


def _save(path, text: str) -> None:
    # fixed newlines keep output files byte-identical across platforms
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def _write(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        _save(out, text)


def _faults(arg: str | None) -> FaultList | None:
    if arg in (None, "example"):
        return None
    if arg == "none":
        return FaultList()
    return read_fault_list(arg)


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen(a) -> int:
    if a.family == "lga":
        if not a.input:
            raise UsageError("gen: --family lga needs --input with an ising-real file")
        inst = load_lga(Path(a.input).read_text(), a.input, name=Path(a.input).stem)
        _write(format_instance(inst), a.out)
        return 0
    if a.k is None and a.family.startswith("k64"):
        a.k = 16
    if a.k is None:
        raise UsageError("gen: --k is required")
    params = {"faults": _faults(a.faults), "total_faulty": a.total_faulty, "attempts": a.attempts}
    if a.p is not None:
        params["p"] = a.p
    try:
        out = generate(a.family, a.k, a.seed, **params)
    except InstanceRejected as exc:
        print(f"rejected: {exc.reason}", file=sys.stderr)
        return EXIT_REJECTED
    if a.family.startswith("k64"):
        if a.logical_out:
            _save(a.logical_out, format_instance(out.logical))
        print(f"chain offset {out.offset_num}/{out.instance.gamma}", file=sys.stderr)
        out = out.instance
    _write(format_instance(out), a.out)
    return 0


def _heuristic_config(a) -> HeuristicConfig:
    return HeuristicConfig(w=a.w, perturb_frac=a.perturb_frac, restart=a.restart,
                           time_limit=a.time_limit, max_passes=a.max_passes,
                           width_cap=a.width_cap)


def cmd_solve(a) -> int:
    inst = read_instance(a.instance)
    if a.selby:
        rep = run_parallel(inst, _heuristic_config(a), a.seeds, a.workers)
    elif a.brute:
        rep = brute_force(inst, cap=a.brute_cap)
    else:
        rep = solve_exact(inst, width_cap=a.width_cap)
    if a.trace:
        _save(a.trace, json.dumps({"trace": rep.trace, "meta": rep.meta}, indent=1) + "\n")
    if a.spins_out:
        _save(a.spins_out, format_spins(rep.spins))
    _write(rep.to_json(sort_keys=True) + "\n", a.out)
    return 0


def cmd_bench(a) -> int:
    solvers = [s for s in a.solvers.split(",") if s]
    bad = [s for s in solvers if s not in SOLVERS]
    if bad:
        raise UsageError(f"bench: --solvers: unknown solver {bad[0]!r}")
    if a.records:
        records = parse_records(Path(a.records).read_text())
    else:
        if not a.dir:
            raise UsageError("bench: --dir or --records is required")
        paths = sorted(Path(a.dir).glob("*.ising"))
        instances = [(p.stem, read_instance(p)) for p in paths]
        budget = Budget(time_limit=a.time, seeds=a.seeds, w=a.w, max_passes=a.max_passes,
                        width_cap=a.width_cap)
        records = run_batch(instances, solvers, budget, workers=a.workers)
        if a.json_out:
            _save(a.json_out, records_json(records))
    rows = summarize(records, solvers)
    if a.format == "json":
        _write(records_json(records), a.out)
    else:
        _write(summary_csv(rows), a.out)
    for r in records:
        for s, rep in r.reports.items():
            if rep.status == "error":
                print(f"quarantined: {s} on {r.instance}: {rep.message}", file=sys.stderr)
    return 0


def cmd_verify(a) -> int:
    inst = read_instance(a.instance)
    claimed = None
    if a.spins:
        s = parse_spins(Path(a.spins).read_text(), a.spins)
    elif a.report:
        rep = SolveReport.from_dict(json.loads(Path(a.report).read_text()))
        if rep.spins is None:
            raise UsageError(f"verify: {a.report} holds no configuration")
        s, claimed = rep.spins, rep.energy_num
    else:
        raise UsageError("verify: give --spins or --report")
    if len(s) != inst.n:
        print(f"verify: configuration has {len(s)} spins, instance has {inst.n}", file=sys.stderr)
        return EXIT_FAILURE
    e = inst.energy_num(s)
    ok = claimed is None or claimed == e
    out = {"energy_num": e, "gamma": inst.gamma, "energy": e / inst.gamma,
           "claimed_energy_num": claimed, "match": ok}
    _write(json.dumps(out, sort_keys=True) + "\n", a.out)
    if not ok:
        print(f"verify: claimed energy {claimed} differs from recomputed {e}", file=sys.stderr)
        return EXIT_FAILURE
    return 0


def cmd_embed(a) -> int:
    chains = parse_embedding(Path(a.embedding).read_text(), a.embedding) if a.embedding else None
    emb = build_clique_embedding(a.k, chains=chains)
    if a.dump:
        _save(a.dump, format_embedding(emb.chains))
    if a.decode:
        s = parse_spins(Path(a.decode).read_text(), a.decode)
        _write(format_spins(emb.decode(s)), a.out)
    elif a.logical:
        out = embed(read_instance(a.logical), emb, a.chain_strength)
        print(f"chain offset {out.offset_num}/{out.instance.gamma}", file=sys.stderr)
        _write(format_instance(out.instance), a.out)
    elif not a.dump:
        _write(format_embedding(emb.chains), a.out)
    return 0


# ---------------------------------------------------------------------------


def _add_heuristic_flags(p) -> None:
    p.add_argument("--w", type=int, default=3, help="subset width parameter")
    p.add_argument("--seeds", type=_seed_range, default=tuple(range(4711, 4791)),
                   help="seed range a..b or comma list (default 4711..4790)")
    p.add_argument("--max-passes", type=int, help="stop each run after this many outer passes")
    p.add_argument("--workers", type=int, default=1, help="parallel processes")
    p.add_argument("--width-cap", type=int, default=DEFAULT_WIDTH_CAP)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="chimera-ising", description="Ising ground states on Chimera graphs.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate an instance")
    g.add_argument("--family", required=True, choices=FAMILIES)
    g.add_argument("--k", type=int)
    g.add_argument("--seed", type=int, default=4711)
    g.add_argument("--faults", help="'example' (default), 'none' or a fault-list file")
    g.add_argument("--total-faulty", type=int, help="mgw: declare random qubits faulty up to this total")
    g.add_argument("--p", type=float, help="k64 families: logical edge probability")
    g.add_argument("--attempts", type=int, default=1, help="k64 families: draws before giving up")
    g.add_argument("--logical-out", help="k64 families: also write the logical instance")
    g.add_argument("--input", help="lga: real-valued instance to re-bin")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="solve one instance")
    s.add_argument("instance")
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="elimination-order DP (default)")
    mode.add_argument("--brute", action="store_true", help="exhaustive enumeration")
    mode.add_argument("--selby", action="store_true", help="subgraph-sampling heuristic")
    _add_heuristic_flags(s)
    s.add_argument("--time-limit", type=float, default=30.0, help="seconds per heuristic run")
    s.add_argument("--perturb-frac", type=float, default=0.20)
    s.add_argument("--restart", choices=("perturb", "fresh"), default="perturb")
    s.add_argument("--brute-cap", type=int, default=DEFAULT_BRUTE_CAP)
    s.add_argument("--trace", help="write the improvement trace as JSON")
    s.add_argument("--spins-out", help="write the best configuration")
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bench", help="run solvers over a directory of instances")
    b.add_argument("--dir")
    b.add_argument("--records", help="summarize existing JSON-lines records instead of solving")
    b.add_argument("--solvers", default="dp,selby", help=f"comma list of {', '.join(SOLVERS)}")
    b.add_argument("--time", type=float, default=30.0, help="heuristic seconds per instance")
    _add_heuristic_flags(b)
    b.add_argument("--format", choices=("csv", "json"), default="csv")
    b.add_argument("--json-out", help="also write per-instance records")
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("verify", help="recompute the energy of a configuration")
    v.add_argument("instance")
    v.add_argument("--spins")
    v.add_argument("--report")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("embed", help="clique embedding: dump, embed or decode")
    e.add_argument("logical", nargs="?")
    e.add_argument("--k", type=int, default=16)
    e.add_argument("--embedding", help="chain file replacing the built-in construction")
    e.add_argument("--chain-strength", type=int, default=10, help="chain coupling numerator")
    e.add_argument("--dump", help="write the embedding file")
    e.add_argument("--decode", help="physical spins to decode by majority vote")
    e.add_argument("--out")
    e.set_defaults(func=cmd_embed)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (FormatError, EmbeddingError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
