"""``centromesh`` command-line interface.

Exit codes: 0 success, 1 verification failure, 2 configuration or I/O
error, 3 numerical failure (singular matrix).
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import io
from .assembly import BcSpec, assemble, is_centrosymmetric
from .bench import CSV_COLUMNS, run_benchmark
from .centro import centro_solve, split_blocks, storage_accounting
from .config import load_config
from .errors import CentromeshError, ConfigurationError, SingularityError
from .mesh import CENTROSYMMETRIC, CLASSICAL, GridSpec, build_numbering
from .oracle import dense_solve

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

PAPER_GRID = GridSpec(3, 3, 4, 1 / 2, 1 / 3, 1 / 4)


def _fmt_coef(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def _format_row(system, n: int) -> str:
    A = system.A
    row = A[[n]].toarray()[0] if system.is_sparse else A[n]
    node = system.numbering.node(n)
    cols = np.nonzero(row)[0]
    entries = " ".join(f"{c}:{_fmt_coef(row[c])}" for c in cols)
    return f"row {n} node ({node.i},{node.j},{node.k}) {system.row_kinds[n]}: {entries} | b={_fmt_coef(system.b[n])}"


def cmd_paper_example(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    grid = PAPER_GRID
    bc = BcSpec.paper_example()
    verdicts = {}
    systems = {}
    for scheme in (CLASSICAL, CENTROSYMMETRIC):
        system = assemble(grid, build_numbering(grid, scheme), bc)
        systems[scheme] = system
        io.write_matrix_market(out / f"A_{scheme}.mtx", system.A)
        io.write_dense_csv(out / f"A_{scheme}.csv", system.A)
        check = is_centrosymmetric(system.A, 0.0)
        verdicts[scheme] = {
            "centrosymmetric": check.ok,
            "max_deviation": check.max_deviation,
            "first_violation": list(check.violation) if check.violation else None,
        }
        print(f"{scheme:>15}: {check.describe()}")
    io.write_blocks(out / f"A_{CENTROSYMMETRIC}", split_blocks(systems[CENTROSYMMETRIC].A, 0.0))

    matches = (not verdicts[CLASSICAL]["centrosymmetric"]) and verdicts[CENTROSYMMETRIC]["centrosymmetric"]
    io.write_json(
        out / "verdict.json",
        {
            "grid": {"nx": grid.nx, "ny": grid.ny, "nz": grid.nz, "hx": grid.hx, "hy": grid.hy, "hz": grid.hz},
            "n_total": grid.n_total,
            "n_half": grid.n_half,
            "bc": bc.types,
            "tolerance": 0.0,
            "verdicts": verdicts,
            "matches_expected": matches,
        },
    )

    if args.dump_rows:
        system = systems[CENTROSYMMETRIC]
        for n in range(system.n_total):
            if args.dump_rows == "all" or system.row_kinds[n] == "interior":
                print(_format_row(system, n))
    print("verdicts match: classical fails, centrosymmetric passes" if matches else "verdicts do NOT match")
    return EXIT_OK if matches else EXIT_VERIFY


def cmd_solve(args) -> int:
    cfg = load_config(args.config, overrides={
        "solver": args.solver, "output_dir": args.out, "seed": args.seed, "residual": args.tol,
    })
    grid = cfg.grid()
    bc, rho = cfg.sources(grid)
    numbering = build_numbering(grid, cfg.numbering)
    system = assemble(grid, numbering, bc, rho)
    tol = cfg.tolerances["residual"]

    if cfg.solver == "centro":
        if cfg.numbering != CENTROSYMMETRIC:
            raise ConfigurationError("solver 'centro' requires numbering 'centrosymmetric'")
        blocks = split_blocks(system.A, cfg.tolerances["centro"], relative=True)
        x, rep = centro_solve(blocks, system.b, cond_limit=cfg.tolerances["cond_limit"], report=True)
    else:
        x, rep = dense_solve(system.A, system.b, method="lapack")
    storage = storage_accounting(grid.n_half)
    storage["used"] = storage[cfg.solver]

    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    io.write_vector(out / "solution.txt", x)
    report = {
        "solver": cfg.solver,
        "numbering": cfg.numbering,
        "grid": list(grid.shape),
        "seed": cfg.seed,
        "tolerance": tol,
        "passed": bool(rep.residual <= tol),
        **{k: v for k, v in rep.to_dict().items() if k != "solver"},
        "storage": storage,
        "notes": list(system.notes),
    }
    io.write_json(out / "report.json", report)
    print(f"relative residual {rep.residual:.3e} (tol {tol:.1e}); solution written to {out / 'solution.txt'}")
    for w in rep.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def cmd_check(args) -> int:
    try:
        A = io.read_matrix_market(args.matrix)
    except (OSError, ValueError) as exc:
        raise ConfigurationError(f"cannot read {args.matrix}: {exc}") from None
    check = is_centrosymmetric(A, args.tol, relative=args.relative)
    print(f"{args.matrix}: {check.describe()}")
    return EXIT_OK if check.ok else EXIT_VERIFY


def cmd_bench(args) -> int:
    cfg = load_config(args.config, overrides={"output_dir": args.out, "seed": args.seed})
    rows = run_benchmark(cfg.bench["sizes"], cfg.bench["repeats"], cfg.seed)
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "bench.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    print(f"{'N':>6} {'dense [s]':>11} {'centro [s]':>11} {'time ratio':>11} {'storage ratio':>14}")
    for r in rows:
        print(
            f"{r['n_total']:>6} {r['dense_time']:>11.4g} {r['centro_time']:>11.4g} "
            f"{r['time_ratio']:>11.3f} {r['storage_ratio']:>14.1f}"
        )
    print(f"seed {cfg.seed}; CSV written to {out / 'bench.csv'}")
    return EXIT_OK


def cmd_mesh_dump(args) -> int:
    cfg = load_config(args.config)
    numbering = build_numbering(cfg.grid(), cfg.numbering)
    if args.out:
        io.write_mesh_csv(args.out, numbering)
    else:
        io.dump_mesh_csv(sys.stdout, numbering)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="centromesh",
        description="Centrosymmetric finite-difference Poisson systems and their half-size solve.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("paper-example", help="assemble the 36-node worked example under both numberings")
    p.add_argument("--out", default="centromesh-out/paper-example", help="output directory")
    p.add_argument("--dump-rows", choices=["interior", "all"], help="print matrix rows")
    p.set_defaults(func=cmd_paper_example)

    p = sub.add_parser("solve", help="assemble and solve a configured problem")
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--solver", choices=["centro", "dense"])
    p.add_argument("--out", help="output directory (config key output_dir)")
    p.add_argument("--seed", type=int, help="seed for random value sources")
    p.add_argument("--tol", type=float, help="relative residual tolerance (config key tolerances.residual)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="test a MatrixMarket matrix for centrosymmetry")
    p.add_argument("--matrix", required=True)
    p.add_argument("--tol", type=float, default=0.0)
    p.add_argument("--relative", action="store_true", help="scale tol by max |a|")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("bench", help="time the split solve against a full LU")
    p.add_argument("--config", help="JSON run configuration (bench.sizes, bench.repeats)")
    p.add_argument("--out", help="output directory (config key output_dir)")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("mesh-dump", help="write the node table as CSV")
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--out", help="CSV file (default: stdout)")
    p.set_defaults(func=cmd_mesh_dump)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SingularityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (CentromeshError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
