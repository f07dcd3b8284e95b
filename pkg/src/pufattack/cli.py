"""Command-line front end: ``pufattack {generate,attack,bench,stats}``.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""
import argparse
import hashlib
import logging
import os
import sys

from . import fileio
from .attack import PufProblem, evaluate_test
from .errors import ConfigError, ContractError, FormatError
from .harness import (
    ExperimentPlan,
    collect_results,
    load_plan,
    min_table,
    parse_size,
    run_experiment,
    spearman_table,
    with_overrides,
    write_reports,
)
from .optimizers import ALGORITHMS, Budget, config_from_dict, optimize
from .puf import generate_crp_set, sample_puf_instance
from .seeding import derive_seed

RESULTS_ENV = "PUFATTACK_RESULTS"
PLAN_FILE = "plan.yaml"


class UsageError(Exception):
    pass


def _size(token):
    try:
        parse_size(token)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return token.lower()


def _int_list(text):
    try:
        return [int(x) for x in str(text).split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _seed(text):
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _param(text):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    key, value = text.split("=", 1)
    import yaml

    return key.strip(), yaml.safe_load(value)


def build_parser():
    p = argparse.ArgumentParser(prog="pufattack", description="Simulate arbiter PUFs and attack them with metaheuristics.")
    p.add_argument("-v", "--verbose", action="store_true", help="log optimizer warnings")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a PUF instance with learning and test CRP files")
    g.add_argument("--size", type=_size, required=True, help="PUF size KxN, e.g. 1x64 or 4x16")
    g.add_argument("--crps", type=_int_list, required=True, help="learning set size(s), comma separated")
    g.add_argument("--test", type=int, default=1000, help="test set size (default 1000)")
    g.add_argument("--seed", type=_seed, default=0, help="master seed (default 0)")
    g.add_argument("--out", required=True, help="output directory")
    g.add_argument("--phi", action="store_true", help="also store feature vectors in the CRP files")
    g.add_argument("--text", action="store_true", help="also write .txt exports of every CRP set")

    a = sub.add_parser("attack", help="run one optimizer on a learning set and score it on a test set")
    a.add_argument("--alg", required=True, choices=ALGORITHMS, help="algorithm tag")
    a.add_argument("--learn", required=True, help="learning .crp file")
    a.add_argument("--test", required=True, help="test .crp file")
    a.add_argument("--budget", type=int, default=100_000, help="fitness evaluations (default 100000)")
    a.add_argument("--target", type=int, default=None, help="stop once train errors <= TARGET")
    a.add_argument("--seed", type=_seed, default=0, help="optimizer seed (default 0)")
    a.add_argument("--param", type=_param, action="append", default=[], metavar="KEY=VALUE",
                   help="override an algorithm parameter (repeatable)")
    a.add_argument("--strict", action="store_true", help="fixed-order reference fitness evaluation")
    a.add_argument("--out", default="run.rec", help="run record path (default run.rec)")

    b = sub.add_parser("bench", help="run (or resume) a benchmark grid")
    b.add_argument("--plan", help="plan file (YAML); defaults to the full default grid")
    b.add_argument("--out", default=None, help=f"results directory (default ${RESULTS_ENV} or ./results)")
    b.add_argument("--jobs", type=int, default=None, help="parallel worker processes")
    b.add_argument("--master-seed", type=_seed, default=None)
    b.add_argument("--budget", type=int, default=None)
    b.add_argument("--target", type=int, default=None)
    b.add_argument("--instances", type=int, default=None)
    b.add_argument("--runs", type=int, default=None)
    b.add_argument("--sizes", type=lambda s: [_size(x) for x in s.split(",")], default=None, help="e.g. 1x16,4x16")
    b.add_argument("--crps", type=_int_list, default=None, help="e.g. 2000,10000")
    b.add_argument("--algorithms", type=lambda s: s.lower().split(","), default=None, help="e.g. cmaes,de")
    b.add_argument("--dry-run", action="store_true", help="print the resolved plan and exit")

    s = sub.add_parser("stats", help="tables and plot data from a results directory")
    s.add_argument("--in", dest="root", default=None, help=f"results directory (default ${RESULTS_ENV} or ./results)")
    s.add_argument("--table", choices=("min", "spearman"), default="min")
    s.add_argument("--cell", default=None, help="restrict to SIZE (e.g. 4x16)")
    s.add_argument("--alg", choices=ALGORITHMS, default="cmaes", help="algorithm for the spearman table")
    s.add_argument("--csv", action="store_true", help="print CSV instead of aligned text")
    return p


def _default_root(value):
    return value or os.environ.get(RESULTS_ENV) or "results"


def cmd_generate(args, out):
    k, n = parse_size(args.size)
    os.makedirs(args.out, exist_ok=True)
    instance = sample_puf_instance(n, k, derive_seed(args.seed, "instance", args.size, 0))
    learning = [
        generate_crp_set(instance, c, "learning", derive_seed(args.seed, "learning", args.size, 0, c))
        for c in args.crps
    ]
    test = generate_crp_set(instance, args.test, "test", derive_seed(args.seed, "test", args.size, 0), forbidden=learning)
    inst_path = os.path.join(args.out, "instance.puf")
    fileio.save_instance(instance, inst_path)
    written = [inst_path]
    for crps in learning + [test]:
        stem = f"learning-{len(crps)}" if crps.role == "learning" else "test"
        path = os.path.join(args.out, f"{stem}.crp")
        fileio.save_crpset(crps, path, include_phi=args.phi)
        written.append(path)
        if args.text:
            fileio.export_crpset_text(crps, os.path.join(args.out, f"{stem}.txt"))
    digest = hashlib.sha256(fileio.instance_to_bytes(instance)).hexdigest()[:16]
    print(f"instance {instance.size_label} seed={instance.seed} digest={digest}", file=out)
    if test.overlap_allowed:
        print("note: test set may overlap the learning set (challenge space too small)", file=out)
    for path in written:
        print(path, file=out)
    return 0


def cmd_attack(args, out):
    learning = fileio.load_crpset(args.learn)
    test = fileio.load_crpset(args.test)
    if (learning.n, learning.k) != (test.n, test.k):
        raise ContractError(f"learning set is {learning.size_label} but test set is {test.size_label}")
    if learning.role != "learning" or test.role != "test":
        raise ContractError("--learn must be a learning set and --test a test set")
    config = config_from_dict({"algorithm": args.alg, **dict(args.param)})
    record = optimize(PufProblem(learning, strict=args.strict), config, Budget(args.budget, args.target), seed=args.seed)
    report = evaluate_test(record.best_genes, test, strict=args.strict)
    record.test_errors, record.test_total = report.errors, report.total
    record.meta = {"size": learning.size_label, "learning_size": len(learning), "instance_seed": learning.instance_seed}
    fileio.save_record(record, args.out)
    print(f"algorithm {args.alg}  evaluations {record.evaluations}  seed {args.seed}", file=out)
    print(f"train errors {record.best_fitness}/{len(learning)}", file=out)
    print(str(report), file=out)
    print(f"record {args.out}", file=out)
    return 0


def cmd_bench(args, out):
    plan = load_plan(args.plan) if args.plan else ExperimentPlan()
    plan = with_overrides(
        plan,
        jobs=args.jobs,
        master_seed=args.master_seed,
        budget=args.budget,
        target=args.target,
        instances=args.instances,
        runs=args.runs,
        sizes=args.sizes,
        crps=args.crps,
        algorithms=args.algorithms,
    )
    out.write(plan.to_yaml())
    out.flush()
    if args.dry_run:
        return 0
    root = _default_root(args.out)
    os.makedirs(root, exist_ok=True)
    plan_path = os.path.join(root, PLAN_FILE)
    stored = replace_jobs(plan)
    if os.path.exists(plan_path):
        previous = load_plan(plan_path)
        if replace_jobs(previous) != stored:
            raise ConfigError(f"{root} holds results of a different plan; use another --out")
    with open(plan_path, "w") as fh:
        fh.write(stored.to_yaml())
    cells = run_experiment(plan, root)
    out.write(min_table(cells, plan))
    incomplete = [c.label for c in cells if not c.complete]
    if incomplete:
        print(f"{len(incomplete)} incomplete cell(s): {', '.join(incomplete)}", file=sys.stderr)
        return 1
    return 0


def replace_jobs(plan):
    # the stored plan must not depend on --jobs, which never changes results
    return with_overrides(plan, jobs=1)


def cmd_stats(args, out):
    root = _default_root(args.root)
    plan_path = os.path.join(root, PLAN_FILE)
    if not os.path.exists(plan_path):
        raise FileNotFoundError(f"no {PLAN_FILE} in {root}; run 'pufattack bench' first")
    plan = load_plan(plan_path)
    cells = collect_results(plan, root)
    write_reports(plan, cells, root)
    view = plan
    if args.cell:
        size = _size(args.cell.split("/")[0])
        if size not in plan.sizes:
            raise UsageError(f"size {size} is not part of the plan ({', '.join(plan.sizes)})")
        view = with_overrides(plan, sizes=[size])
    fmt = "csv" if args.csv else "text"
    if args.table == "min":
        out.write(min_table(cells, view, fmt=fmt))
    else:
        if args.alg not in plan.algorithms:
            raise UsageError(f"algorithm {args.alg} is not part of the plan")
        out.write(spearman_table(cells, view, algorithm=args.alg, fmt=fmt))
    return 0


COMMANDS = {"generate": cmd_generate, "attack": cmd_attack, "bench": cmd_bench, "stats": cmd_stats}


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.verbose else logging.ERROR, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args, out)
    except (UsageError, ConfigError) as exc:
        parser.print_usage(sys.stderr)
        print(f"pufattack: error: {exc}", file=sys.stderr)
        return 2
    except (FormatError, ContractError, OSError, ValueError) as exc:
        print(f"pufattack: error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        print("interrupted; finished runs are saved and the grid can be resumed", file=sys.stderr)
        return 130


if __name__ == "__main__":
    sys.exit(main())
