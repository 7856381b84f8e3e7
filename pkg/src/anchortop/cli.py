"""Command-line front end: ``anchortop {fit,simulate,evaluate,oracle,cv}``.

Exit codes: 0 success, 2 bad input or arguments, 3 no anchors / violated
assumptions / all CV points failed, 4 LP failure.
"""

from __future__ import annotations

import argparse
import itertools
import logging
import os
import shlex
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import fixtures
from .anchors import sensitivity_specificity
from .errors import (
    AnchorTopError,
    AssumptionViolated,
    DimensionMismatch,
    DocumentTooShort,
    EmptyCorpus,
    InfeasibleXi,
    LpFailed,
    NoAnchorsFound,
    ParseError,
    SingularGram,
)
from .estimator import check_assumptions, cv_scores, fit, recover_population
from .evaluation import aligned_losses
from .model import TuningProfile, load_counts, validate_topic_model
from .synth import generate_a, generate_model, identifiable_model, sample_corpus

EXIT_OK, EXIT_INPUT, EXIT_MODEL, EXIT_LP = 0, 2, 3, 4
JOBS_ENV = "ANCHORTOP_JOBS"

logger = logging.getLogger("anchortop")


class UsageError(Exception):
    """Invalid flag values discovered after argparse."""


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return "nan" if np.isnan(x) else f"{float(x):.10g}"
    return str(x)


def _invocation(argv) -> str:
    return "# anchortop " + shlex.join(argv)


def _write_tsv(path, header, rows, argv):
    lines = [_invocation(argv), "\t".join(header)]
    lines += ["\t".join(_fmt(row[h]) for h in header) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _number_list(text, kind=float):
    try:
        values = [kind(Fraction(tok.strip())) for tok in text.split(",") if tok.strip()]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"malformed list {text!r}") from None
    if not values:
        raise UsageError(f"empty list {text!r}")
    return values


def _int_list(text):
    values = _number_list(text, kind=Fraction)
    if any(v.denominator != 1 for v in values):
        raise UsageError(f"expected integers in {text!r}")
    return [int(v) for v in values]


# ---------------------------------------------------------------------------
# fit


def write_fit(result, data, tuning, out: Path, argv):
    out.mkdir(parents=True, exist_ok=True)
    K = result.k_hat
    header = ["word"] + [str(k + 1) for k in range(K)]
    rows = []
    for j in range(result.a_hat.shape[0]):
        row = {"word": j + 1}
        row.update({str(k + 1): float(result.a_hat[j, k]) for k in range(K)})
        rows.append(row)
    _write_tsv(out / "a_hat.tsv", header, rows, argv)
    (out / "partition.txt").write_text(result.partition.to_text(), encoding="utf-8")

    meta = [
        ("k_hat", K),
        ("documents", data.n),
        ("observed_words", data.p),
        ("vocab_size", data.vocab_size),
        ("c0", tuning.c0),
        ("c1", tuning.c1),
        ("reps", tuning.t_reps),
        ("seed", tuning.seed),
    ]
    for t, (lam, diag, reps) in enumerate(zip(result.lambdas, result.lp_diagnostics, result.rep_sets)):
        meta.append((f"lambda_{t + 1}", lam))
        meta.append((f"lp_iterations_{t + 1}", sum(d["iterations"] for d in diag)))
        meta.append((f"representatives_{t + 1}", ",".join(str(i + 1) for i in reps)))
    degenerate = sorted({k + 1 for cols in result.degenerate_columns for k in cols})
    meta.append(("degenerate_columns", ",".join(map(str, degenerate)) or "none"))
    _write_tsv(out / "metadata.tsv", ["key", "value"], [{"key": k, "value": v} for k, v in meta], argv)


def cmd_fit(args, argv):
    data = load_counts(args.input, format=args.format)
    tuning = TuningProfile(c0=args.c0, c1=args.c1, t_reps=args.reps, seed=args.seed)
    result = fit(data, tuning)
    write_fit(result, data, tuning, Path(args.out), argv)
    print(f"K_hat\t{result.k_hat}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# simulate

SETTING_FIELDS = ("n", "N", "p", "K", "anchors", "xi")
METRICS = ("k_hat", "k_correct", "sensitivity", "specificity", "l1", "l1_per_k", "l1_inf")


def _simulate_one(task):
    setting, replicate, entropy, tuning = task
    ss = np.random.SeedSequence(entropy)
    model_ss, corpus_ss, fit_ss = ss.spawn(3)
    xi = setting["xi"] if setting["xi"] is not None else 1.0 / setting["p"]
    row = dict(setting, xi=xi, replicate=replicate, status="ok")
    row.update({m: float("nan") for m in METRICS})
    try:
        model = generate_model(
            setting["p"], setting["K"], setting["anchors"], xi, setting["n"],
            seed=np.random.default_rng(model_ss),
        )
        data = sample_corpus(model, setting["N"], seed=np.random.default_rng(corpus_ss))
        fit_seed = int(fit_ss.generate_state(1)[0])
        result = fit(data, TuningProfile(tuning.c0, tuning.c1, tuning.t_reps, fit_seed))
    except (NoAnchorsFound, LpFailed) as exc:
        row["status"] = type(exc).__name__
        return row
    loss = aligned_losses(result.a_hat, model.A)
    sens, spec = sensitivity_specificity(result.partition, model)
    row.update(
        k_hat=result.k_hat,
        k_correct=float(result.k_hat == model.K),
        sensitivity=sens,
        specificity=spec,
        l1=loss.l1,
        l1_per_k=loss.l1 / model.K,
        l1_inf=loss.l1_inf,
    )
    return row


def simulation_grid(args):
    values = {
        "n": _int_list(args.n),
        "N": _int_list(args.N),
        "p": _int_list(args.p),
        "K": _int_list(args.K),
        "anchors": _int_list(args.anchors),
        "xi": [None] if args.xi is None else _number_list(args.xi),
    }
    if args.replicates < 1:
        raise UsageError("--replicates must be at least 1")
    settings = [dict(zip(SETTING_FIELDS, combo)) for combo in itertools.product(*values.values())]
    for s in settings:
        if min(s["n"], s["p"], s["K"], s["anchors"]) < 1 or s["N"] < 2:
            raise UsageError(f"invalid setting {s}")
        xi = s["xi"] if s["xi"] is not None else 1.0 / s["p"]
        try:
            generate_a(s["p"], s["K"], s["anchors"], xi, seed=0)
        except (InfeasibleXi, ValueError) as exc:
            raise UsageError(f"infeasible setting {s}: {exc}") from None
    return settings, values


def aggregate(rows):
    groups = {}
    for row in rows:
        groups.setdefault(tuple(row[f] for f in SETTING_FIELDS), []).append(row)
    out = []
    for key in sorted(groups):
        reps = groups[key]
        ok = [r for r in reps if r["status"] == "ok"]
        agg = dict(zip(SETTING_FIELDS, key), replicates=len(reps), succeeded=len(ok))
        for m in METRICS:
            vals = np.array([r[m] for r in ok], dtype=np.float64)
            agg[f"{m}_mean"] = float(vals.mean()) if vals.size else float("nan")
            agg[f"{m}_sd"] = float(vals.std(ddof=1)) if vals.size > 1 else float("nan")
        out.append(agg)
    return out


def _jobs(args):
    if args.jobs is not None:
        return max(1, args.jobs)
    env = os.environ.get(JOBS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"{JOBS_ENV} must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def run_simulation(settings, replicates, seed, tuning, jobs=1):
    tasks = [
        (s, r, [seed, i, r], tuning)
        for i, s in enumerate(settings)
        for r in range(replicates)
    ]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
            rows = list(pool.map(_simulate_one, tasks))
    else:
        rows = [_simulate_one(t) for t in tasks]
    rows.sort(key=lambda r: tuple(r[f] for f in SETTING_FIELDS) + (r["replicate"],))
    return rows


def cmd_simulate(args, argv):
    settings, values = simulation_grid(args)
    jobs = _jobs(args)
    tuning = TuningProfile(c0=args.c0, c1=args.c1, t_reps=args.reps, seed=args.seed)
    rows = run_simulation(settings, args.replicates, args.seed, tuning, jobs)
    agg = aggregate(rows)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    detail_header = list(SETTING_FIELDS) + ["replicate", "status"] + list(METRICS)
    _write_tsv(out / "detail.tsv", detail_header, rows, argv)
    agg_header = list(SETTING_FIELDS) + ["replicates", "succeeded"]
    agg_header += [f"{m}_{s}" for m in METRICS for s in ("mean", "sd")]
    _write_tsv(out / "aggregate.tsv", agg_header, agg, argv)

    if not args.no_figures:
        from .plotting import trend_figure

        varying = [f for f in SETTING_FIELDS if len(values[f]) > 1]
        for param in varying:
            others = tuple(f for f in varying if f != param)
            trend_figure(agg, param, "l1_per_k_mean", out / f"l1_per_k_vs_{param}.png",
                         group_by=others, ylabel="mean L1 / K")
    failed = sum(r["status"] != "ok" for r in rows)
    print(f"rows\t{len(rows)}")
    print(f"failed\t{failed}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# evaluate


def _read_matrix(path):
    try:
        mat = np.loadtxt(path, delimiter="\t", comments="#", ndmin=2)
    except ValueError as exc:
        raise ParseError(0, f"{path}: {exc}") from None
    return mat


def _read_a_hat(path):
    """Load an Â table written by ``fit`` (header row and word column) or a bare matrix."""
    text = Path(path).read_text(encoding="utf-8").splitlines()
    body = [ln for ln in text if ln.strip() and not ln.startswith("#")]
    if body and body[0].split("\t")[0] == "word":
        try:
            mat = np.array([[float(v) for v in ln.split("\t")[1:]] for ln in body[1:]], ndmin=2)
        except ValueError as exc:
            raise ParseError(0, f"{path}: {exc}") from None
        return mat
    return _read_matrix(path)


def cmd_evaluate(args, argv):
    a_hat = _read_a_hat(args.a_hat)
    a_true = _read_matrix(args.a_true)
    loss = aligned_losses(a_hat, a_true)
    print(_invocation(argv))
    print("metric\tvalue")
    print(f"k_hat\t{a_hat.shape[1]}")
    print(f"k\t{a_true.shape[1]}")
    print(f"l1\t{_fmt(loss.l1)}")
    print(f"l1_per_k\t{_fmt(loss.l1 / a_true.shape[1])}")
    print(f"l1_inf\t{_fmt(loss.l1_inf)}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# oracle

BUILTIN_MODELS = ("example1", "supp1", "supp2", "supp3", "random")


def oracle_model(args):
    if args.A or args.W:
        if not (args.A and args.W):
            raise UsageError("--A and --W must be given together")
        return validate_topic_model(_read_matrix(args.A), _read_matrix(args.W)), "files"
    if args.model == "example1":
        return validate_topic_model(fixtures.EXAMPLE1_A, fixtures.EXAMPLE1_W), "example1"
    if args.model == "random":
        return identifiable_model(args.p, args.K, seed=args.seed), f"random(seed={args.seed})"
    W = fixtures.RARE_TOPIC_W[args.model]
    K = W.shape[0]
    p = max(args.p, 3 * K)
    A, _ = generate_a(p, K, 1, 1.0 / p, seed=args.seed)
    return validate_topic_model(A, W), args.model


def cmd_oracle(args, argv):
    model, name = oracle_model(args)
    status = check_assumptions(model)
    print(_invocation(argv))
    print("key\tvalue")
    print(f"model\t{name}")
    print(f"p\t{model.p}\nK\t{model.K}\nn\t{model.n}")
    print(f"assumption_2\t{status['2']}\t(rank {status['rank']})")
    print(f"assumption_3\t{status['3']}\t(nu {_fmt(status['nu'])})")
    rec = recover_population(model, check=True)
    loss = aligned_losses(rec.a, model.A)
    perm = loss.permutation
    max_abs = max(float(np.max(np.abs(rec.a[:, u] - model.A[:, v]))) for u, v in perm.items())
    print(f"k_hat\t{rec.partition.k_hat}")
    print("partition\t" + " | ".join(" ".join(str(i + 1) for i in g) for g in rec.partition.groups))
    print(f"max_abs_error\t{_fmt(max_abs)}")
    print(f"l1\t{_fmt(loss.l1)}")
    print(f"l1_inf\t{_fmt(loss.l1_inf)}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# cv


def cmd_cv(args, argv):
    grid = _number_list(args.grid)
    if any(c < 0 for c in grid):
        raise UsageError("grid values must be nonnegative")
    data = load_counts(args.input, format=args.format)
    tuning = TuningProfile(c0=args.c0, seed=args.seed)
    scores = cv_scores(data, grid, split_fraction=args.split, tuning=tuning)
    print(_invocation(argv))
    print("c1\tloss")
    for c, loss in scores:
        print(f"{_fmt(c)}\t{'failed' if loss is None else _fmt(loss)}")
    ok = [(c, loss) for c, loss in scores if loss is not None]
    if not ok:
        raise SingularGram("every grid value failed")
    best = min(loss for _, loss in ok)
    print(f"selected\t{_fmt(next(c for c, loss in ok if loss == best))}")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="anchortop", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def tuning_flags(p, with_c1=True):
        p.add_argument("--c0", type=float, default=0.01, help="LP tuning constant")
        if with_c1:
            p.add_argument("--c1", type=float, default=1.1, help="anchor margin constant")
            p.add_argument("--reps", type=int, default=1, help="representative-set draws T")
        p.add_argument("--seed", type=int, default=0)

    fmt = dict(choices=("uci_bow", "tsv_dense"), default="uci_bow")

    p = sub.add_parser("fit", help="estimate K, anchors and A from a count file")
    p.add_argument("input")
    p.add_argument("--format", **fmt)
    p.add_argument("--out", required=True, help="output directory")
    tuning_flags(p)
    p.set_defaults(handler=cmd_fit)

    p = sub.add_parser("simulate", help="synthetic parameter sweep")
    p.add_argument("--n", default="500", help="documents (comma list)")
    p.add_argument("--N", default="500", help="words per document (comma list)")
    p.add_argument("--p", default="200", help="vocabulary size (comma list)")
    p.add_argument("--K", default="10", help="topics (comma list)")
    p.add_argument("--anchors", default="2", help="anchor words per topic (comma list)")
    p.add_argument("--xi", default=None, help="anchor scale (comma list, fractions allowed; default 1/p)")
    p.add_argument("--replicates", type=int, default=10)
    p.add_argument("--jobs", type=int, default=None, help=f"worker processes (default ${JOBS_ENV} or all cores)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--no-figures", action="store_true", help="skip PNG trend plots")
    tuning_flags(p)
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("evaluate", help="aligned losses between an estimate and a reference A")
    p.add_argument("a_hat")
    p.add_argument("a_true")
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("oracle", help="noiseless recovery check")
    p.add_argument("--model", choices=BUILTIN_MODELS, default="example1")
    p.add_argument("--A", default=None, help="TSV file with A (p x K)")
    p.add_argument("--W", default=None, help="TSV file with W (K x n)")
    p.add_argument("--p", type=int, default=30, help="vocabulary size for generated A")
    p.add_argument("--K", type=int, default=5, help="topics for --model random")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=cmd_oracle)

    p = sub.add_parser("cv", help="choose C1 by sample splitting")
    p.add_argument("input")
    p.add_argument("--format", **fmt)
    p.add_argument("--grid", required=True, help="comma list of C1 values")
    p.add_argument("--split", type=float, default=0.5, help="training fraction")
    tuning_flags(p, with_c1=False)
    p.set_defaults(handler=cmd_cv)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.handler(args, argv)
    except (ParseError, EmptyCorpus, DocumentTooShort, DimensionMismatch, UsageError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NoAnchorsFound, AssumptionViolated, SingularGram) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except LpFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LP
    except AnchorTopError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
