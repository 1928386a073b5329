"""Command-line entry point exposing the pipeline end to end.

Subcommands: pool, eval, agree, kappa, rankcmp, tukey, power, loto, rrfilter,
efficiency, histogram, serve.  Outputs are deterministic given inputs and
seeds.  Exit codes: 2 for usage errors, 1 for data errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import agreement, efficiency, measures, pooling, rankstats, robustness
from .model import (
    DataError,
    parse_label_matrix,
    parse_qrels_file,
    parse_run_file,
    parse_score_matrix,
    parse_topics_file,
    serialize_qrels,
    serialize_score_matrix,
)


def _load_runs(runs_dir) -> list:
    paths = sorted(p for p in Path(runs_dir).iterdir() if p.is_file())
    if not paths:
        raise DataError(f"no run files in {runs_dir}")
    return [parse_run_file(p) for p in paths]


def _read_topic_filter(path, universe) -> list:
    """Topic list file: lines are qids to include; lines starting with '-'
    exclude from the otherwise-full universe."""
    include, exclude = [], set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("-"):
            exclude.add(line[1:].strip())
        else:
            include.append(line)
    base = include if include else sorted(universe)
    return [t for t in base if t not in exclude]


def _write(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# Subcommand handlers.

def cmd_pool(args) -> int:
    runs = _load_runs(args.runs)
    universe = sorted({t for r in runs for t in r.rankings})
    topics = _read_topic_filter(args.topics, universe) if args.topics else universe
    config = pooling.PoolConfig(depth=args.depth, strategy=args.strategy.upper(),
                                seed=args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    sizes = []
    for topic in topics:
        pool = pooling.build_ordered_pool(runs, topic, config)
        _write(out / f"{topic}.pool", pooling.serialize_pool(pool))
        sizes.append(len(pool.documents))
    print(f"pooled {len(topics)} topics, {sum(sizes)} topicdocs, "
          f"mean pool size {sum(sizes) / len(sizes):.1f}")
    return 0


def cmd_eval(args) -> int:
    runs = _load_runs(args.runs)
    qrels = parse_qrels_file(args.qrels)
    config = measures.MeasureConfig(cutoff=args.cutoff)
    if args.topics:
        topics = _read_topic_filter(args.topics, qrels.topics())
    else:
        topics = robustness.valid_topics([qrels])
        dropped = len(qrels.topics()) - len(topics)
        if dropped:
            print(f"excluded {dropped} topics without relevant documents", file=sys.stderr)
    matrix = measures.score_matrix(runs, qrels, args.measure, config, topics)
    _write(args.out, serialize_score_matrix(matrix))
    print(f"wrote {len(matrix.topics)}x{len(matrix.runs)} score matrix to {args.out}")
    return 0


def cmd_agree(args) -> int:
    matrix = parse_label_matrix(args.matrix)
    rows = [("scope", "projection", "alpha", "D_o", "D_e", "n_units")]

    def add(scope, projection, result):
        rows.append((scope, projection, f"{result.alpha:.6f}", f"{result.D_o:.6f}",
                     f"{result.D_e:.6f}", str(result.unit_count)))

    projection = args.projection.upper()
    projected = matrix if projection == "ALL" else matrix.select_assessors(
        [a for a in matrix.assessors if a.upper().startswith(projection)])
    add("overall", projection, agreement.krippendorff_alpha_ordinal(projected))
    if args.loo:
        for assessor in projected.assessors:
            add(f"w/o {assessor}", projection,
                agreement.leave_one_out_alpha(projected, assessor))
    if args.per_topic:
        result = agreement.mean_per_topic_alpha(matrix, projection=projection)
        for topic in sorted(result.per_topic):
            rows.append((f"topic {topic}", projection,
                         f"{result.per_topic[topic]:.6f}", "NA", "NA", "NA"))
        rows.append(("mean-per-topic", projection, f"{result.mean:.6f}", "NA", "NA",
                     str(len(result.per_topic))))
        for topic, reason in sorted(result.failed.items()):
            print(f"alpha undefined for topic {topic}: {reason}", file=sys.stderr)
    text = "\n".join("\t".join(r) for r in rows) + "\n"
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_kappa(args) -> int:
    qrels_a = parse_qrels_file(args.a)
    qrels_b = parse_qrels_file(args.b)
    topics = None
    if args.topics:
        common = set(qrels_a.entries) & set(qrels_b.entries)
        topics = _read_topic_filter(args.topics, sorted(common))
    mean, per_topic, skipped = agreement.per_topic_kappa(
        qrels_a, qrels_b, topics,
        on_degenerate="skip" if args.skip_degenerate else "error")
    lines = ["topic\tkappa"]
    lines += [f"{t}\t{per_topic[t]:.6f}" for t in sorted(per_topic)]
    lines.append(f"mean\t{mean:.6f}")
    text = "\n".join(lines) + "\n"
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    for topic, reason in sorted(skipped.items()):
        print(f"skipped topic {topic}: {reason}", file=sys.stderr)
    return 0


def cmd_rankcmp(args) -> int:
    matrix_a = parse_score_matrix(args.a)
    matrix_b = parse_score_matrix(args.b)
    result = rankstats.kendall_tau(matrix_a.mean_by_run(), matrix_b.mean_by_run(),
                                   ci=args.ci)
    line = f"tau={result.tau:.3f} n={result.n}"
    if args.ci:
        line += f" ci=[{result.ci_low:.3f}, {result.ci_high:.3f}]"
    if result.tied_pairs:
        line += f" tied_pairs={result.tied_pairs}"
    print(line)
    return 0


def _print_tukey(result, out) -> None:
    lines = [f"# design={result.design} residual_variance={result.residual_variance:.6g} "
             f"df={result.df} n={result.n_blocks}",
             "pair\tdiff\tq\tp\tES"]
    for c in result.pairwise:
        lines.append(f"{c.group_a}-{c.group_b}\t{c.mean_diff:.6g}\t{c.q_statistic:.4f}"
                     f"\t{c.p_value:.6g}\t{c.effect_size:.4f}")
    text = "\n".join(lines) + "\n"
    if out:
        _write(out, text)
    else:
        sys.stdout.write(text)


def cmd_tukey(args) -> int:
    if args.design == "paired":
        lines = [l for l in Path(args.table).read_text(encoding="utf-8").splitlines()
                 if l.strip() and not l.startswith("#")]
        header = lines[0].split("\t")
        treatments = header[1:]
        table = []
        for line in lines[1:]:
            parts = line.split("\t")
            if len(parts) != len(header):
                raise DataError(f"{args.table}: row with {len(parts)} columns, "
                                f"expected {len(header)}")
            table.append([float("nan") if v == "NA" else float(v) for v in parts[1:]])
        result = rankstats.tukey_hsd_paired(table, treatments)
    else:
        groups: dict = {}
        for lineno, line in enumerate(
                Path(args.table).read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise DataError(f"{args.table}:{lineno}: expected 'group value'")
            groups.setdefault(parts[0], []).append(float(parts[1]))
        result = rankstats.tukey_hsd_unpaired(groups)
    _print_tukey(result, args.out)
    return 0


def cmd_power(args) -> int:
    result = rankstats.power_pairedt(args.t, args.n, alpha=args.alpha,
                                     target_power=args.target)
    print(f"achieved={result.achieved_power:.3f} required_n={result.required_n_for_target}")
    return 0


def cmd_loto(args) -> int:
    runs = _load_runs(args.runs)
    qrels = parse_qrels_file(args.qrels)
    team_map = {}
    for lineno, line in enumerate(Path(args.teams).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise DataError(f"{args.teams}:{lineno}: expected 'run_tag team_id'")
        team_map[parts[0]] = parts[1]
    eval_tags = None
    if args.eval_runs:
        eval_tags = [l.strip() for l in Path(args.eval_runs).read_text(encoding="utf-8").splitlines()
                     if l.strip() and not l.startswith("#")]
    topics = (_read_topic_filter(args.topics, qrels.topics()) if args.topics
              else robustness.valid_topics([qrels]))
    report = robustness.loto_experiment(
        runs, qrels, team_map, args.measure,
        measures.MeasureConfig(cutoff=args.cutoff), topics,
        pool_depth=args.depth, eval_run_tags=eval_tags)
    lines = ["team\tunique_contributions\tloto_qrels_size\ttau"]
    for entry in report.per_team:
        lines.append(f"{entry.team}\t{entry.unique_contribution_count}"
                     f"\t{entry.loto_qrels_size}\t{entry.tau.tau:.6f}")
    lines.append(f"mean\tNA\tNA\t{report.mean_tau:.6f}")
    _write(args.out, "\n".join(lines) + "\n")
    if args.vdip:
        rows = ["run,full_score,loto_score,team_left_out"]
        rows += [f"{tag},{full:.6f},{loto:.6f},{team}"
                 for tag, full, loto, team in report.score_pairs]
        _write(args.vdip, "\n".join(rows) + "\n")
    print(f"mean tau over {len(report.per_team)} teams: {report.mean_tau:.4f}")
    return 0


def cmd_rrfilter(args) -> int:
    qrels = parse_qrels_file(args.qrels)
    runs = _load_runs(args.runs)
    filtered = robustness.rr_filter(qrels, runs, args.lo, args.hi)
    header = f"rr-filter lo={args.lo} hi={args.hi} source={Path(args.qrels).name}"
    _write(args.out, serialize_qrels(filtered, header=header) or f"# {header}\n")
    print(f"kept {filtered.size()} of {qrels.size()} topicdocs")
    return 0


def cmd_efficiency(args) -> int:
    timelines = efficiency.parse_activity_log(args.log)
    assessor_of: dict = {}
    for lineno, line in enumerate(Path(args.assignments).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise DataError(f"{args.assignments}:{lineno}: expected 'topic version assessor'")
        assessor_of[(parts[0], parts[1])] = parts[2]
    versions = (args.versions.split(",") if args.versions
                else sorted({v for _, v in assessor_of}))
    stats_by_cell = {}
    for (topic, version), assessor in assessor_of.items():
        timeline = timelines.get((assessor, topic))
        if timeline:
            stats_by_cell[(topic, version)] = efficiency.efficiency_stats(timeline)
    kept, rows = efficiency.efficiency_table(stats_by_cell, args.criterion, versions)
    lines = ["topic\t" + "\t".join(versions)]
    for topic, row in zip(kept, rows):
        lines.append(topic + "\t" + "\t".join(f"{v:.3f}" for v in row))
    text = "\n".join(lines) + "\n"
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    print(f"{args.criterion}: n={len(kept)} topics after listwise NA deletion",
          file=sys.stderr)
    if args.tukey:
        if not rows:
            raise DataError("no complete topics; cannot run the paired test")
        result = rankstats.tukey_hsd_paired(rows, versions)
        _print_tukey(result, None)
    return 0


def cmd_histogram(args) -> int:
    version_qrels, orders = {}, {}
    for lineno, line in enumerate(Path(args.manifest).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise DataError(f"{args.manifest}:{lineno}: expected 'version qrels_path pools_path'")
        version, qrels_path, pools_path = parts
        version_qrels[version] = parse_qrels_file(qrels_path, version_id=version)
        pool_paths = (sorted(Path(pools_path).glob("*.pool"))
                      if Path(pools_path).is_dir() else [Path(pools_path)])
        for path in pool_paths:
            for pool in pooling.parse_pool_file(path):
                orders[(pool.topic, version)] = pool.presentation_order
    versions = args.versions.split(",") if args.versions else None
    counts = robustness.rank_label_histogram(version_qrels, orders, args.max_rank,
                                             versions)
    rows = ["rank,count"] + [f"{r},{c}" for r, c in enumerate(counts, 1)]
    text = "\n".join(rows) + "\n"
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_serve(args) -> int:
    from .service import AssessmentStore, build_assignments, create_app

    runs = _load_runs(args.runs)
    topic_list = parse_topics_file(args.topics_xml)
    topics = {t.qid: t for t in topic_list}
    qids = sorted(topics)
    versions = args.versions.split(",")
    assessors = args.assessors.split(",")
    orders = {}
    for version in versions:
        strategy = "RND" if version.upper().startswith("RND") else "PRI"
        version_seed = args.seed ^ pooling.fnv1a64(version.encode("utf-8"))
        config = pooling.PoolConfig(depth=args.depth, strategy=strategy,
                                    seed=version_seed)
        for qid in qids:
            pool = pooling.build_ordered_pool(runs, qid, config)
            orders[(qid, version)] = pool.presentation_order
    assignments = build_assignments(assessors, qids, versions, seed=args.seed)
    store = AssessmentStore(assignments=assignments, orders=orders, topics=topics,
                            doc_dir=args.docs, log_path=args.log)
    app = create_app(store, ui_dir=args.ui)
    import uvicorn

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="poolbench",
        description="Build and meta-evaluate pooling-based test collections")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pool", help="build depth-k pools with PRI or RND ordering")
    p.add_argument("--runs", required=True, help="directory of run files")
    p.add_argument("--depth", type=int, default=15)
    p.add_argument("--strategy", choices=["pri", "rnd"], required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--topics", help="topic id filter file")
    p.add_argument("--out", required=True, help="output directory for .pool files")
    p.set_defaults(func=cmd_pool)

    p = sub.add_parser("eval", help="compute a topic-by-run score matrix")
    p.add_argument("--runs", required=True)
    p.add_argument("--qrels", required=True)
    p.add_argument("--measure", choices=sorted(measures.MEASURES), required=True)
    p.add_argument("--cutoff", type=int, default=10)
    p.add_argument("--topics", help="topic id filter file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("agree", help="Krippendorff alpha report from a label matrix")
    p.add_argument("--matrix", required=True, help="label matrix TSV")
    p.add_argument("--projection", choices=["all", "rnd", "pri"], default="all")
    p.add_argument("--loo", action="store_true", help="add leave-one-out rows")
    p.add_argument("--per-topic", action="store_true", help="add per-topic alpha rows")
    p.add_argument("--out")
    p.set_defaults(func=cmd_agree)

    p = sub.add_parser("kappa", help="per-topic quadratic weighted kappa between two qrels")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--topics", help="topic id filter file")
    p.add_argument("--skip-degenerate", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_kappa)

    p = sub.add_parser("rankcmp", help="Kendall tau between two score matrices")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--ci", action="store_true", help="add the 95%% Fisher-z interval")
    p.set_defaults(func=cmd_rankcmp)

    p = sub.add_parser("tukey", help="Tukey HSD with effect sizes")
    p.add_argument("--design", choices=["paired", "unpaired"], required=True)
    p.add_argument("--table", required=True,
                   help="paired: wide TSV (block + treatments); unpaired: 'group value' lines")
    p.add_argument("--out")
    p.set_defaults(func=cmd_tukey)

    p = sub.add_parser("power", help="paired t-test power and sample size")
    p.add_argument("--t", type=float, required=True, help="pilot t statistic")
    p.add_argument("--n", type=int, required=True, help="pilot sample size")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--target", type=float, default=0.70)
    p.set_defaults(func=cmd_power)

    p = sub.add_parser("loto", help="leave-one-team-out reusability experiment")
    p.add_argument("--runs", required=True)
    p.add_argument("--qrels", required=True)
    p.add_argument("--teams", required=True, help="run_tag/team map file")
    p.add_argument("--measure", choices=sorted(measures.MEASURES), required=True)
    p.add_argument("--cutoff", type=int, default=10)
    p.add_argument("--depth", type=int, default=15, help="pool depth for unique contributions")
    p.add_argument("--eval-runs", help="file listing run tags to rank (default: all)")
    p.add_argument("--topics", help="topic id filter file")
    p.add_argument("--out", required=True)
    p.add_argument("--vdip", help="per-run full-vs-LOTO score CSV")
    p.set_defaults(func=cmd_loto)

    p = sub.add_parser("rrfilter", help="restrict qrels to a run-rank window")
    p.add_argument("--qrels", required=True)
    p.add_argument("--runs", required=True)
    p.add_argument("--lo", type=int, required=True)
    p.add_argument("--hi", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_rrfilter)

    p = sub.add_parser("efficiency", help="efficiency criteria from an activity log")
    p.add_argument("--log", required=True, help="JSON-lines activity log")
    p.add_argument("--assignments", required=True,
                   help="file of 'topic version assessor' lines")
    p.add_argument("--criterion", choices=list(efficiency.CRITERIA), required=True)
    p.add_argument("--versions", help="comma-separated version order (default: sorted)")
    p.add_argument("--tukey", action="store_true", help="run the paired test on the table")
    p.add_argument("--out")
    p.set_defaults(func=cmd_efficiency)

    p = sub.add_parser("histogram", help="rank-position relevant-label histogram")
    p.add_argument("--manifest", required=True,
                   help="file of 'version qrels_path pools_path' lines")
    p.add_argument("--max-rank", type=int, required=True)
    p.add_argument("--versions", help="comma-separated subset of versions")
    p.add_argument("--out")
    p.set_defaults(func=cmd_histogram)

    p = sub.add_parser("serve", help="run the judgment-collection HTTP service")
    p.add_argument("--runs", required=True)
    p.add_argument("--topics-xml", required=True, help="topic file (pseudo-XML fragments)")
    p.add_argument("--depth", type=int, default=15)
    p.add_argument("--assessors", required=True, help="comma-separated assessor ids")
    p.add_argument("--versions",
                   default="RND1,RND2,RND3,RND4,PRI1,PRI2,PRI3,PRI4")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--docs", help="directory of <docid>.html files")
    p.add_argument("--ui", help="directory of static UI files to serve at /")
    p.add_argument("--log", required=True, help="append-only event log path")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
