"""Batch command-line front end.

Commands: ``simulate``, ``rhythms``, ``network``, ``analyze <kind>`` and
``report``. Every command writes CSV tables (plus SVG plots for the
analyses) and a ``manifest.json`` recording the seed, parameter values,
input digests and timing. Re-running a command with identical inputs and
seed reproduces byte-identical tables.

Exit codes: 0 ok, 1 runtime failure (unreadable or missing inputs),
2 usage or config error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from pathlib import Path

import numpy as np
from scipy import stats as scipy_stats

from . import __version__
from .binning import BinnedCurve
from .distances import (
    default_distance_bins,
    distance_similarity_samples,
    decay_threshold_distance,
    reach_profile,
)
from .entrainment import (
    DistributionComparison,
    TriadCondition,
    change_curve,
    intrapersonal_similarity,
    new_edges,
    null_pair_observations,
    pooled_weight_curve,
    similarity_distributions,
    triad_change_summary,
    triad_extract,
    welch_t,
)
from .events import (
    DEFAULT_UTC_OFFSET_HOURS,
    SECONDS_PER_HOUR,
    active_weeks,
    build_usage_series,
    events_by_week,
)
from .network import STRENGTH_THRESHOLD_LOG10W, build_week_network, strong_edge_subgraph
from .rhythm import rhythms_for_week
from .simulate import ConfigError, SimConfig, load_config, run_simulation
from .structure import community_similarity_vs_clustering, detect_communities
from .svg import CurveSeries, render_curves_svg, render_scatter_svg
from .tables import (
    atomic_write_text,
    read_events_csv,
    read_graphs_csv,
    read_rhythms_csv,
    write_events_csv,
    write_graphs_csv,
    write_phases_csv,
    write_rhythms_csv,
    write_table,
)

ANALYZE_KINDS = ("edge-weight", "entrainment", "triads", "communities", "distance")


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(out_dir: Path, command: str, started: float, *,
                    seed=None, parameters=None, inputs=(), outputs=(),
                    config_digest=None, extra=None) -> None:
    manifest = {
        "tool": "socialrhythms",
        "version": __version__,
        "command": command,
        "seed": seed,
        "parameters": parameters or {},
        "config_digest": config_digest,
        "input_digests": {str(p): _sha256(Path(p)) for p in inputs},
        "outputs": sorted(str(o) for o in outputs),
        "duration_s": round(time.monotonic() - started, 6),
    }
    if extra:
        manifest.update(extra)
    atomic_write_text(out_dir / "manifest.json",
                      json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _effective_origin(args) -> float:
    return float(args.origin) - args.utc_offset_h * SECONDS_PER_HOUR


# ---------------------------------------------------------------------------
# simulate


def cmd_simulate(args) -> int:
    started = time.monotonic()
    out = _outdir(args)
    if args.config:
        config = load_config(args.config)
        config_digest = _sha256(Path(args.config))
    else:
        config = SimConfig()
        config_digest = None
    if args.seed is not None:
        config.seed = args.seed
    config.validate()

    result = run_simulation(config)
    write_events_csv(out / "events.csv", result.events)
    write_graphs_csv(out / "truth_graph.csv", result.graphs)
    write_phases_csv(out / "phases.csv", result.phases)
    _write_manifest(
        out, "simulate", started,
        seed=config.seed,
        parameters={"population": config.population, "weeks": config.weeks,
                    "origin": config.origin,
                    "coupling_gain": config.coupling_gain,
                    "coupling_threshold": config.coupling_threshold},
        inputs=[args.config] if args.config else [],
        outputs=["events.csv", "truth_graph.csv", "phases.csv"],
        config_digest=config_digest,
        extra={"n_events": len(result.events)},
    )
    return 0


# ---------------------------------------------------------------------------
# rhythms / network


def _load_weekly_inputs(args):
    parse = read_events_csv(Path(args.events))
    for diag in parse.diagnostics:
        print(f"warning: line {diag.line_no}: {diag.kind}: {diag.message}", file=sys.stderr)
    origin = _effective_origin(args)
    weeks = args.weeks
    if weeks is None:
        touched = active_weeks(parse.events, origin)
        weeks = (touched[-1] + 1) if touched else 0
    return parse, origin, weeks


def cmd_rhythms(args) -> int:
    started = time.monotonic()
    out = _outdir(args)
    parse, origin, weeks = _load_weekly_inputs(args)

    rhythms_by_week = {}
    skipped_rows = []
    seen_users = sorted({u for e in parse.events for u in (e.visitor, e.owner)})
    buckets = events_by_week(parse.events, origin, weeks)
    for week in range(weeks):
        series = build_usage_series(buckets[week], week, origin)
        rhythms, zero_users = rhythms_for_week(series)
        rhythms_by_week[week] = rhythms
        inactive = [u for u in seen_users if u not in rhythms]
        skipped_rows.extend((u, week) for u in sorted(set(inactive) | set(zero_users)))

    write_rhythms_csv(out / "rhythms.csv", rhythms_by_week)
    write_table(out / "skipped.csv", ["user", "week"], skipped_rows)
    _write_manifest(
        out, "rhythms", started,
        parameters={"origin": args.origin, "utc_offset_h": args.utc_offset_h, "weeks": weeks},
        inputs=[args.events],
        outputs=["rhythms.csv", "skipped.csv"],
        extra={"n_events": len(parse.events), "n_parse_warnings": parse.n_bad,
               "n_user_weeks": sum(len(r) for r in rhythms_by_week.values())},
    )
    return 0


def cmd_network(args) -> int:
    started = time.monotonic()
    out = _outdir(args)
    parse, origin, weeks = _load_weekly_inputs(args)
    graphs = {}
    buckets = events_by_week(parse.events, origin, weeks)
    for week in range(weeks):
        g = build_week_network(buckets[week], week, origin)
        if g.n_edges:
            graphs[week] = g
    write_graphs_csv(out / "networks.csv", graphs)
    _write_manifest(
        out, "network", started,
        parameters={"origin": args.origin, "utc_offset_h": args.utc_offset_h, "weeks": weeks},
        inputs=[args.events],
        outputs=["networks.csv"],
        extra={"n_events": len(parse.events), "n_parse_warnings": parse.n_bad},
    )
    return 0


# ---------------------------------------------------------------------------
# analyze


def _curve_rows(curve: BinnedCurve, *prefix):
    rows = []
    for lo, hi, mean, sd, count in zip(curve.edges[:-1], curve.edges[1:],
                                       curve.means, curve.sds, curve.counts):
        if count > 0:
            rows.append([*prefix, float(lo), float(hi), float(mean), float(sd), int(count)])
    return rows


def _analyze_edge_weight(args, graphs, rhythms_by_week, out: Path) -> dict:
    result = pooled_weight_curve(graphs, rhythms_by_week, seed=args.seed)
    write_table(out / "edge_weight_curve.csv",
                ["bin_lo_log10w", "bin_hi_log10w", "mean_sim", "sd_sim", "count"],
                _curve_rows(result.curve))
    write_table(out / "edge_weight_baseline.csv",
                ["mean_sim", "sd_sim", "n"],
                [[result.baseline_mean, result.baseline_sd, result.n_baseline]])
    render_curves_svg(
        out / "edge_weight.svg",
        [CurveSeries.from_binned("edges", result.curve)],
        title="Rhythm similarity vs edge weight",
        xlabel="log10 weekly dwell seconds", ylabel="similarity",
        baseline=result.baseline_mean, baseline_label="random pairs",
    )
    return {"baseline_mean": result.baseline_mean,
            "n_edges": int(result.curve.counts.sum()),
            "outputs": ["edge_weight_curve.csv", "edge_weight_baseline.csv",
                        "edge_weight.svg"]}


def _week_pairs(graphs, rhythms_by_week):
    for week in sorted(graphs):
        if (week + 1 in graphs and week in rhythms_by_week
                and week + 1 in rhythms_by_week):
            yield week, graphs[week], graphs[week + 1], \
                rhythms_by_week[week], rhythms_by_week[week + 1]


def _analyze_entrainment(args, graphs, rhythms_by_week, out: Path) -> dict:
    obs = []
    null_obs = []
    intra_new = []
    intra_all = []
    for week, g_prev, g_curr, r_prev, r_curr in _week_pairs(graphs, rhythms_by_week):
        week_obs = new_edges(g_prev, g_curr, r_prev, r_curr)
        obs.extend(week_obs)
        null_obs.extend(null_pair_observations(g_prev, g_curr, r_prev, r_curr,
                                               seed=args.seed + 1000 * week))
        new_users = sorted({u for o in week_obs for u in o.pair})
        for u in new_users:
            intra_new.append(intrapersonal_similarity(u, r_prev[u], r_curr[u]))
        for u in sorted(set(r_prev) & set(r_curr)):
            intra_all.append(intrapersonal_similarity(u, r_prev[u], r_curr[u]))

    real_curve = change_curve(obs)
    null_curve = change_curve(null_obs)
    rows = _curve_rows(real_curve, "observed") + _curve_rows(null_curve, "random_combination")
    write_table(out / "entrainment_change_curve.csv",
                ["source", "bin_lo_sim_before", "bin_hi_sim_before",
                 "mean_sim_after", "sd_sim_after", "count"], rows)

    dists: DistributionComparison = similarity_distributions(obs, null_obs)
    dist_rows = []
    for name, hist in (("before", dists.before), ("after", dists.after), ("null", dists.null)):
        for lo, hi, count in zip(hist.edges[:-1], hist.edges[1:], hist.counts):
            if count > 0:
                share = count / hist.n if hist.n else 0.0
                dist_rows.append([name, float(lo), float(hi), int(count), float(share)])
    write_table(out / "entrainment_distributions.csv",
                ["distribution", "bin_lo", "bin_hi", "count", "share"], dist_rows)

    summary_rows = [
        ["n_new_pairs", float(len(obs))],
        ["n_null_pairs", float(len(null_obs))],
    ]
    welch_change = None
    if len(obs) >= 2 and len(null_obs) >= 2:
        before = [o.sim_before for o in obs]
        after = [o.sim_after for o in obs]
        wt_ba = welch_t(after, before)
        changes = [o.change for o in obs]
        null_changes = [o.change for o in null_obs]
        welch_change = welch_t(changes, null_changes)
        summary_rows += [
            ["mean_sim_before", float(np.mean(before))],
            ["mean_sim_after", float(np.mean(after))],
            ["welch_after_vs_before_t", wt_ba.t],
            ["welch_after_vs_before_p", wt_ba.p],
            ["mean_change_observed", float(np.mean(changes))],
            ["mean_change_null", float(np.mean(null_changes))],
            ["welch_change_vs_null_t", welch_change.t],
            ["welch_change_vs_null_p", welch_change.p],
        ]
    welch_intra = None
    if len(intra_new) >= 2 and len(intra_all) >= 2:
        welch_intra = welch_t(intra_new, intra_all)
        summary_rows += [
            ["n_new_edge_users", float(len(intra_new))],
            ["n_reference_users", float(len(intra_all))],
            ["intrapersonal_new_mean", float(np.mean(intra_new))],
            ["intrapersonal_reference_mean", float(np.mean(intra_all))],
            ["welch_intrapersonal_t", welch_intra.t],
            ["welch_intrapersonal_p", welch_intra.p],
        ]
    write_table(out / "entrainment_summary.csv", ["metric", "value"], summary_rows)

    render_curves_svg(
        out / "entrainment_change.svg",
        [CurveSeries.from_binned("observed new pairs", real_curve),
         CurveSeries.from_binned("random combination", null_curve)],
        title="Similarity change when pairs connect",
        xlabel="similarity before", ylabel="similarity after",
        diagonal=True,
    )
    return {"n_new_pairs": len(obs),
            "mean_change_observed": float(np.mean([o.change for o in obs])) if obs else None,
            "welch_change_vs_null_p": welch_change.p if welch_change else None,
            "outputs": ["entrainment_change_curve.csv", "entrainment_distributions.csv",
                        "entrainment_summary.csv", "entrainment_change.svg"]}


def _analyze_triads(args, graphs, rhythms_by_week, out: Path) -> dict:
    triads = []
    for week, g_prev, g_curr, r_prev, r_curr in _week_pairs(graphs, rhythms_by_week):
        triads.extend(triad_extract(g_prev, g_curr, r_prev, r_curr,
                                    threshold_log10w=args.threshold_log10w))
    curves = triad_change_summary(triads)

    curve_rows = []
    summary_rows = []
    for condition in TriadCondition:
        group = [t for t in triads if t.bc_condition is condition]
        tc = curves[condition]
        curve_rows += _curve_rows(tc.ac, condition.value, "ac")
        curve_rows += _curve_rows(tc.bc, condition.value, "bc")
        for pair_name, before, after in (
            ("ac", [t.sim_ac_before for t in group], [t.sim_ac_after for t in group]),
            ("bc", [t.sim_bc_before for t in group], [t.sim_bc_after for t in group]),
        ):
            n = len(group)
            mean_change = float(np.mean(np.asarray(after) - np.asarray(before))) if n else float("nan")
            summary_rows.append([condition.value, pair_name, n,
                                 float(np.mean(before)) if n else float("nan"),
                                 float(np.mean(after)) if n else float("nan"),
                                 mean_change])
    write_table(out / "triad_curves.csv",
                ["bc_condition", "pair", "bin_lo_sim_before", "bin_hi_sim_before",
                 "mean_sim_after", "sd_sim_after", "count"], curve_rows)
    write_table(out / "triad_summary.csv",
                ["bc_condition", "pair", "n", "mean_before", "mean_after", "mean_change"],
                summary_rows)

    welch_rows = []
    strong = [t for t in triads if t.bc_condition is TriadCondition.STRONG_EDGE]
    unconnected = [t for t in triads if t.bc_condition is TriadCondition.UNCONNECTED]
    if len(strong) >= 2 and len(unconnected) >= 2:
        for pair_name, getter in (
            ("ac", lambda t: t.sim_ac_after - t.sim_ac_before),
            ("bc", lambda t: t.sim_bc_after - t.sim_bc_before),
        ):
            wt = welch_t([getter(t) for t in strong], [getter(t) for t in unconnected])
            welch_rows.append([pair_name, "strong_vs_unconnected", wt.t, wt.dof, wt.p,
                               wt.mean_difference])
    write_table(out / "triad_welch.csv",
                ["pair", "comparison", "t", "dof", "p", "mean_difference"], welch_rows)

    for pair_name in ("ac", "bc"):
        render_curves_svg(
            out / f"triads_{pair_name}.svg",
            [CurveSeries.from_binned(c.value, getattr(curves[c], pair_name))
             for c in TriadCondition],
            title=f"Triad similarity change, pair {pair_name.upper()}",
            xlabel="similarity before", ylabel="similarity after",
            diagonal=True,
        )
    return {"n_triads": len(triads),
            "outputs": ["triad_curves.csv", "triad_summary.csv", "triad_welch.csv",
                        "triads_ac.svg", "triads_bc.svg"]}


def _analyze_communities(args, graphs, rhythms_by_week, out: Path) -> dict:
    member_rows = []
    stat_rows = []
    pooled = []
    skipped = 0
    for week in sorted(graphs):
        if week not in rhythms_by_week:
            continue
        g = graphs[week]
        partition = detect_communities(g, seed=args.seed + week)
        for user in sorted(partition.membership):
            member_rows.append([week, partition.membership[user], user])
        report = community_similarity_vs_clustering(
            g, partition, rhythms_by_week[week], min_size=args.min_size)
        skipped += report.skipped
        for cs in report.stats:
            stat_rows.append([week, cs.community_id, cs.size, cs.mean_similarity, cs.mean_wcc])
            pooled.append((cs.mean_wcc, cs.mean_similarity))
    write_table(out / "communities.csv", ["week", "community_id", "user"], member_rows)
    write_table(out / "community_stats.csv",
                ["week", "community_id", "size", "mean_similarity", "mean_wcc"], stat_rows)

    rho = p = float("nan")
    if len(pooled) >= 3:
        rho, p = scipy_stats.spearmanr([w for w, _ in pooled], [s for _, s in pooled])
    write_table(out / "community_summary.csv",
                ["n_communities", "n_skipped_small", "spearman_rho", "spearman_p"],
                [[len(pooled), skipped, float(rho), float(p)]])
    render_scatter_svg(
        out / "communities.svg",
        [w for w, _ in pooled], [s for _, s in pooled],
        title="Community cohesion vs member similarity",
        xlabel="mean weighted clustering coefficient", ylabel="mean member similarity",
    )
    return {"n_communities": len(pooled), "spearman_rho": float(rho),
            "outputs": ["communities.csv", "community_stats.csv",
                        "community_summary.csv", "communities.svg"]}


def _analyze_distance(args, graphs, rhythms_by_week, out: Path) -> dict:
    candidate_weeks = [w for w in sorted(graphs) if w in rhythms_by_week]
    if not candidate_weeks:
        raise RuntimeError("no week has both a network and rhythms")
    week = args.week if args.week is not None else candidate_weeks[-1]
    if week not in graphs or week not in rhythms_by_week:
        raise RuntimeError(f"week {week} missing from networks or rhythms")
    g = graphs[week]
    rhythms = rhythms_by_week[week]
    mode = args.mode

    d_orig, s_orig = distance_similarity_samples(
        g, rhythms, mode, source_sample=args.source_sample, seed=args.seed)
    g_strong = strong_edge_subgraph(g, args.threshold_log10w)
    if g_strong.n_edges:
        d_strong, s_strong = distance_similarity_samples(
            g_strong, rhythms, mode, source_sample=args.source_sample, seed=args.seed)
    else:
        d_strong = np.array([])
        s_strong = np.array([])

    combined = np.concatenate([d_orig, d_strong]) if d_strong.size else d_orig
    bins = default_distance_bins(combined, mode)
    curve_orig = BinnedCurve.from_samples(d_orig, s_orig, bins)
    curve_strong = BinnedCurve.from_samples(d_strong, s_strong, bins)

    from .network import random_pairs
    from .rhythm import similarity as rsim
    base = [rsim(rhythms[a], rhythms[b])
            for a, b in random_pairs(g.nodes, max(2000, g.n_nodes), args.seed + 1)]
    baseline_mean = float(np.mean(base))
    baseline_sd = float(np.std(base))

    rows = _curve_rows(curve_orig, "original", mode) + _curve_rows(curve_strong, "strong", mode)
    write_table(out / "distance_curve.csv",
                ["network", "mode", "bin_lo", "bin_hi", "mean_sim", "sd_sim", "count"], rows)

    decay_d = decay_threshold_distance(curve_orig, baseline_mean)
    thresholds = [float(e) for e in bins[1:]]
    if decay_d is not None:
        thresholds.append(float(decay_d))
    fractions = reach_profile(g, thresholds, mode, source_sample=args.source_sample,
                              seed=args.seed, denominator=args.reach_denominator)
    write_table(out / "reach.csv", ["mode", "d", "fraction"],
                [[mode, d, f] for d, f in zip(thresholds, fractions)])
    write_table(out / "distance_summary.csv",
                ["mode", "week", "baseline_mean", "baseline_sd",
                 "decay_threshold_distance", "reach_at_decay_threshold"],
                [[mode, week, baseline_mean, baseline_sd,
                  decay_d if decay_d is not None else float("nan"),
                  fractions[-1] if decay_d is not None else float("nan")]])

    series = [CurveSeries.from_binned("original network", curve_orig)]
    if d_strong.size:
        series.append(CurveSeries.from_binned("strong edges only", curve_strong))
    render_curves_svg(
        out / "distance.svg", series,
        title=f"Similarity vs {mode} distance (week {week})",
        xlabel="distance" if mode == "hops" else "distance (sum of 1/w)",
        ylabel="similarity",
        baseline=baseline_mean, baseline_label="random pairs",
        log_x=(mode == "weighted"),
    )
    return {"week": week, "mode": mode,
            "decay_threshold_distance": decay_d,
            "reach_at_decay_threshold": fractions[-1] if decay_d is not None else None,
            "outputs": ["distance_curve.csv", "reach.csv", "distance_summary.csv",
                        "distance.svg"]}


_ANALYZERS = {
    "edge-weight": _analyze_edge_weight,
    "entrainment": _analyze_entrainment,
    "triads": _analyze_triads,
    "communities": _analyze_communities,
    "distance": _analyze_distance,
}


def cmd_analyze(args) -> int:
    started = time.monotonic()
    out = _outdir(args)
    graphs = read_graphs_csv(Path(args.networks))
    rhythms_by_week = read_rhythms_csv(Path(args.rhythms))
    info = _ANALYZERS[args.kind](args, graphs, rhythms_by_week, out)
    outputs = info.pop("outputs")
    _write_manifest(
        out, f"analyze {args.kind}", started,
        seed=args.seed,
        parameters={"threshold_log10w": args.threshold_log10w,
                    **{k: v for k, v in vars(args).items()
                       if k in ("mode", "week", "min_size", "source_sample",
                                "reach_denominator") and v is not None}},
        inputs=[args.networks, args.rhythms],
        outputs=outputs,
        extra={"summary": info},
    )
    return 0


def cmd_report(args) -> int:
    started = time.monotonic()
    out = _outdir(args)
    rc = cmd_rhythms(argparse.Namespace(
        events=args.events, origin=args.origin, utc_offset_h=args.utc_offset_h,
        weeks=args.weeks, out=str(out)))
    if rc:
        return rc
    rc = cmd_network(argparse.Namespace(
        events=args.events, origin=args.origin, utc_offset_h=args.utc_offset_h,
        weeks=args.weeks, out=str(out)))
    if rc:
        return rc

    graphs = read_graphs_csv(out / "networks.csv")
    rhythms_by_week = read_rhythms_csv(out / "rhythms.csv")
    index = {}
    common = dict(seed=args.seed, threshold_log10w=args.threshold_log10w,
                  min_size=args.min_size, source_sample=args.source_sample,
                  reach_denominator="all", week=None)
    for kind in ANALYZE_KINDS:
        kind_args = argparse.Namespace(kind=kind, mode="weighted", **common)
        info = _ANALYZERS[kind](kind_args, graphs, rhythms_by_week, out)
        index[kind] = info
    atomic_write_text(out / "index.json", json.dumps(index, indent=2, sort_keys=True) + "\n")
    _write_manifest(
        out, "report", started,
        seed=args.seed,
        parameters={"origin": args.origin, "utc_offset_h": args.utc_offset_h,
                    "weeks": args.weeks, "threshold_log10w": args.threshold_log10w},
        inputs=[args.events],
        outputs=["index.json"] + sorted(o for info in index.values() for o in info["outputs"]),
    )
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_common_io(sub, with_weeks=True):
    sub.add_argument("--events", required=True, help="event CSV path")
    sub.add_argument("--origin", type=int, required=True,
                     help="week-0 start, epoch seconds at 00:00 UTC of the chosen date")
    sub.add_argument("--utc-offset-h", dest="utc_offset_h", type=int,
                     default=DEFAULT_UTC_OFFSET_HOURS,
                     help="shift binning so hour 0 is local midnight (default 9)")
    if with_weeks:
        sub.add_argument("--weeks", type=int, default=None,
                         help="number of weeks to process (default: inferred)")
    sub.add_argument("--out", required=True, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="socialrhythms",
        description="Rhythm extraction, entrainment analysis and simulation "
                    "over weekly visit networks.")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("simulate", help="generate a synthetic event log")
    p.add_argument("--config", default=None, help="JSON config (defaults if omitted)")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = subs.add_parser("rhythms", help="extract weekly rhythm vectors")
    _add_common_io(p)
    p.set_defaults(func=cmd_rhythms)

    p = subs.add_parser("network", help="build weekly weighted networks")
    _add_common_io(p)
    p.set_defaults(func=cmd_network)

    p = subs.add_parser("analyze", help="run one analysis kind")
    p.add_argument("kind", choices=ANALYZE_KINDS)
    p.add_argument("--networks", required=True, help="networks.csv from the network command")
    p.add_argument("--rhythms", required=True, help="rhythms.csv from the rhythms command")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threshold-log10w", dest="threshold_log10w", type=float,
                   default=STRENGTH_THRESHOLD_LOG10W)
    p.add_argument("--mode", choices=("weighted", "hops"), default="weighted",
                   help="distance mode (distance kind only)")
    p.add_argument("--week", type=int, default=None,
                   help="week to analyse (distance kind only; default last)")
    p.add_argument("--min-size", dest="min_size", type=int, default=3,
                   help="minimum community size (communities kind only)")
    p.add_argument("--source-sample", dest="source_sample", type=int, default=500)
    p.add_argument("--reach-denominator", dest="reach_denominator",
                   choices=("all", "reachable"), default="all")
    p.set_defaults(func=cmd_analyze)

    p = subs.add_parser("report", help="rhythms + network + every analysis")
    _add_common_io(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threshold-log10w", dest="threshold_log10w", type=float,
                   default=STRENGTH_THRESHOLD_LOG10W)
    p.add_argument("--min-size", dest="min_size", type=int, default=3)
    p.add_argument("--source-sample", dest="source_sample", type=int, default=500)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failures: missing files, bad tables, ...
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
