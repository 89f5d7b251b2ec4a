"""Command-line surface: one subcommand per measure, the advisor, the
network scan, and the ground-truth simulators.

Every numeric result is emitted with its complete 5-field reporting
manifest, or the command fails (exit 3). Identical argv + seed + input files
produce byte-identical JSON, whatever --workers says. Values are stored in
nats (system-level measures in bits); --bits adds a display conversion
without touching the stored value.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import advisor, causal, divergence, entropy, inference, mi, simulate, temporal
from .data import (DiscreteSeries, SampleMatrix, discretize, load_table, standardize)
from .errors import InfometerError, MissingField
from .manifest import build_manifest, canonical_json
from .rng import RngSeed, as_seed, resolve_workers

LN2 = float(np.log(2.0))

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_MISSING_FIELD = 3
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: A003 - argparse API
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="master seed (generated and reported if omitted)")
    p.add_argument("--workers", type=int, default=None,
                   help="parallel workers (INFOMETER_WORKERS as fallback); never affects values")
    p.add_argument("--output", default=None, help="write the JSON/CSV here instead of stdout")
    p.add_argument("--format", choices=("json", "csv-summary"), default="json")
    p.add_argument("--bits", action="store_true", help="add a bits display conversion")


def _add_input(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="CSV (header row) or JSON table")
    p.add_argument("--time-ordered", action="store_true", help="rows are consecutive time steps")


def build_parser() -> _Parser:
    root = _Parser(prog="infometer",
                   description="Information-theoretic measurement with estimator "
                               "identities, surrogate tests, and reporting manifests")
    sub = root.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", parents=[], help="Shannon/differential entropy of one column")
    _add_input(p)
    p.add_argument("--column", required=True)
    p.add_argument("--estimator", choices=("plugin", "miller_madow", "vasicek", "knn"),
                   default="plugin")
    p.add_argument("--bins", type=int, default=None, help="discretize first (plugin/miller_madow)")
    p.add_argument("--binning", choices=("equal_width", "equal_frequency"), default="equal_width")
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--spacing", type=int, default=None, help="Vasicek window m (default sqrt N)")
    p.add_argument("--standardize", action="store_true",
                   help="zero-mean/unit-variance first (changes differential entropy; recorded)")
    p.add_argument("--bootstrap", type=int, default=200, help="CI replicates; 0 skips (manifest will fail)")
    _add_common(p)

    p = sub.add_parser("kl", help="KL divergence, cross-entropy, and JSD between two columns or distributions")
    p.add_argument("--input", default=None)
    p.add_argument("--time-ordered", action="store_true")
    p.add_argument("--p-column", default=None)
    p.add_argument("--q-column", default=None)
    p.add_argument("--p", default=None, help="explicit distribution, comma-separated")
    p.add_argument("--q", default=None)
    p.add_argument("--bins", type=int, default=8)
    p.add_argument("--binning", choices=("equal_width", "equal_frequency"), default="equal_width")
    p.add_argument("--smoothing", choices=("none", "additive", "clip"), default="none")
    p.add_argument("--smoothing-value", type=float, default=1e-6)
    p.add_argument("--bootstrap", type=int, default=200)
    _add_common(p)

    p = sub.add_parser("mi", help="mutual information between two column groups")
    _add_input(p)
    p.add_argument("--x-columns", required=True, help="comma-separated column names")
    p.add_argument("--y-columns", required=True)
    p.add_argument("--estimator", choices=("ksg", "plugin"), default="ksg")
    p.add_argument("--bins", type=int, default=8, help="plugin: bins per marginal")
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--surrogates", type=int, default=200, help="0 skips the test (manifest will fail)")
    p.add_argument("--surrogate-method", choices=("permutation", "time_shift"), default=None)
    p.add_argument("--bootstrap", type=int, default=200)
    p.add_argument("--no-standardize", action="store_true")
    _add_common(p)

    p = sub.add_parser("cmi", help="conditional mutual information I(x; y | z)")
    _add_input(p)
    p.add_argument("--x-columns", required=True)
    p.add_argument("--y-columns", required=True)
    p.add_argument("--z-columns", required=True)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--surrogates", type=int, default=200)
    p.add_argument("--surrogate-method", choices=("permutation", "time_shift"), default=None)
    p.add_argument("--bootstrap", type=int, default=200)
    p.add_argument("--no-standardize", action="store_true")
    _add_common(p)

    for name, hlp in (("te", "transfer entropy from a source column to a target column"),
                      ("ais", "active information storage of one column")):
        p = sub.add_parser(name, help=hlp)
        _add_input(p)
        if name == "te":
            p.add_argument("--source-column", required=True)
            p.add_argument("--target-column", required=True)
        else:
            p.add_argument("--column", required=True)
        p.add_argument("--embedding", default="1,1,1", help="l,k,tau")
        p.add_argument("--estimator", choices=("ksg", "plugin"), default="ksg")
        p.add_argument("--bins", type=int, default=None, help="discretize first (plugin)")
        p.add_argument("--binning", choices=("equal_width", "equal_frequency"),
                       default="equal_frequency")
        p.add_argument("--k", type=int, default=4)
        p.add_argument("--surrogates", type=int, default=200)
        p.add_argument("--bootstrap", type=int, default=200)
        p.add_argument("--no-standardize", action="store_true")
        _add_common(p)

    p = sub.add_parser("predinfo", help="predictive information over a window")
    _add_input(p)
    p.add_argument("--column", required=True)
    p.add_argument("--window", type=int, required=True)
    p.add_argument("--estimator", choices=("ksg", "plugin"), default="ksg")
    p.add_argument("--bins", type=int, default=None)
    p.add_argument("--binning", choices=("equal_width", "equal_frequency"),
                   default="equal_frequency")
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--surrogates", type=int, default=200)
    p.add_argument("--bootstrap", type=int, default=200)
    p.add_argument("--no-standardize", action="store_true")
    _add_common(p)

    p = sub.add_parser("ei", help="effective information of a transition matrix (bits)")
    p.add_argument("--tpm", required=True, help="TPM JSON file")
    _add_common(p)

    p = sub.add_parser("phi", help="integration: minimum whole-vs-cut divergence (bits)")
    p.add_argument("--tpm", required=True)
    _add_common(p)

    p = sub.add_parser("autonomy", help="observational and/or interventional autonomy")
    p.add_argument("--input", default=None, help="CSV of discrete node series (observational)")
    p.add_argument("--time-ordered", action="store_true")
    p.add_argument("--v-columns", default=None, help="system columns, comma-separated")
    p.add_argument("--e-columns", default=None, help="environment columns")
    p.add_argument("--trajectory-column", default=None,
                   help="column labeling independent runs; windows never straddle runs")
    p.add_argument("--m", type=int, default=1, help="environment history length")
    p.add_argument("--tpm", default=None, help="TPM JSON (interventional variant)")
    p.add_argument("--v-nodes", default=None, help="system node indices, comma-separated")
    p.add_argument("--e-nodes", default=None)
    _add_common(p)

    p = sub.add_parser("emergence", help="effective information across a coarse-graining")
    p.add_argument("--tpm", required=True)
    p.add_argument("--grain", default=None,
                   help="macro label per micro state, comma-separated; defaults to the "
                        "TPM file's \"grain\" entry")
    _add_common(p)

    p = sub.add_parser("advise", help="measure selection from objective and data regime")
    p.add_argument("--objective", required=True, choices=advisor.OBJECTIVES)
    p.add_argument("--data-kind", choices=advisor.DATA_KINDS, default="continuous")
    p.add_argument("--continuous", dest="data_kind", action="store_const", const="continuous")
    p.add_argument("--discrete", dest="data_kind", action="store_const", const="discrete")
    p.add_argument("--mixed", dest="data_kind", action="store_const", const="mixed")
    p.add_argument("--dimension", type=int, default=None)
    p.add_argument("--streams", type=int, default=None, help="alias for --dimension")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--tpm-available", action="store_true", help="full transition model under intervention")
    p.add_argument("--time-ordered", action="store_true")
    _add_common(p)

    p = sub.add_parser("scan", help="all-pairs directed transfer entropy with corrected decisions")
    _add_input(p)
    p.add_argument("--columns", default=None, help="stream columns (default: all)")
    p.add_argument("--embedding", default="1,1,1")
    p.add_argument("--estimator", choices=("ksg", "plugin"), default="ksg")
    p.add_argument("--bins", type=int, default=None)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--surrogates", type=int, default=200)
    p.add_argument("--correction", choices=("bonferroni", "bh_fdr"), default="bonferroni")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--pairwise", action="store_true",
                   help="skip conditioning on the other streams' pasts")
    p.add_argument("--no-standardize", action="store_true")
    _add_common(p)

    p = sub.add_parser("simulate", help="seeded ground-truth generators")
    p.add_argument("--system", required=True,
                   choices=("white_noise", "ar1", "coupled_ar", "planted_network", "chain",
                            "alternating", "uniform_discrete", "hidden_phase", "self_copy",
                            "emergence", "copy_swap", "disconnected", "identity"))
    p.add_argument("--length", type=int, default=1000)
    p.add_argument("--streams", type=int, default=5)
    p.add_argument("--coupling", type=float, default=0.5)
    p.add_argument("--ar-coef", type=float, default=0.9)
    p.add_argument("--delay", type=int, default=1)
    p.add_argument("--edge", default="0,1")
    p.add_argument("--alphabet", type=int, default=4)
    p.add_argument("--nodes", type=int, default=3, help="identity system node count")
    _add_common(p)

    return root


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _split_cols(spec: str) -> list[str]:
    return [c.strip() for c in spec.split(",") if c.strip()]


def _columns_block(table: SampleMatrix, spec: str, std: bool) -> tuple[np.ndarray, list[dict]]:
    cols = _split_cols(spec)
    block = np.column_stack([table.column(c) for c in cols])
    steps: list[dict] = []
    if std:
        sm, rec = standardize(SampleMatrix(block))
        rec["columns"] = cols
        block = sm.data
        steps.append(rec)
    return block, steps


def _discrete_column(table: SampleMatrix, name: str, bins: int | None, rule: str) -> DiscreteSeries:
    vals = table.column(name)
    ints = vals.astype(np.int64)
    if bins is None and np.all(vals == ints) and ints.min() >= 0:
        return DiscreteSeries(ints, int(ints.max()) + 1)
    return discretize(vals, bins or 8, rule)


def _parse_embedding(text: str) -> temporal.EmbeddingSpec:
    parts = [int(v) for v in text.split(",")]
    if len(parts) != 3:
        raise InfometerError("--embedding expects l,k,tau")
    return temporal.EmbeddingSpec(parts[0], parts[1], parts[2],
                                  is_default=(parts == [1, 1, 1]))


def _emit(payload: dict, args) -> None:
    payload = json.loads(canonical_json(_jsonable(payload)))
    if args.format == "json":
        text = canonical_json(payload) + "\n"
    else:
        text = _csv_summary(payload)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _jsonable(obj):
    from .manifest import _plain

    return _plain(obj)


def _csv_summary(payload: dict) -> str:
    import csv as _csv
    import io

    buf = io.StringIO()
    writer = _csv.writer(buf)
    rows = payload.get("summary_rows")
    if rows:
        writer.writerow(rows[0].keys())
        for row in rows:
            writer.writerow(row.values())
    else:
        result = payload.get("result", {})
        writer.writerow(["command", "value", "unit", "p_value", "ci_low", "ci_high", "seed"])
        sig = result.get("significance") or {}
        ci = result.get("ci") or {}
        writer.writerow([
            payload.get("command"), result.get("value"), result.get("unit"),
            sig.get("p_value"), ci.get("low"), ci.get("high"),
            payload.get("seed", {}).get("master_seed"),
        ])
    writer.writerow([])
    writer.writerow(["manifest_json", canonical_json(payload.get("manifest"))])
    return buf.getvalue()


def _payload(command: str, seed: RngSeed, result: dict, manifest, extra: dict | None = None,
             bits: bool = False) -> dict:
    out = {
        "command": command,
        "seed": seed.to_dict(),
        "result": result,
        "manifest": manifest.to_dict(),
    }
    if bits and result.get("unit") == "nats" and isinstance(result.get("value"), (int, float)):
        out["display"] = {"unit": "bits", "value": result["value"] / LN2}
    if extra:
        out.update(extra)
    return out


def _ci_or_none(stat, b: int, seed: RngSeed, workers: int):
    if b <= 0:
        return None
    return inference.bootstrap_ci(stat, replicates=b, seed=RngSeed(seed.substream(10_001).integers(0, 2**63)),
                                  workers=workers)


def _sig_seed(seed: RngSeed) -> RngSeed:
    return RngSeed(seed.substream(10_000).integers(0, 2**63))


# ---------------------------------------------------------------------------
# command handlers
# ---------------------------------------------------------------------------

def _cmd_entropy(args) -> int:
    table = load_table(args.input, args.time_ordered)
    seed = as_seed(args.seed)
    workers = resolve_workers(args.workers)
    steps: list[dict] = []

    if args.estimator in ("plugin", "miller_madow"):
        series = _discrete_column(table, args.column, args.bins, args.binning)
        est = (entropy.entropy_plugin(series) if args.estimator == "plugin"
               else entropy.entropy_miller_madow(series))
        ci = _ci_or_none(inference.PluginEntropyStat(series), args.bootstrap, seed, workers)
    else:
        vals = table.column(args.column)
        if args.standardize:
            sm, rec = standardize(SampleMatrix(vals))
            vals = sm.data[:, 0]
            steps.append(rec)
        if args.estimator == "vasicek":
            est = entropy.entropy_vasicek(vals, m=args.spacing)
            stat = inference.FunctionStat(
                lambda rows: entropy.entropy_vasicek(rows, m=args.spacing).value,
                vals, resampling="subsample")
        else:
            est = entropy.entropy_knn(vals.reshape(-1, 1), k=args.k)
            stat = inference.FunctionStat(
                lambda rows: entropy.entropy_knn(np.asarray(rows).reshape(-1, 1), k=args.k).value,
                vals, resampling="subsample")
        ci = _ci_or_none(stat, args.bootstrap, seed, workers)

    manifest = build_manifest(
        "entropy", est.estimator_id, est.hyperparams,
        ci.to_dict() if ci else None, None,
        preprocessing_steps=steps + [dict(p) for p in est.preprocessing],
        notes=est.notes,
    )
    result = est.to_dict()
    result["ci"] = ci.to_dict() if ci else None
    _emit(_payload("entropy", seed, result, manifest, bits=args.bits), args)
    return EXIT_OK


def _cmd_kl(args) -> int:
    from .data import ProbTable

    seed = as_seed(args.seed)
    workers = resolve_workers(args.workers)
    smoothing = (divergence.NO_SMOOTHING if args.smoothing == "none"
                 else divergence.Smoothing(args.smoothing, args.smoothing_value))
    steps: list[dict] = []

    if args.p and args.q:
        p = ProbTable(np.array([float(v) for v in args.p.split(",")]))
        q = ProbTable(np.array([float(v) for v in args.q.split(",")]))
        uncertainty = {"kind": "exact", "reason": "distributions supplied directly"}
        ci = None
    elif args.input and args.p_column and args.q_column:
        table = load_table(args.input, args.time_ordered)
        a = table.column(args.p_column)
        b = table.column(args.q_column)
        pooled = np.concatenate([a, b])
        edges = np.linspace(pooled.min(), pooled.max(), args.bins + 1)
        steps.append({"step": "discretize", "rule": "shared equal_width", "bins": args.bins,
                      "edges": [float(e) for e in edges]})

        def _tables(av, bv):
            sa = np.digitize(av, edges[1:-1])
            sb = np.digitize(bv, edges[1:-1])
            pa = np.bincount(sa, minlength=args.bins) / len(sa)
            pb = np.bincount(sb, minlength=args.bins) / len(sb)
            return ProbTable(pa), ProbTable(pb)

        p, q = _tables(a, b)
        stat = inference.FunctionStat(
            lambda rows: divergence.kl_discrete(*_tables(rows[:, 0], rows[:, 1]),
                                                smoothing=divergence.Smoothing("additive", 1e-9)).value,
            np.column_stack([a, b]), resampling="iid")
        ci = _ci_or_none(stat, args.bootstrap, seed, workers)
        uncertainty = ci.to_dict() if ci else None
    else:
        raise InfometerError("provide either --p/--q or --input with --p-column/--q-column")

    kl = divergence.kl_discrete(p, q, smoothing)
    ce = divergence.cross_entropy(p, q, smoothing)
    jsd = divergence.jensen_shannon(p, q)
    manifest = build_manifest("kl_ce", "plugin", {"smoothing": smoothing.to_dict(),
                                                  "alphabet": p.k},
                              uncertainty, None, preprocessing_steps=steps)
    result = {"value": kl.value, "direction": kl.direction, "cross_entropy": ce,
              "jensen_shannon": jsd, "smoothing": smoothing.to_dict(), "unit": "nats",
              "ci": uncertainty if ci else None}
    _emit(_payload("kl", seed, result, manifest, bits=args.bits), args)
    return EXIT_OK


def _mi_like(args, conditional: bool) -> int:
    table = load_table(args.input, args.time_ordered)
    seed = as_seed(args.seed)
    workers = resolve_workers(args.workers)
    std = not args.no_standardize
    steps: list[dict] = []

    if not conditional and args.estimator == "plugin":
        xs = _discrete_column(table, _split_cols(args.x_columns)[0], args.bins, "equal_width")
        ys = _discrete_column(table, _split_cols(args.y_columns)[0], args.bins, "equal_width")
        from .data import joint_from_series

        est = mi.mi_plugin(joint_from_series(xs, ys))
        sym_pair = np.column_stack([xs.symbols, ys.symbols])

        def _plug(rows):
            a = DiscreteSeries(rows[:, 0], xs.alphabet_size)
            b = DiscreteSeries(rows[:, 1], ys.alphabet_size)
            return mi.mi_plugin(joint_from_series(a, b)).value

        ci = _ci_or_none(inference.FunctionStat(_plug, sym_pair, "iid"),
                         args.bootstrap, seed, workers)
        sig = None
        if args.surrogates > 0:
            rngseed = _sig_seed(seed)

            class _PermStat:
                n = xs.n
                min_shift = 1

                def observed(self):
                    return est.value

                def value_for_perm(self, perm):
                    return _plug(np.column_stack([xs.symbols, ys.symbols[perm]]))

            sig = inference.surrogate_test(_PermStat(), "permutation", args.surrogates,
                                           seed=rngseed, workers=workers)
        for s in (xs.record, ys.record):
            if s:
                steps.append(dict(s))
    else:
        x, st1 = _columns_block(table, args.x_columns, std)
        y, st2 = _columns_block(table, args.y_columns, std)
        steps += st1 + st2
        if conditional:
            z, st3 = _columns_block(table, args.z_columns, std)
            steps += st3
            est = mi.cmi_ksg(x, y, z, k=args.k)
            stat_obj = temporal.CmiShiftStatistic(x, y, z, args.k, 1)
        else:
            est = mi.mi_ksg(x, y, k=args.k)
            stat_obj = temporal.MiPermStatistic(x, y, args.k)
        method = args.surrogate_method or ("time_shift" if args.time_ordered else "permutation")
        sig = None
        if args.surrogates > 0:
            if method == "permutation" and not hasattr(stat_obj, "value_for_perm"):
                method = "time_shift"
            sig = inference.surrogate_test(stat_obj, method, args.surrogates,
                                           seed=_sig_seed(seed), workers=workers)
        if conditional:
            ci_stat = inference.FunctionStat(
                lambda rows: mi.cmi_ksg(rows[:, :x.shape[1]],
                                        rows[:, x.shape[1]:x.shape[1] + y.shape[1]],
                                        rows[:, x.shape[1] + y.shape[1]:], k=args.k).value,
                np.column_stack([x, y, z]), resampling="subsample")
        else:
            ci_stat = inference.MiKsgStat(x, y, args.k)
        ci = _ci_or_none(ci_stat, args.bootstrap, seed, workers)

    measure = "mutual_information"
    manifest = build_manifest(measure, est.estimator_id, est.hyperparams,
                              ci.to_dict() if ci else None,
                              sig.to_dict() if sig else None,
                              preprocessing_steps=steps + [dict(p) for p in est.preprocessing],
                              notes=est.notes)
    result = est.to_dict()
    result["ci"] = ci.to_dict() if ci else None
    result["significance"] = sig.to_dict() if sig else None
    _emit(_payload("cmi" if conditional else "mi", seed, result, manifest, bits=args.bits), args)
    return EXIT_OK


def _series_for_temporal(args, table, name):
    if args.estimator == "plugin":
        return _discrete_column(table, name, args.bins, args.binning)
    vals = table.column(name)
    if not args.no_standardize:
        sm, rec = standardize(SampleMatrix(vals))
        return sm.data[:, 0], rec
    return vals, None


def _cmd_te(args) -> int:
    table = load_table(args.input, args.time_ordered)
    seed = as_seed(args.seed)
    workers = resolve_workers(args.workers)
    spec = _parse_embedding(args.embedding)
    steps = []
    if args.estimator == "plugin":
        src = _discrete_column(table, args.source_column, args.bins, args.binning)
        tgt = _discrete_column(table, args.target_column, args.bins, args.binning)
        for s in (src.record, tgt.record):
            if s:
                steps.append(dict(s))
    else:
        src, rec1 = _series_for_temporal(args, table, args.source_column)
        tgt, rec2 = _series_for_temporal(args, table, args.target_column)
        steps += [dict(r) for r in (rec1, rec2) if r]
    res = temporal.transfer_entropy(src, tgt, spec, args.estimator, args.k)
    sig = None
    if args.surrogates > 0:
        stat = temporal.te_shift_statistic(src, tgt, spec, args.estimator, args.k)
        sig = inference.surrogate_test(stat, "time_shift", args.surrogates,
                                       seed=_sig_seed(seed), alpha=None, workers=workers)
        res = res.with_significance(sig)
    ci = None
    if args.bootstrap > 0:
        ci = inference.bootstrap_ci(
            inference.TeStat(src, tgt, spec, args.estimator, args.k),
            replicates=args.bootstrap,
            seed=RngSeed(seed.substream(10_001).integers(0, 2**63)), workers=workers)
        res = res.with_ci(ci)
    manifest = build_manifest("transfer_entropy", res.estimator_id, res.hyperparams,
                              ci.to_dict() if ci else None,
                              sig.to_dict() if sig else None,
                              preprocessing_steps=steps + [dict(p) for p in res.preprocessing],
                              stationarity=res.stationarity, notes=res.notes)
    _emit(_payload("te", seed, res.to_dict(), manifest, bits=args.bits), args)
    return EXIT_OK


def _cmd_ais(args) -> int:
    table = load_table(args.input, args.time_ordered)
    seed = as_seed(args.seed)
    workers = resolve_workers(args.workers)
    spec = _parse_embedding(args.embedding)
    steps = []
    if args.estimator == "plugin":
        series = _discrete_column(table, args.column, args.bins, args.binning)
        if series.record:
            steps.append(dict(series.record))
    else:
        series, rec = _series_for_temporal(args, table, args.column)
        if rec:
            steps.append(dict(rec))
    res = temporal.active_information_storage(series, spec, args.estimator, args.k)
    sig = None
    if args.surrogates > 0:
        emb = temporal.embed(series, spec, None)
        fut, tgt, _ = temporal.split_blocks(emb)
        if args.estimator == "plugin":
            stat = temporal.TePluginShiftStatistic(fut, tgt, np.zeros((len(fut), 1)),
                                                   spec.max_lag(False))
        else:
            stat = temporal.CmiShiftStatistic(fut, tgt, np.zeros((len(fut), 1)),
                                              args.k, spec.max_lag(False))
        sig = inference.surrogate_test(stat, "time_shift", args.surrogates,
                                       seed=_sig_seed(seed), workers=workers)
        res = res.with_significance(sig)
    ci = None
    if args.bootstrap > 0:
        emb = temporal.embed(series, spec, None)
        fut, tgt, _ = temporal.split_blocks(emb)
        if args.estimator == "plugin":
            stat_ci = inference.FunctionStat(
                lambda rows: temporal._plugin_mi_blocks(rows[:, :1], rows[:, 1:]),
                np.column_stack([fut, tgt]), resampling="moving_block")
        else:
            stat_ci = inference.FunctionStat(
                lambda rows: mi.mi_ksg(rows[:, 1:], rows[:, :1], k=args.k).value,
                np.column_stack([fut, tgt]), resampling="window_subsample")
        ci = inference.bootstrap_ci(stat_ci, replicates=args.bootstrap,
                                    seed=RngSeed(seed.substream(10_001).integers(0, 2**63)),
                                    workers=workers)
        res = res.with_ci(ci)
    manifest = build_manifest("active_information_storage", res.estimator_id, res.hyperparams,
                              ci.to_dict() if ci else None, sig.to_dict() if sig else None,
                              preprocessing_steps=steps + [dict(p) for p in res.preprocessing],
                              stationarity=res.stationarity, notes=res.notes)
    _emit(_payload("ais", seed, res.to_dict(), manifest, bits=args.bits), args)
    return EXIT_OK


def _cmd_predinfo(args) -> int:
    table = load_table(args.input, args.time_ordered)
    seed = as_seed(args.seed)
    workers = resolve_workers(args.workers)
    steps = []
    if args.estimator == "plugin":
        series = _discrete_column(table, args.column, args.bins, args.binning)
        if series.record:
            steps.append(dict(series.record))
        series_vals = series
    else:
        series_vals, rec = _series_for_temporal(args, table, args.column)
        if rec:
            steps.append(dict(rec))
    est = temporal.predictive_information(series_vals, args.window, args.estimator, args.k)
    t = args.window
    x = series_vals.symbols.astype(float) if isinstance(series_vals, DiscreteSeries) else series_vals
    anchors = np.arange(t - 1, len(x) - t)
    past = np.column_stack([x[anchors - i] for i in range(t)])
    future = np.column_stack([x[anchors + 1 + i] for i in range(t)])
    sig = None
    if args.surrogates > 0:
        if args.estimator == "plugin":
            stat = temporal.TePluginShiftStatistic(future, past, np.zeros((len(future), 1)), t)
        else:
            stat = temporal.CmiShiftStatistic(future, past, np.zeros((len(future), 1)),
                                              args.k, t)
        sig = inference.surrogate_test(stat, "time_shift", args.surrogates,
                                       seed=_sig_seed(seed), workers=workers)
    ci = None
    if args.bootstrap > 0:
        if args.estimator == "plugin":
            stat_ci = inference.FunctionStat(
                lambda rows: temporal._plugin_mi_blocks(rows[:, :t], rows[:, t:]),
                np.column_stack([past, future]), resampling="moving_block")
        else:
            stat_ci = inference.FunctionStat(
                lambda rows: mi.mi_ksg(rows[:, :t], rows[:, t:], k=args.k).value,
                np.column_stack([past, future]), resampling="window_subsample")
        ci = inference.bootstrap_ci(stat_ci, replicates=args.bootstrap,
                                    seed=RngSeed(seed.substream(10_001).integers(0, 2**63)),
                                    workers=workers)
    manifest = build_manifest("predictive_information", est.estimator_id, est.hyperparams,
                              ci.to_dict() if ci else None, sig.to_dict() if sig else None,
                              preprocessing_steps=steps + [dict(p) for p in est.preprocessing],
                              notes=est.notes)
    result = est.to_dict()
    result["ci"] = ci.to_dict() if ci else None
    result["significance"] = sig.to_dict() if sig else None
    _emit(_payload("predinfo", seed, result, manifest, bits=args.bits), args)
    return EXIT_OK


def _load_tpm_arg(path: str):
    tpm, record = causal.load_tpm(path)
    return tpm, ([record] if record else [])


def _cmd_ei(args) -> int:
    seed = as_seed(args.seed)
    tpm, steps = _load_tpm_arg(args.tpm)
    value = causal.effective_information(tpm)
    manifest = build_manifest("effective_information", "uniform-intervention-ei",
                              {"n_nodes": tpm.n, "intervention": "uniform"},
                              None, None, preprocessing_steps=steps, unit="bits")
    result = {"value": value, "unit": "bits", "n_nodes": tpm.n}
    _emit(_payload("ei", seed, result, manifest), args)
    return EXIT_OK


def _cmd_phi(args) -> int:
    seed = as_seed(args.seed)
    workers = resolve_workers(args.workers)
    tpm, steps = _load_tpm_arg(args.tpm)
    res = causal.phi(tpm, workers=workers)
    manifest = build_manifest("phi", res.variant,
                              {"n_nodes": tpm.n, "cuts_searched": len(res.per_cut)},
                              None, None, preprocessing_steps=steps, unit="bits")
    result = {"value": res.value, "unit": "bits", "mip": res.mip.to_dict(),
              "variant": res.variant}
    _emit(_payload("phi", seed, result, manifest), args)
    return EXIT_OK


def _cmd_autonomy(args) -> int:
    seed = as_seed(args.seed)
    result: dict = {"unit": "bits"}
    steps: list[dict] = []
    hyper: dict = {"m": args.m}
    estimator_id = None

    if args.input:
        if not (args.v_columns and args.e_columns):
            raise InfometerError("observational autonomy needs --v-columns and --e-columns")
        table = load_table(args.input, time_ordered=True)
        alphabet = {nm: int(table.column(nm).max()) + 1
                    for nm in _split_cols(args.v_columns) + _split_cols(args.e_columns)}

        def _cols_to_series(names, mask):
            out = []
            for nm in _split_cols(names):
                vals = table.column(nm)[mask].astype(np.int64)
                out.append(DiscreteSeries(vals, alphabet[nm]))
            return tuple(out)

        if args.trajectory_column:
            labels = table.column(args.trajectory_column).astype(np.int64)
            v_traj, e_traj = [], []
            for lab in np.unique(labels):
                mask = labels == lab
                v_traj.append(_cols_to_series(args.v_columns, mask))
                e_traj.append(_cols_to_series(args.e_columns, mask))
        else:
            mask = np.ones(table.n, dtype=bool)
            v_traj = [_cols_to_series(args.v_columns, mask)]
            e_traj = [_cols_to_series(args.e_columns, mask)]
        obs = causal.autonomy_observational(v_traj, e_traj, m=args.m)
        result["observational"] = obs
        result["value"] = obs
        estimator_id = "plugin-conditional-entropy"
        hyper["v_columns"] = _split_cols(args.v_columns)
        hyper["e_columns"] = _split_cols(args.e_columns)

    if args.tpm:
        if not (args.v_nodes and args.e_nodes):
            raise InfometerError("interventional autonomy needs --v-nodes and --e-nodes")
        tpm, s = _load_tpm_arg(args.tpm)
        steps += s
        split = causal.SystemSplit(
            tuple(int(v) for v in _split_cols(args.v_nodes)),
            tuple(int(v) for v in _split_cols(args.e_nodes)), m=1)
        cau = causal.autonomy_causal(tpm, split)
        result["causal"] = cau
        result["causal_normalized"] = causal.autonomy_causal_normalized(tpm, split)
        result.setdefault("value", cau)
        estimator_id = (estimator_id + " + uniform-intervention-ei") if estimator_id \
            else "uniform-intervention-ei"
        hyper["v_nodes"] = list(split.v_nodes)
        hyper["e_nodes"] = list(split.e_nodes)

    if estimator_id is None:
        raise InfometerError("provide --input (observational) and/or --tpm (interventional)")
    if "observational" in result and "causal" in result:
        result["discordance"] = result["observational"] - result["causal"]

    measure = "autonomy_causal" if args.tpm and not args.input else "autonomy_observational"
    uncertainty = None if measure == "autonomy_causal" else {
        "kind": "exact", "reason": "plugin conditional entropies of the full pooled counts"}
    manifest = build_manifest(measure, estimator_id, hyper, uncertainty, None,
                              preprocessing_steps=steps, unit="bits",
                              notes=("boundary and history length are part of the result "
                                     "identity; observational and interventional variants "
                                     "measure different things",))
    _emit(_payload("autonomy", seed, result, manifest), args)
    return EXIT_OK


def _cmd_emergence(args) -> int:
    seed = as_seed(args.seed)
    tpm, steps = _load_tpm_arg(args.tpm)
    if args.grain:
        grain = causal.CoarseGraining(tuple(int(v) for v in _split_cols(args.grain)))
    else:
        with open(args.tpm, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
        if "grain" not in obj:
            raise InfometerError("no --grain given and the TPM file has no \"grain\" entry")
        grain = causal.CoarseGraining(tuple(int(v) for v in obj["grain"]))
    res = causal.causal_emergence(tpm, grain)
    manifest = build_manifest("causal_emergence", "uniform-intervention-ei",
                              {"n_nodes": tpm.n, "grain": list(grain.groups)},
                              None, None, preprocessing_steps=steps, unit="bits")
    _emit(_payload("emergence", seed, res.to_dict(), manifest), args)
    return EXIT_OK


def _cmd_advise(args) -> int:
    seed = as_seed(args.seed)
    dim = args.dimension if args.dimension is not None else (args.streams or 1)
    query = advisor.Query(args.objective, args.data_kind, dim, args.samples,
                          args.time_ordered, args.tpm_available)
    rec = advisor.recommend(query)
    manifest = build_manifest("advice", "decision-table-v1",
                              {"query": {"objective": query.objective,
                                         "data_kind": query.data_kind,
                                         "dimension": query.dimension,
                                         "n_samples": query.n_samples,
                                         "time_ordered": query.time_ordered,
                                         "interventional_access": query.interventional_access}},
                              {"kind": "not-applicable", "reason": "advice, not an estimate"},
                              None, unit="n/a")
    _emit(_payload("advise", seed, rec.to_dict(), manifest), args)
    return EXIT_OK


def _cmd_scan(args) -> int:
    table = load_table(args.input, True)
    seed = as_seed(args.seed)
    workers = resolve_workers(args.workers)
    names = _split_cols(args.columns) if args.columns else list(table.column_names or [])
    steps: list[dict] = []
    if args.estimator == "plugin":
        streams = [_discrete_column(table, nm, args.bins, "equal_frequency") for nm in names]
    else:
        streams = []
        for nm in names:
            col = table.column(nm)
            if not args.no_standardize:
                sm, rec = standardize(SampleMatrix(col))
                rec["column"] = nm
                steps.append(rec)
                col = sm.data[:, 0]
            streams.append(col)
    spec = _parse_embedding(args.embedding)
    res = inference.network_scan(streams, spec, args.estimator, args.k, args.surrogates,
                                 args.correction, args.alpha, seed,
                                 condition_on_others=not args.pairwise, workers=workers)
    manifest = build_manifest(
        "transfer_entropy", args.estimator,
        {"streams": names, "embedding": spec.to_dict(), "k": args.k,
         "surrogates": args.surrogates, "correction": args.correction, "alpha": args.alpha,
         "conditioning": res.conditioning},
        {"kind": "not-applicable",
         "reason": "scan reports per-pair surrogate tests and corrected decisions; "
                   "run the te command on a pair for an interval"},
        {"kind": "per-pair", "p_raw": [float(v) for v in res.correction.p_raw],
         "p_adjusted": [float(v) for v in res.correction.p_adjusted],
         "method": res.correction.method, "alpha": res.correction.alpha},
        preprocessing_steps=steps,
    )
    rows = []
    for (i, j), r in res.results.items():
        rows.append({
            "source": names[i], "target": names[j], "te": r.value,
            "effect_size": r.effect_size,
            "p_value": r.significance.p_value,
            "p_adjusted": float(res.correction.p_adjusted[res.pairs.index((i, j))]),
            "rejected": bool(res.correction.rejected[res.pairs.index((i, j))]),
        })
    payload = _payload("scan", seed, res.to_dict(), manifest,
                       extra={"summary_rows": rows, "stream_names": names})
    _emit(payload, args)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    seed = as_seed(args.seed)
    sysname = args.system

    def _write_csv(names, matrix):
        lines = [",".join(names)]
        for row in np.atleast_2d(matrix):
            lines.append(",".join(repr(float(v)) for v in row))
        text = "\n".join(lines) + "\n"
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)

    def _write_json(obj):
        text = canonical_json(_jsonable(obj)) + "\n"
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)

    if sysname == "white_noise":
        data = simulate.white_noise(args.length, args.streams, seed)
        _write_csv([f"s{i}" for i in range(args.streams)], data)
    elif sysname == "ar1":
        _write_csv(["x"], simulate.ar1(args.length, args.ar_coef, seed).reshape(-1, 1))
    elif sysname == "coupled_ar":
        pair = simulate.coupled_ar(args.length, args.coupling, args.delay, seed)
        _write_csv(["source", "target"], np.column_stack([pair["source"], pair["target"]]))
    elif sysname == "planted_network":
        edge = tuple(int(v) for v in _split_cols(args.edge))
        data = simulate.planted_network(args.length, args.streams, edge, args.coupling, seed)
        _write_csv([f"s{i}" for i in range(args.streams)], data)
    elif sysname == "chain":
        _write_csv(["a", "b", "c"], simulate.chain(args.length, args.coupling, seed))
    elif sysname == "alternating":
        _write_csv(["x"], simulate.alternating_binary(args.length).symbols.reshape(-1, 1))
    elif sysname == "uniform_discrete":
        series = simulate.uniform_discrete(args.length, args.alphabet, seed)
        _write_csv(["x"], series.symbols.reshape(-1, 1))
    elif sysname == "hidden_phase":
        tpm, split = simulate.hidden_phase_system()
        traj = simulate.hidden_phase_trajectory(args.length, seed)
        if args.output and args.output.endswith(".json"):
            _write_json({"n": tpm.n, "tpm": tpm.matrix.tolist(),
                         "v_nodes": list(split.v_nodes), "e_nodes": list(split.e_nodes)})
        else:
            _write_csv(["v", "e1", "e2"],
                       np.column_stack([traj["v"].symbols, traj["e1"].symbols,
                                        traj["e2"].symbols]))
    elif sysname == "self_copy":
        tpm, split = simulate.self_copy_system()
        if args.output and args.output.endswith(".json"):
            _write_json({"n": tpm.n, "tpm": tpm.matrix.tolist(),
                         "v_nodes": list(split.v_nodes), "e_nodes": list(split.e_nodes)})
        else:
            v_traj, e_traj = simulate.self_copy_trajectories(args.length)
            rows = []
            for lab, (vt, et) in enumerate(zip(v_traj, e_traj)):
                block = np.column_stack([np.full(vt[0].n, lab), vt[0].symbols, et[0].symbols])
                rows.append(block)
            _write_csv(["trajectory", "v", "e"], np.vstack(rows))
    elif sysname == "emergence":
        tpm, grain = simulate.degenerate_macro_system()
        _write_json({"n": tpm.n, "tpm": tpm.matrix.tolist(), "grain": grain.tolist()})
    elif sysname == "copy_swap":
        _write_json({"n": 2, "tpm": simulate.copy_swap_system().matrix.tolist()})
    elif sysname == "disconnected":
        _write_json({"n": 2, "tpm": simulate.disconnected_system().matrix.tolist()})
    elif sysname == "identity":
        t = simulate.identity_tpm(args.nodes)
        _write_json({"n": t.n, "tpm": t.matrix.tolist()})
    return EXIT_OK


_HANDLERS = {
    "entropy": _cmd_entropy,
    "kl": _cmd_kl,
    "mi": lambda a: _mi_like(a, conditional=False),
    "cmi": lambda a: _mi_like(a, conditional=True),
    "te": _cmd_te,
    "ais": _cmd_ais,
    "predinfo": _cmd_predinfo,
    "ei": _cmd_ei,
    "phi": _cmd_phi,
    "autonomy": _cmd_autonomy,
    "emergence": _cmd_emergence,
    "advise": _cmd_advise,
    "scan": _cmd_scan,
    "simulate": _cmd_simulate,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _HANDLERS[args.command](args)
    except MissingField as exc:
        sys.stderr.write(f"infometer: incomplete report manifest: {exc}\n")
        return EXIT_MISSING_FIELD
    except (InfometerError, ValueError) as exc:
        sys.stderr.write(f"infometer: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
