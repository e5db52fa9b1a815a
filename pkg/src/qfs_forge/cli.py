"""Command-line front end.

    qfs-forge ingest --input raw.jsonl --output work/ingest
    qfs-forge curate --input work/ingest/examples.jsonl --output work/curate
    qfs-forge split --input work/curate/kept.jsonl --output work/split --seed 13
    qfs-forge oracle-label --input work/split/train.jsonl --output work/labels
    qfs-forge summarize --input work/split/test.jsonl --scorer lead --output work/lead
    qfs-forge evaluate --input work/lead/summaries.jsonl --references work/split/test.jsonl --preset wikiref
    qfs-forge stats --input work/split --output work/stats

Every output directory receives ``config.json`` with the effective settings.
"""

import argparse
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import corpus, oracle, plotting, rouge, scoring, selection
from .io import SchemaError, read_jsonl, write_json_atomic, write_jsonl_atomic, write_text_atomic
from .text import split_sentences
from .windows import assign_scoring_windows, serialize_input

logger = logging.getLogger("qfs_forge")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_MISSING_FILE = 3
EXIT_SCHEMA = 4
EXIT_CONFIG = 5
EXIT_VALIDATION = 6


class ConfigError(ValueError):
    pass


# defaults for every command-scoped setting; a --config file may set any of
# these keys for its command and nothing else
DEFAULTS = {
    "ingest": {"input": None, "output": None, "html": False},
    "curate": {"input": None, "output": None, "thresholds": None, "recall_threshold": 0.5,
               "oracle_threshold": 0.2, "doc_token_cap": 1000},
    "oracle-label": {"input": None, "output": None, "profile": "training"},
    "summarize": {"input": None, "output": None, "scorer": "lead", "scores": None, "mode": "single_doc",
                  "threshold": None, "lead_sentences": 2, "word_budget": 250, "max_window_tokens": 512,
                  "stride": 100, "windows": False},
    "threshold-search": {"input": None, "output": None, "scores": None, "scorer": "external"},
    "evaluate": {"input": None, "output": None, "references": None, "preset": "wikiref", "mode": "single_doc",
                 "figures": True},
    "split": {"input": None, "output": None, "seed": 0, "ratios": [0.8, 0.1, 0.1]},
    "stats": {"input": None, "output": None, "figures": True},
}

# execution-only settings, never echoed so that artifacts do not depend on them
NOT_ECHOED = {"output", "jobs", "config"}


def _parse_threshold(value):
    if value is None:
        return None
    if isinstance(value, str) and value.strip().lower() in ("-inf", "none", "null"):
        return -math.inf
    return float(value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qfs-forge", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, help_text):
        p = sub.add_parser(name, help=help_text)
        # None marks "not given" so a --config file can fill the gap
        p.add_argument("--input", nargs="+", default=None)
        p.add_argument("--output", default=None)
        p.add_argument("--config", default=None, help="JSON file of settings for this command")
        p.add_argument("--jobs", type=int, default=1)
        return p

    p = command("ingest", "raw statement/citation records -> examples")
    p.add_argument("--html", action="store_const", const=True, default=None,
                   help="citation bodies are HTML; strip tags first")

    p = command("curate", "filter examples with the curation rules")
    p.add_argument("--thresholds", default=None, help="reuse a thresholds.json instead of computing one")
    p.add_argument("--recall-threshold", type=float, default=None)
    p.add_argument("--oracle-threshold", type=float, default=None)
    p.add_argument("--doc-token-cap", type=int, default=None)

    p = command("oracle-label", "greedy oracle labels and sentence scores")
    p.add_argument("--profile", choices=sorted(oracle.PROFILES), default=None)

    p = command("summarize", "score and select sentences")
    p.add_argument("--scorer", choices=["all", "lead", "query-sim", "external"], default=None)
    p.add_argument("--scores", default=None, help="external scores JSONL")
    p.add_argument("--mode", choices=["single_doc", "multi_doc"], default=None)
    p.add_argument("--threshold", default=None, help="score threshold (single_doc), or -inf")
    p.add_argument("--lead-sentences", type=int, default=None)
    p.add_argument("--word-budget", type=int, default=None)
    p.add_argument("--max-window-tokens", type=int, default=None)
    p.add_argument("--stride", type=int, default=None)
    p.add_argument("--windows", action="store_const", const=True, default=None,
                   help="also write the serialized encoder windows")

    p = command("threshold-search", "pick the selection threshold on a development set")
    p.add_argument("--scores", default=None)
    p.add_argument("--scorer", choices=["lead", "query-sim", "external"], default=None)

    p = command("evaluate", "ROUGE report for a summaries file")
    p.add_argument("--references", default=None, help="examples or clusters JSONL holding the references")
    p.add_argument("--preset", choices=sorted(rouge.PRESETS), default=None)
    p.add_argument("--mode", choices=["single_doc", "multi_doc"], default=None)
    p.add_argument("--no-figures", dest="figures", action="store_const", const=False, default=None)

    p = command("split", "train/dev/test split without shared documents")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--ratios", type=float, nargs=3, default=None)

    p = command("stats", "dataset statistics per split")
    p.add_argument("--no-figures", dest="figures", action="store_const", const=False, default=None)
    return parser


def effective_config(args) -> dict:
    defaults = DEFAULTS[args.command]
    cfg = dict(defaults)
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise FileNotFoundError(f"config file not found: {path}")
        try:
            loaded = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: invalid JSON ({e.msg})") from None
        if not isinstance(loaded, dict):
            raise ConfigError(f"{path}: expected a JSON object")
        unknown = sorted(set(loaded) - set(defaults))
        if unknown:
            raise ConfigError(f"{path}: unknown keys {unknown} for command {args.command!r}")
        cfg.update(loaded)
    for key in defaults:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    if isinstance(cfg.get("input"), str):
        cfg["input"] = [cfg["input"]]
    if not cfg.get("input"):
        raise ConfigError("--input is required")
    for key in ("input", "references", "scores", "thresholds"):
        paths = cfg.get(key)
        if paths is None:
            continue
        for p in paths if isinstance(paths, list) else [paths]:
            if not Path(p).exists():
                raise FileNotFoundError(f"input file not found: {p}")
    return cfg


def _echo(cfg: dict, command: str) -> dict:
    out = {"command": command}
    out.update({k: v for k, v in cfg.items() if k not in NOT_ECHOED})
    if isinstance(out.get("threshold"), float) and math.isinf(out["threshold"]):
        out["threshold"] = "-inf"
    return out


def _outdir(cfg: dict, command: str, required=True):
    if cfg.get("output") is None:
        if required:
            raise ConfigError("--output is required")
        return None
    out = Path(cfg["output"])
    out.mkdir(parents=True, exist_ok=True)
    write_json_atomic(out / "config.json", _echo(cfg, command))
    return out


def _read_many(paths, parse):
    items = []
    for path in paths:
        for lineno, rec in read_jsonl(path):
            items.append(parse(rec, f"{Path(path).name}:{lineno}"))
    return items


def load_examples(paths):
    return _read_many(paths, corpus.Example.from_dict)


def load_clusters(paths):
    return _read_many(paths, corpus.Cluster.from_dict)


def _progress(done: int, total: int):
    if done == total or done % 1000 == 0:
        logger.info("processed %d/%d", done, total)


def cmd_ingest(cfg, jobs):
    out = _outdir(cfg, "ingest")
    records = _read_many(cfg["input"], corpus.RawRecord.from_dict)
    if cfg["html"]:
        for rec in records:
            rec.citation_body = corpus.html_to_text(rec.citation_body)
    examples, rejects = corpus.ingest(records)
    _progress(len(records), len(records))
    write_jsonl_atomic(out / "examples.jsonl", [ex.to_record() for ex in examples])
    write_jsonl_atomic(out / "rejects.jsonl", [{"id": i, "reason": r} for i, r in rejects])
    print(f"ingested {len(examples)} examples, rejected {len(rejects)}")


def cmd_curate(cfg, jobs):
    out = _outdir(cfg, "curate")
    examples = load_examples(cfg["input"])
    if cfg["thresholds"]:
        thresholds = corpus.CurationThresholds.from_dict(json.loads(Path(cfg["thresholds"]).read_text()))
    else:
        thresholds = corpus.compute_thresholds(examples, cap=cfg["doc_token_cap"])
    config = corpus.CurationConfig(
        thresholds=thresholds,
        recall_threshold=cfg["recall_threshold"],
        oracle_threshold=cfg["oracle_threshold"],
        stats_doc_token_cap=cfg["doc_token_cap"],
    )
    kept, rejects = corpus.curate(examples, config, jobs=jobs)
    _progress(len(examples), len(examples))
    write_json_atomic(out / "thresholds.json", thresholds.to_dict())
    write_jsonl_atomic(out / "kept.jsonl", [ex.to_record() for ex in kept])
    write_jsonl_atomic(out / "rejects.jsonl", [{"id": i, "reason": r} for i, r in rejects])
    print(f"kept {len(kept)} of {len(examples)} examples")


def _label_task(args):
    ex, profile = args
    return oracle.greedy_oracle(ex.document, ex.summary, profile).to_record(ex.id)


def cmd_oracle_label(cfg, jobs):
    out = _outdir(cfg, "oracle-label")
    examples = load_examples(cfg["input"])
    profile = oracle.PROFILES[cfg["profile"]]
    tasks = [(ex, profile) for ex in examples]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            labels = list(pool.map(_label_task, tasks, chunksize=16))
    else:
        labels = [_label_task(t) for t in tasks]
    write_jsonl_atomic(out / "labels.jsonl", labels)
    print(f"labelled {len(labels)} examples")


def _single_doc_scores(scorer, examples, scores_path):
    if scorer == "external":
        return scoring.load_external_scores(scores_path, examples)
    fn = {"all": scoring.score_all, "lead": scoring.score_lead}.get(scorer)
    out = {}
    for ex in examples:
        if fn is not None:
            out[ex.id] = fn(ex.document, ex.id)
        else:
            out[ex.id] = scoring.score_query_sim(ex.query, ex.document, ex.id)
    return out


def _check_summarize(cfg):
    if cfg["scorer"] == "external" and not cfg["scores"]:
        raise ConfigError("--scorer external needs --scores")
    if cfg["scorer"] != "external" and cfg["scores"]:
        raise ConfigError("--scores only applies to --scorer external")
    if cfg["mode"] == "multi_doc" and cfg["threshold"] is not None:
        raise ConfigError("--threshold applies to single_doc mode only")
    if cfg["mode"] == "multi_doc" and cfg["windows"]:
        raise ConfigError("--windows applies to single_doc mode only")
    if cfg["word_budget"] < 1 or cfg["lead_sentences"] < 1:
        raise ConfigError("--word-budget and --lead-sentences must be positive")


def cmd_summarize(cfg, jobs):
    _check_summarize(cfg)
    cfg["threshold"] = _parse_threshold(cfg["threshold"])
    out = _outdir(cfg, "summarize")
    scorer = cfg["scorer"]
    records = []
    if cfg["mode"] == "multi_doc":
        clusters = load_clusters(cfg["input"])
        if scorer == "external":
            ext = scoring.load_external_cluster_scores(cfg["scores"], clusters)
        for c in clusters:
            if scorer == "external":
                doc_scores = ext[c.cluster_id]
            elif scorer == "query-sim":
                doc_scores = scoring.score_query_sim_cluster(c.query, c.documents)
            elif scorer == "lead":
                doc_scores = [scoring.score_lead(d).scores for d in c.documents]
            else:
                doc_scores = [scoring.score_all(d).scores for d in c.documents]
            picked = selection.select_multi_doc(doc_scores, c.documents, cfg["word_budget"])
            records.append({
                "cluster_id": c.cluster_id,
                "selected": [list(p) for p in picked],
                "summary_text": " ".join(c.documents[d][s] for d, s in picked),
            })
    else:
        examples = load_examples(cfg["input"])
        all_scores = _single_doc_scores(scorer, examples, cfg["scores"])
        windows = []
        for ex in examples:
            sc = all_scores[ex.id]
            if scorer == "all":
                picked = selection.select_single_doc(sc, ex.document, None, block_trigrams=False)
            elif scorer == "lead":
                picked = selection.select_single_doc(sc, ex.document, None, max_sentences=cfg["lead_sentences"],
                                                     block_trigrams=False)
            else:
                threshold = cfg["threshold"] if cfg["threshold"] is not None else (
                    0.0 if scorer == "query-sim" else None)
                picked = selection.select_single_doc(sc, ex.document, threshold)
            records.append({
                "id": ex.id,
                "selected": picked,
                "summary_text": " ".join(ex.document[i] for i in picked),
            })
            if cfg["windows"]:
                ws = serialize_input(ex.query, ex.document, cfg["max_window_tokens"], cfg["stride"])
                windows.append({
                    "id": ex.id,
                    "windows": [w.to_record() for w in ws],
                    "scoring_window": [v for _, v in sorted(assign_scoring_windows(ws, len(ex.document)).items())],
                })
        if cfg["windows"]:
            write_jsonl_atomic(out / "windows.jsonl", windows)
    write_jsonl_atomic(out / "summaries.jsonl", records)
    print(f"wrote {len(records)} summaries with scorer {scorer}")


def cmd_threshold_search(cfg, jobs):
    if cfg["scorer"] == "external" and not cfg["scores"]:
        raise ConfigError("--scorer external needs --scores")
    out = _outdir(cfg, "threshold-search")
    examples = load_examples(cfg["input"])
    scores = _single_doc_scores(cfg["scorer"], examples, cfg["scores"])
    curve = selection.threshold_curve(examples, scores)
    best = selection.search_threshold(examples, scores)
    fmt = lambda t: "-inf" if math.isinf(t) else t  # noqa: E731
    best_f1 = next(p.rouge2_f1 for p in curve if p.threshold == best)
    write_json_atomic(out / "threshold.json", {"threshold": fmt(best), "rouge2_f1": best_f1,
                                               "n_examples": len(examples)})
    lines = ["threshold\trouge2_f1"] + [f"{fmt(p.threshold)}\t{p.rouge2_f1:.6f}" for p in curve]
    write_text_atomic(out / "curve.tsv", "\n".join(lines) + "\n")
    plotting.plot_threshold_curve(curve, best, out / "curve.png")
    print(f"threshold {fmt(best)} (mean ROUGE-2 F1 {100 * best_f1:.2f})")


def _evaluation_pairs(cfg):
    summaries = []
    for path in cfg["input"]:
        for lineno, rec in read_jsonl(path):
            summaries.append((f"{Path(path).name}:{lineno}", rec))
    multi = cfg["mode"] == "multi_doc"
    key = "cluster_id" if multi else "id"
    if multi:
        refs = {c.cluster_id: c for c in load_clusters([cfg["references"]])}
    else:
        refs = {ex.id: ex for ex in load_examples([cfg["references"]])}
    pairs = []
    for where, rec in summaries:
        rid = rec.get(key)
        if rid not in refs:
            raise SchemaError(f"{key} {rid!r} has no reference", where)
        item = refs[rid]
        selected = rec.get("selected")
        if selected is None:
            text = rec.get("summary_text")
            if not isinstance(text, str):
                raise SchemaError("record needs 'selected' or 'summary_text'", where)
            cand = split_sentences(text)
        else:
            try:
                if multi:
                    cand = [item.documents[d][s] for d, s in selected]
                else:
                    cand = [item.document[i] for i in selected]
            except (IndexError, TypeError, ValueError):
                raise SchemaError("selected indices do not fit the reference document", where) from None
        references = item.references if multi else [item.summary]
        pairs.append((cand, references))
    return pairs


def cmd_evaluate(cfg, jobs):
    if not cfg["references"]:
        raise ConfigError("--references is required")
    config = rouge.get_preset(cfg["preset"])
    out = _outdir(cfg, "evaluate", required=False)
    pairs = _evaluation_pairs(cfg)
    report = rouge.evaluate_corpus(pairs, config, jobs=jobs)
    sys.stdout.write(report.to_text())
    print(report.headline())
    if out is not None:
        write_text_atomic(out / "report.json", report.to_json())
        write_text_atomic(out / "report.txt", report.to_text())
        write_text_atomic(out / "report.tsv", report.to_tsv())
        if cfg["figures"]:
            plotting.plot_rouge_report(report, out / "rouge.png")


def cmd_split(cfg, jobs):
    out = _outdir(cfg, "split")
    examples = load_examples(cfg["input"])
    parts = corpus.split(examples, tuple(cfg["ratios"]), seed=cfg["seed"])
    for name, part in zip(("train", "dev", "test"), parts):
        write_jsonl_atomic(out / f"{name}.jsonl", [ex.to_record() for ex in part])
    print("split sizes: " + ", ".join(f"{n}={len(p)}" for n, p in zip(("train", "dev", "test"), parts)))


def _stats_dataset(paths):
    if len(paths) == 1 and Path(paths[0]).is_dir():
        base = Path(paths[0])
        dataset = {}
        for name in ("train", "dev", "test"):
            f = base / f"{name}.jsonl"
            if f.exists():
                dataset[name] = load_examples([f])
        if not dataset:
            raise FileNotFoundError(f"no train/dev/test.jsonl under {base}")
        return dataset
    return {Path(p).stem: load_examples([p]) for p in paths}


def cmd_stats(cfg, jobs):
    out = _outdir(cfg, "stats", required=False)
    dataset = _stats_dataset(cfg["input"])
    report = corpus.stats(dataset)
    sys.stdout.write(report.to_text())
    if out is not None:
        write_json_atomic(out / "stats.json", report.to_dict())
        write_text_atomic(out / "stats.txt", report.to_text())
        write_text_atomic(out / "stats.tsv", report.to_tsv())
        if cfg["figures"]:
            plotting.plot_stats(dataset, out / "stats.png")


COMMANDS = {
    "ingest": cmd_ingest,
    "curate": cmd_curate,
    "oracle-label": cmd_oracle_label,
    "summarize": cmd_summarize,
    "threshold-search": cmd_threshold_search,
    "evaluate": cmd_evaluate,
    "split": cmd_split,
    "stats": cmd_stats,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.jobs < 1:
            raise ConfigError("--jobs must be at least 1")
        cfg = effective_config(args)
        COMMANDS[args.command](cfg, args.jobs)
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_MISSING_FILE
    except SchemaError as e:
        print(f"error: schema violation: {e}", file=sys.stderr)
        return EXIT_SCHEMA
    except ConfigError as e:
        print(f"error: config: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, scoring.ScoreFileError, rouge.InvalidEvaluationPair) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
