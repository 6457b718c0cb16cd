"""Command-line pipeline: generate shards, render task inputs, evaluate logits.

Exit codes: 0 success, 2 usage/config error, 3 data error. Record-level input
problems are logged and tolerated up to an error-rate threshold (default 1%),
after which the run aborts.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import format as fmt
from . import ingest, predict, sampler

log = logging.getLogger("fspgen")

DEFAULT_SHARD_SIZE = 100_000
DEFAULT_MAX_ERROR_RATE = 0.01
# Don't trip the error-rate breaker on the first few records of a stream.
ERROR_RATE_GRACE = 100


class ConfigError(Exception):
    """Bad configuration or task description; maps to exit code 2."""


class DataError(Exception):
    """Unrecoverable input-data problem; maps to exit code 3."""


class ErrorBudget:
    """Counts record-level errors and trips once the rate passes the threshold.

    The rate is only enforced after a grace volume so a bad record at the top
    of a stream cannot abort the run by itself; a final check catches streams
    that end before the grace volume is reached.
    """

    def __init__(self, max_rate: float):
        self.max_rate = max_rate
        self.errors = 0
        self.records = 0

    def _check(self, force: bool = False) -> None:
        total = self.records + self.errors
        if total == 0:
            return
        if (force or total >= ERROR_RATE_GRACE) and self.errors / total > self.max_rate:
            raise DataError(
                f"error rate {self.errors}/{total} exceeded {self.max_rate:.2%}"
            )

    def record_seen(self) -> None:
        self.records += 1
        self._check()

    def record_error(self, line_no: int, message: str) -> None:
        self.errors += 1
        log.warning("input line %d: %s", line_no, message)
        self._check()

    def final_check(self) -> None:
        self._check(force=True)


class ShardWriter:
    """Rolls line-delimited records into fixed-size shard files."""

    def __init__(self, directory: Path, split: str, shard_size: int):
        self.directory = directory
        self.split = split
        self.shard_size = shard_size
        self.index = 0
        self.in_shard = 0
        self.total = 0
        self._fh = None

    def _open_next(self):
        path = self.directory / f"{self.split}-{self.index:05d}.jsonl"
        self._fh = open(path, "w", encoding="utf-8")

    def write(self, record: dict) -> None:
        if self._fh is None or self.in_shard >= self.shard_size:
            if self._fh is not None:
                self._fh.close()
                self.index += 1
            self._open_next()
            self.in_shard = 0
        self._fh.write(json.dumps(record, ensure_ascii=False) + "\n")
        self.in_shard += 1
        self.total += 1

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None


def _load_json(path: str | Path, what: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"{what} not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{what} is not valid JSON: {exc}") from exc


def _corpus_entries(config: dict, args, key: str, flag_paths: list[str]) -> list[dict]:
    entries = [dict(e) for e in config.get(key, [])]
    entries.extend({"path": p} for p in flag_paths)
    for entry in entries:
        if "path" not in entry:
            raise ConfigError(f"{key} entry missing 'path': {entry}")
    return entries


def _build_scheme(name: str | None, custom_symbols: list[str] | None) -> fmt.IndicatorScheme:
    try:
        return fmt.IndicatorScheme(kind=name or fmt.ALPHABET, custom_symbols=custom_symbols)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------


def cmd_generate(args) -> int:
    config = _load_json(args.config, "config file") if args.config else {}

    def pick(flag_value, key, default):
        if flag_value is not None:
            return flag_value
        return config.get(key, default)

    seed = pick(args.seed, "seed", None)
    if seed is None:
        raise ConfigError("generate requires a seed (--seed or config)")

    try:
        ingest_cfg = ingest.IngestConfig(
            max_paragraphs_per_article=int(
                config.get("max_paragraphs_per_article", 5)
            ),
            max_samples_per_category=int(
                config.get("max_samples_per_category", 500_000)
            ),
        )
        sampler_cfg = sampler.SamplerConfig(
            n_model=int(pick(args.n_model, "n_model", 20)),
            n_max_label=int(pick(args.n_max_label, "n_max_label", 10)),
            hard_negatives=int(pick(args.hard_negatives, "hard_negatives", 1)),
            seed=int(seed),
            objective=str(pick(args.objective, "objective", sampler.FSP)),
            validation_fraction=float(
                pick(args.validation_fraction, "validation_fraction", 0.0125)
            ),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    shard_size = int(pick(args.shard_size, "shard_size", DEFAULT_SHARD_SIZE))
    workers = int(pick(args.workers, "workers", 1))
    if shard_size < 1 or workers < 1:
        raise ConfigError("shard_size and workers must be >= 1")

    article_entries = _corpus_entries(config, args, "article_corpora", args.article_corpus)
    flat_entries = _corpus_entries(config, args, "flat_corpora", args.flat_corpus)
    if not article_entries and not flat_entries:
        raise ConfigError("no input corpora given")

    budget = ErrorBudget(float(pick(args.max_error_rate, "max_error_rate", DEFAULT_MAX_ERROR_RATE)))

    def counted(reader):
        for article in reader:
            budget.record_seen()
            yield article

    streams = []
    quotas = []
    for entry in article_entries:
        streams.append(
            counted(ingest.read_article_corpus(entry["path"], ingest_cfg, budget.record_error))
        )
        quotas.append(entry.get("quota"))
    for entry in flat_entries:
        streams.append(
            counted(ingest.read_flat_corpus(entry["path"], ingest_cfg, budget.record_error))
        )
        quotas.append(entry.get("quota"))

    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    stats = sampler.GenerationStats()
    writers = {
        sampler.TUNING: ShardWriter(out_dir, sampler.TUNING, shard_size),
        sampler.VALIDATION: ShardWriter(out_dir, sampler.VALIDATION, shard_size),
    }
    try:
        articles = ingest.interleave(streams, quotas, sampler_cfg.seed)
        for sample in sampler.generate(articles, sampler_cfg, stats=stats, workers=workers):
            split = sampler.assign_split(
                sample.positive_source[0], sampler_cfg.validation_fraction, sampler_cfg.seed
            )
            writers[split].write(sampler.sample_to_record(sample))
    except sampler.InsufficientPoolError as exc:
        raise DataError(str(exc)) from exc
    finally:
        for writer in writers.values():
            writer.close()
    budget.final_check()

    _write_stats(out_dir, stats, sampler_cfg, budget)
    log.info(
        "wrote %d tuning and %d validation samples to %s",
        writers[sampler.TUNING].total,
        writers[sampler.VALIDATION].total,
        out_dir,
    )
    return 0


def _histogram_dict(counter) -> dict:
    return {str(k): counter[k] for k in sorted(counter)}


def _write_stats(out_dir: Path, stats: sampler.GenerationStats, cfg, budget: ErrorBudget):
    payload = {
        "config": {
            "n_model": cfg.n_model,
            "n_max_label": cfg.n_max_label,
            "hard_negatives": cfg.hard_negatives,
            "seed": cfg.seed,
            "objective": cfg.objective,
            "validation_fraction": cfg.validation_fraction,
        },
        "articles": _histogram_dict(stats.articles),
        "paragraphs_seen": stats.paragraphs_seen,
        "filter": _histogram_dict(stats.filter_counts),
        "samples": _histogram_dict(stats.samples_by_split),
        "j_histogram": _histogram_dict(stats.j_histogram),
        "hard_negative_histogram": _histogram_dict(stats.hard_histogram),
        "label_histogram": _histogram_dict(stats.label_histogram),
        "record_errors": budget.errors,
    }
    with open(out_dir / "stats.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(out_dir / "filter_report.txt", "w", encoding="utf-8") as fh:
        for reason, count in sorted(stats.filter_counts.items()):
            fh.write(f"{reason} {count}\n")


# ---------------------------------------------------------------------------
# render-task
# ---------------------------------------------------------------------------


def load_task_spec(path: str | Path, n_model: int | None = None) -> tuple[fmt.TaskSpec, fmt.IndicatorScheme]:
    """Read a task file: class names plus a template or explicit verbalizers."""
    raw = _load_json(path, "task file")
    scheme_raw = raw.get("scheme")
    if isinstance(scheme_raw, str):
        scheme = _build_scheme(scheme_raw, None)
    elif isinstance(scheme_raw, dict):
        scheme = _build_scheme(scheme_raw.get("kind"), scheme_raw.get("custom_symbols"))
    else:
        scheme = fmt.IndicatorScheme()
    try:
        spec = fmt.TaskSpec(
            class_names=list(raw["class_names"]),
            template=raw.get("template"),
            verbalizers=raw.get("verbalizers"),
            n_model=int(n_model or raw.get("n_model", 20)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid task file {path}: {exc}") from exc
    return spec, scheme


def cmd_render_task(args) -> int:
    spec, scheme = load_task_spec(args.task, args.n_model)
    if args.scheme:
        scheme = _build_scheme(args.scheme, None)
    markers = fmt.MarkerSet()
    out_path = Path(args.output)
    rendered = 0
    with open(args.dataset, encoding="utf-8") as src, open(
        out_path, "w", encoding="utf-8"
    ) as dst:
        for line_no, line in enumerate(src, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                text = record["text"]
                label = int(record["label"])
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise DataError(f"dataset line {line_no}: {exc}") from exc
            if not 0 <= label < spec.n_labels:
                raise DataError(
                    f"dataset line {line_no}: label {label} out of range for "
                    f"{spec.n_labels} classes"
                )
            dst.write(
                json.dumps(
                    {"input": fmt.render_inference(text, spec, scheme, markers), "label": label},
                    ensure_ascii=False,
                )
                + "\n"
            )
            rendered += 1
    log.info("rendered %d inputs to %s", rendered, out_path)
    return 0


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------


def cmd_eval(args) -> int:
    try:
        report = predict.evaluate(
            predict.read_logits(args.logits), args.n_l, task=args.task
        )
    except (predict.EmptyEvalError, predict.MissingGoldLabelError, ValueError) as exc:
        raise DataError(str(exc)) from exc
    print(format_report_with_json(report, args.report))
    return 0


def format_report_with_json(report: predict.EvalReport, report_path: str | None) -> str:
    if report_path:
        with open(report_path, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2)
            fh.write("\n")
    return predict.format_report(report) + "\n" + json.dumps(report.to_dict())


# ---------------------------------------------------------------------------
# inspect
# ---------------------------------------------------------------------------


def cmd_inspect(args) -> int:
    scheme = _build_scheme(args.scheme, None)
    markers = fmt.MarkerSet()
    shown = 0
    with open(args.shard, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            sample = sampler.sample_from_record(json.loads(line))
            print(f"label={sample.label} J={sample.j_count} hard={sum(sample.is_hard)}")
            print(fmt.render_tuning(sample, scheme, markers))
            print()
            shown += 1
            if shown >= args.count:
                break
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fspgen",
        description="Self-supervised multiple-choice dataset pipeline",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="build tuning/validation shards from corpora")
    gen.add_argument("--config", help="JSON config file (corpora, knobs)")
    gen.add_argument(
        "--article-corpus",
        action="append",
        default=[],
        metavar="PATH",
        help="article-corpus JSONL (repeatable)",
    )
    gen.add_argument(
        "--flat-corpus",
        action="append",
        default=[],
        metavar="PATH",
        help="flat-corpus JSONL (repeatable)",
    )
    gen.add_argument("--output-dir", "-o", required=True)
    gen.add_argument("--seed", type=int)
    gen.add_argument("--objective", choices=list(sampler.OBJECTIVES))
    gen.add_argument("--n-model", type=int)
    gen.add_argument("--n-max-label", type=int)
    gen.add_argument("--hard-negatives", type=int)
    gen.add_argument("--validation-fraction", type=float)
    gen.add_argument("--shard-size", type=int)
    gen.add_argument("--workers", type=int)
    gen.add_argument("--max-error-rate", type=float)
    gen.set_defaults(func=cmd_generate)

    ren = sub.add_parser("render-task", help="render a labeled dataset for zero-shot inference")
    ren.add_argument("--task", required=True, help="task JSON (class_names + template/verbalizers)")
    ren.add_argument("--dataset", required=True, help="JSONL with text and label fields")
    ren.add_argument("--output", "-o", required=True)
    ren.add_argument("--n-model", type=int)
    ren.add_argument("--scheme", choices=[fmt.ALPHABET, fmt.NUMERIC, fmt.CONSTANT])
    ren.set_defaults(func=cmd_render_task)

    ev = sub.add_parser("eval", help="score a logits file with constrained prediction")
    ev.add_argument("logits", help="JSONL with sample_id, logits, gold_label")
    ev.add_argument("--n-l", type=int, required=True, help="number of task classes")
    ev.add_argument("--task", default="eval")
    ev.add_argument("--report", help="also write the report as JSON to this path")
    ev.set_defaults(func=cmd_eval)

    ins = sub.add_parser("inspect", help="pretty-print samples from a shard")
    ins.add_argument("shard")
    ins.add_argument("-n", "--count", type=int, default=3)
    ins.add_argument("--scheme", default=fmt.ALPHABET, choices=[fmt.ALPHABET, fmt.NUMERIC, fmt.CONSTANT])
    ins.set_defaults(func=cmd_inspect)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ConfigError as exc:
        log.error("%s", exc)
        return 2
    except DataError as exc:
        log.error("%s", exc)
        return 3
    except FileNotFoundError as exc:
        log.error("%s", exc)
        return 3


if __name__ == "__main__":
    sys.exit(main())
