"""Command-line interface.

Subcommands cover the full workflow: ``extract-paths`` builds a path index
from a parsed corpus, ``train`` fits a relatedness or relation classifier,
``tune`` grid-searches the score combiner, ``predict`` labels pairs, and
``evaluate`` scores predictions against gold labels.

Exit codes: 0 on success, 1 for usage problems (bad flags, bad --config
entries, missing required combinations), 2 for data problems (unreadable or
malformed files, inconsistent datasets, invalid hyperparameter values).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, replace
from pathlib import Path

from .baselines import tune_cosine_threshold
from .corpus import DEFAULT_MAX_EDGES, build_path_index, load_index, parse_conll, save_index
from .embeddings import load_table
from .errors import DataError
from .evaluation import report_tsv, scores
from .pairs import (
    BINARY_FALSE,
    BINARY_TRUE,
    NEGATIVE_LABEL,
    RELATED,
    RELATED_LABELS,
    RELATEDNESS_LABELS,
    RELATION_LABELS,
    UNRELATED,
    PairRecord,
    check_labels,
    read_pairs,
    write_pairs,
)
from .pipeline import PATH_COUNT_MODES, PipelineConfig, predict_pairs
from .relatedness import (
    CombinerConfig,
    load_combiner,
    predict_related,
    save_combiner,
    tune_combiner,
)
from .relation_model import (
    RELATEDNESS_PRESET,
    RELATIONS_PRESET,
    load_model,
    save_model,
    train,
)
from .path_encoder import AVERAGE_MODES

MANIFEST_FORMAT = "semrel-train-manifest"
MANIFEST_VERSION = 1

# Any of these labels can be folded onto the two relatedness classes.
_TO_RELATEDNESS = {
    BINARY_TRUE: RELATED,
    BINARY_FALSE: UNRELATED,
    RELATED: RELATED,
    UNRELATED: UNRELATED,
    NEGATIVE_LABEL: UNRELATED,
    **{label: RELATED for label in RELATED_LABELS},
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage problems as exceptions, not exits."""

    def error(self, message):
        raise _UsageError(message)


def build_parser() -> tuple[_Parser, dict[str, _Parser]]:
    parser = _Parser(prog="semrel", description="Semantic relation classification.")
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    subs: dict[str, _Parser] = {}

    sub = commands.add_parser("extract-paths", help="build a dependency-path index for word pairs")
    sub.add_argument("--corpus", required=True, help="parsed corpus in tab-separated CoNLL layout")
    sub.add_argument("--pairs", required=True, help="TSV word pairs (labels optional)")
    sub.add_argument("--output", required=True, help="path index file to write")
    sub.add_argument("--max-edges", type=int, default=DEFAULT_MAX_EDGES,
                     help="longest tree path to keep, in edges (default %(default)s)")
    sub.set_defaults(handler=_cmd_extract_paths)
    subs["extract-paths"] = sub

    sub = commands.add_parser("train", help="train a relatedness or relation classifier")
    sub.add_argument("--task", required=True, choices=("relatedness", "relations"))
    sub.add_argument("--pairs", required=True, help="labelled training pairs (TSV)")
    sub.add_argument("--index", required=True, help="path index from extract-paths")
    sub.add_argument("--embeddings", required=True, help="word vector table (text format)")
    sub.add_argument("--model", required=True, help="model file to write")
    sub.add_argument("--val", help="optional labelled pairs for per-epoch accuracy logging")
    sub.add_argument("--epochs", type=int)
    sub.add_argument("--learning-rate", type=float)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--hidden-layers", type=int, choices=(0, 1))
    sub.add_argument("--word-dropout", type=float, dest="word_dropout",
                     help="probability of replacing a path lemma by the unknown row")
    sub.add_argument("--hidden-dim", type=int)
    sub.add_argument("--mlp-hidden-dim", type=int)
    sub.add_argument("--path-average", choices=AVERAGE_MODES)
    sub.add_argument("--train-word-vectors", action="store_true", default=None)
    sub.add_argument("--config", help="file of key=value lines overriding the task preset")
    sub.set_defaults(handler=_cmd_train)
    subs["train"] = sub

    sub = commands.add_parser("tune", help="grid-search the relatedness combiner on labelled pairs")
    sub.add_argument("--pairs", required=True, help="labelled validation pairs (TSV)")
    sub.add_argument("--index", help="path index (required unless --cosine-only)")
    sub.add_argument("--embeddings", required=True)
    sub.add_argument("--model", help="relatedness model (required unless --cosine-only)")
    sub.add_argument("--output", required=True, help="combiner file to write")
    sub.add_argument("--cosine-only", action="store_true",
                     help="tune only a cosine threshold (w_C=1, no classifier term)")
    sub.set_defaults(handler=_cmd_tune)
    subs["tune"] = sub

    sub = commands.add_parser("predict", help="label pairs with a trained model")
    sub.add_argument("--task", required=True, choices=("relatedness", "relations"))
    sub.add_argument("--pairs", required=True, help="pairs to label (third column ignored)")
    sub.add_argument("--index", required=True)
    sub.add_argument("--embeddings", required=True)
    sub.add_argument("--combiner", required=True, help="combiner file from tune")
    sub.add_argument("--relatedness-model", help="needed whenever the combiner has w_L > 0")
    sub.add_argument("--relation-model", help="four-class model (required for --task relations)")
    sub.add_argument("--output", required=True, help="TSV predictions to write")
    sub.add_argument("--syn-margin", type=float, default=0.2)
    sub.add_argument("--syn-max-paths", type=int, default=3)
    sub.add_argument("--path-count", choices=PATH_COUNT_MODES, default="total")
    sub.add_argument("--config", help="file of key=value lines overriding defaults")
    sub.set_defaults(handler=_cmd_predict)
    subs["predict"] = sub

    sub = commands.add_parser("evaluate", help="score predictions against gold labels")
    sub.add_argument("--pairs", required=True, help="gold-labelled pairs (TSV)")
    sub.add_argument("--predictions", required=True, help="predictions from predict")
    sub.add_argument("--output", help="optional report file (TSV)")
    sub.add_argument("--average", choices=("weighted", "macro"), default="weighted")
    sub.add_argument("--exclude", action="append", default=None, metavar="LABEL",
                     help="drop a label from scoring (repeatable; default: the negative class)")
    sub.add_argument("--no-auto-exclude", action="store_true",
                     help="score every label, including the negative class")
    sub.set_defaults(handler=_cmd_evaluate)
    subs["evaluate"] = sub

    return parser, subs


def _apply_config_file(sub: _Parser, path: str) -> None:
    """Turn ``key = value`` lines into parser defaults for one subcommand.

    Keys name long options with dashes or underscores. Values are converted
    with the option's own type and checked against its choices, so a config
    file can do exactly what flags can; explicit flags still win.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise _UsageError(f"cannot read config file: {exc}") from None
    actions = {action.dest: action for action in sub._actions}
    overrides = {}
    for line_no, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise _UsageError(f"config line {line_no}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        dest = key.replace("-", "_")
        action = actions.get(dest)
        if action is None or dest in ("handler", "config", "help"):
            raise _UsageError(f"config line {line_no}: unknown setting {key!r}")
        if action.type is not None:
            try:
                value = action.type(value)
            except ValueError:
                raise _UsageError(f"config line {line_no}: bad value for {key!r}: {raw.strip()!r}") from None
        elif isinstance(action.const, bool) or isinstance(action.default, bool):
            lowered = value.lower()
            if lowered in ("true", "1", "yes"):
                value = True
            elif lowered in ("false", "0", "no"):
                value = False
            else:
                raise _UsageError(f"config line {line_no}: {key!r} expects true or false")
        if action.choices is not None and value not in action.choices:
            raise _UsageError(
                f"config line {line_no}: {key!r} must be one of {tuple(action.choices)}"
            )
        overrides[dest] = value
    sub.set_defaults(**overrides)


def _relatedness_records(records: list[PairRecord], context: str) -> list[PairRecord]:
    """Fold task labels onto RELATED/UNRELATED; unknown labels are an error."""
    strays = sorted({r.label for r in records} - set(_TO_RELATEDNESS))
    if strays:
        raise DataError(f"{context} has labels unusable for relatedness: {', '.join(strays)}")
    return [replace(r, label=_TO_RELATEDNESS[r.label]) for r in records]


def _cmd_extract_paths(args) -> int:
    with open(args.corpus, encoding="utf-8") as fh:
        sentences = parse_conll(fh)
    records = read_pairs(args.pairs, require_label=False)
    index = build_path_index(sentences, [(r.x, r.y) for r in records], args.max_edges)
    save_index(index, args.output)
    print(f"indexed {len(sentences)} sentences; paths found for {len(index)} of {len(records)} pairs")
    return 0


def _resolved_config(args, preset):
    overrides = {
        "epochs": args.epochs,
        "learning_rate": args.learning_rate,
        "seed": args.seed,
        "hidden_layers": args.hidden_layers,
        "word_dropout_rate": args.word_dropout,
        "hidden_dim": args.hidden_dim,
        "mlp_hidden_dim": args.mlp_hidden_dim,
        "path_average": args.path_average,
        "train_word_vectors": args.train_word_vectors,
    }
    return replace(preset, **{k: v for k, v in overrides.items() if v is not None})


def _cmd_train(args) -> int:
    records = read_pairs(args.pairs)
    val = read_pairs(args.val) if args.val else []
    index = load_index(args.index)
    table = load_table(args.embeddings)
    dropped = 0
    if args.task == "relatedness":
        records = _relatedness_records(records, "training set")
        val = _relatedness_records(val, "validation set") if val else []
        label_set = RELATEDNESS_LABELS
        config = _resolved_config(args, RELATEDNESS_PRESET)
    else:
        check_labels(records, RELATION_LABELS, "training set")
        kept = [r for r in records if r.label != NEGATIVE_LABEL]
        dropped = len(records) - len(kept)
        if dropped:
            print(f"dropped {dropped} {NEGATIVE_LABEL} pairs; the relation model trains on related pairs only")
        if not kept:
            raise DataError("no related pairs left to train on")
        records = kept
        val = [r for r in val if r.label != NEGATIVE_LABEL]
        label_set = RELATED_LABELS
        config = _resolved_config(args, RELATIONS_PRESET)
    params = train(records, val, config, index, table, label_set=label_set)
    save_model(params, args.model)
    manifest = {
        "format": MANIFEST_FORMAT,
        "version": MANIFEST_VERSION,
        "task": args.task,
        "label_set": list(label_set),
        "config": asdict(config),
        "n_train": len(records),
        "n_val": len(val),
        "dropped_negative": dropped,
    }
    manifest_path = Path(args.model).with_suffix(".manifest.json")
    manifest_path.write_text(json.dumps(manifest, indent=1) + "\n", encoding="utf-8")
    print(f"trained {args.task} model on {len(records)} pairs "
          f"({config.epochs} epochs, seed {config.seed}) -> {args.model}")
    return 0


def _cmd_tune(args) -> int:
    records = _relatedness_records(read_pairs(args.pairs), "tuning set")
    table = load_table(args.embeddings)
    if args.cosine_only:
        t, f1 = tune_cosine_threshold(records, table)
        config = CombinerConfig(w_c=1.0, w_l=0.0, t=t)
    else:
        if not args.model or not args.index:
            raise _UsageError("--model and --index are required unless --cosine-only is given")
        index = load_index(args.index)
        params = load_model(args.model)
        config, f1 = tune_combiner(records, params, table, index)
    save_combiner(config, args.output, validation_f1=f1)
    print(f"w_C={config.w_c:.2f} w_L={config.w_l:.2f} t={config.t:.2f} (tuning F1 {f1:.3f})")
    return 0


def _cmd_predict(args) -> int:
    records = read_pairs(args.pairs, require_label=False)
    table = load_table(args.embeddings)
    index = load_index(args.index)
    combiner = load_combiner(args.combiner)
    relatedness_params = load_model(args.relatedness_model) if args.relatedness_model else None
    if combiner.w_l != 0.0 and relatedness_params is None:
        raise _UsageError("this combiner has w_L > 0; pass --relatedness-model")
    if args.task == "relatedness":
        labels = [
            predict_related(combiner, table, r.x, r.y, relatedness_params, index) for r in records
        ]
    else:
        if not args.relation_model:
            raise _UsageError("--task relations requires --relation-model")
        relation_params = load_model(args.relation_model)
        config = PipelineConfig(
            combiner=combiner,
            syn_margin=args.syn_margin,
            syn_max_paths=args.syn_max_paths,
            path_count_mode=args.path_count,
        )
        labels = predict_pairs(config, relation_params, table, index, records, relatedness_params)
    write_pairs(
        [PairRecord(r.x, r.y, label) for r, label in zip(records, labels)], args.output
    )
    print(f"wrote {len(records)} predictions -> {args.output}")
    return 0


def _cmd_evaluate(args) -> int:
    gold = read_pairs(args.pairs)
    pred = read_pairs(args.predictions)
    if len(gold) != len(pred):
        raise DataError(f"gold file has {len(gold)} pairs but predictions file has {len(pred)}")
    for position, (g, p) in enumerate(zip(gold, pred), start=1):
        if (g.x, g.y) != (p.x, p.y):
            raise DataError(
                f"pair {position} differs: gold ({g.x}, {g.y}) vs prediction ({p.x}, {p.y})"
            )
    if args.exclude:
        exclude = tuple(args.exclude)
    elif args.no_auto_exclude:
        exclude = ()
    else:
        gold_labels = {r.label for r in gold}
        exclude = ()
        for candidate in (NEGATIVE_LABEL, UNRELATED, BINARY_FALSE):
            if candidate in gold_labels:
                exclude = (candidate,)
                break
    report = scores(
        [r.label for r in gold], [r.label for r in pred], average=args.average, exclude=exclude
    )
    text = report_tsv(report)
    print(text, end="")
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    return 0


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser, subs = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "command", None) is None:
            raise _UsageError("a command is required (see --help)")
        if getattr(args, "config", None):
            _apply_config_file(subs[args.command], args.config)
            args = parser.parse_args(argv)
        return args.handler(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help and friends
        return exc.code if isinstance(exc.code, int) else 0
    except (DataError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def console_main() -> None:
    raise SystemExit(main())
