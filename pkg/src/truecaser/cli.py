"""Command line: ``truecaser {train,distill,truecase,evaluate}``.

Exit codes: 0 success, 2 usage error, 3 data error, 4 model-format error,
1 anything else (e.g. a diverging loss).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from .corpus import iter_corpus, read_corpus, write_corpus
from .distill import DEFAULT_PREFIX, distill_sentences, parse_prefix
from .errors import DataError, ModelFormatError, TruecaserError
from .evaluate import score
from .inference import truecase_stream
from .model import ModelConfig
from .serialize import load_model, save_model
from .training import TrainOptions, train

EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_MODEL = 4

log = logging.getLogger("truecaser")


class UsageError(Exception):
    pass


def _add_train_flags(p, default_preset):
    p.add_argument("--preset", choices=["teacher", "student"], default=None,
                   help=f"network size (default: {default_preset})")
    p.add_argument("--config", type=Path, help="JSON file of model/training settings")
    p.add_argument("--cell", choices=["gru", "lstm"])
    p.add_argument("--epochs", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--dropout", type=float)
    p.add_argument("--batch", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--clip", type=float, help="global gradient-norm clip, <= 0 disables")
    p.add_argument("--patience", type=int)
    p.add_argument("--dev", type=Path, help="dev corpus for early stopping")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="truecaser", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a model on a cased corpus")
    p.add_argument("--corpus", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    _add_train_flags(p, "teacher")

    p = sub.add_parser("distill", help="regenerate a corpus through a teacher with a prefix")
    p.add_argument("--teacher", type=Path, required=True)
    p.add_argument("--corpus", type=Path, required=True)
    p.add_argument("--prefix", default=" ".join(DEFAULT_PREFIX))
    p.add_argument("--out", type=Path, required=True, help="regenerated corpus")
    p.add_argument("--train-student", action="store_true")
    p.add_argument("--student-out", type=Path)
    _add_train_flags(p, "student")

    p = sub.add_parser("truecase", help="truecase standard input line by line")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--prefix", default=None)
    p.add_argument("--full-beam", action="store_true")

    p = sub.add_parser("evaluate", help="score a hypothesis corpus against references")
    p.add_argument("--hyp", type=Path, required=True)
    p.add_argument("--ref", type=Path, required=True)
    p.add_argument("--first-word", action="store_true")
    p.add_argument("--per-class", action="store_true")
    return parser


def resolve_training(args, default_preset: str) -> tuple[ModelConfig, TrainOptions]:
    """Flags override the config file, which overrides the preset."""
    file_settings = {}
    if args.config is not None:
        try:
            file_settings = json.loads(args.config.read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config file {args.config}: {exc}") from exc
        if not isinstance(file_settings, dict):
            raise UsageError("config file must hold a JSON object")
    preset = args.preset or file_settings.pop("preset", None) or default_preset
    file_settings.pop("preset", None)
    model_fields = {f.name for f in dataclasses.fields(ModelConfig)}
    train_fields = {f.name for f in dataclasses.fields(TrainOptions)}
    unknown = set(file_settings) - model_fields - train_fields
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    model_kw = {k: v for k, v in file_settings.items() if k in model_fields}
    train_kw = {k: v for k, v in file_settings.items() if k in train_fields}
    if args.cell is not None:
        model_kw["cell_kind"] = args.cell
    if args.dropout is not None:
        model_kw["dropout_rate"] = args.dropout
    for flag in ("epochs", "lr", "batch", "seed", "clip", "patience"):
        value = getattr(args, flag)
        if value is not None:
            train_kw[flag] = value
    if train_kw.get("clip") is not None and train_kw["clip"] <= 0:
        train_kw["clip"] = None
    try:
        return ModelConfig.preset(preset, **model_kw), TrainOptions(**train_kw)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def _dev(args):
    return list(read_corpus(args.dev)) if args.dev is not None else None


def cmd_train(args) -> int:
    config, options = resolve_training(args, "teacher")
    corpus = list(read_corpus(args.corpus))
    log.info("training on %d sentences, config %s", len(corpus), config.to_dict())
    result = train(corpus, config, options, dev=_dev(args))
    save_model(result.model, args.out)
    log.info("wrote %s (best epoch %d)", args.out, result.best_epoch)
    return 0


def cmd_distill(args) -> int:
    if args.train_student and args.student_out is None:
        raise UsageError("--train-student needs --student-out")
    config, options = resolve_training(args, "student")
    prefix = parse_prefix(args.prefix)
    teacher = load_model(args.teacher)
    regenerated = list(distill_sentences(teacher, read_corpus(args.corpus), prefix))
    write_corpus(regenerated, args.out)
    log.info("wrote %d regenerated sentences to %s", len(regenerated), args.out)
    if args.train_student:
        result = train(regenerated, config, options, dev=_dev(args))
        save_model(result.model, args.student_out)
        log.info("wrote student model %s", args.student_out)
    return 0


def cmd_truecase(args) -> int:
    model = load_model(args.model)
    prefix = parse_prefix(args.prefix) if args.prefix else None
    out = sys.stdout
    for sent in truecase_stream(iter_corpus(sys.stdin), model, prefix=prefix,
                                use_full_beam=args.full_beam):
        out.write(" ".join(sent))
        out.write("\n")
    out.flush()
    return 0


def cmd_evaluate(args) -> int:
    report = score(read_corpus(args.hyp), read_corpus(args.ref))
    d = report.to_dict()
    if not args.first_word:
        d.pop("first_word_accuracy")
    if not args.per_class:
        d.pop("per_class")
    print(json.dumps(d, indent=2, sort_keys=True, ensure_ascii=False))
    print(report.format_table(), file=sys.stderr)
    return 0


COMMANDS = {"train": cmd_train, "distill": cmd_distill, "truecase": cmd_truecase,
            "evaluate": cmd_evaluate}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose or args.command in ("train", "distill")
                        else logging.WARNING,
                        format="%(asctime)s %(levelname)s %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"truecaser: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ModelFormatError as exc:
        print(f"truecaser: model error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except DataError as exc:
        print(f"truecaser: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"truecaser: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except TruecaserError as exc:
        print(f"truecaser: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
