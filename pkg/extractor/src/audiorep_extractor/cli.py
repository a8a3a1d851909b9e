"""CLI: train classifiers and extract EMB1/PRB1 files."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from audiorep_extractor import __version__

log = logging.getLogger("audiorep-extractor")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="audiorep-extract",
        description="Deep-model embeddings and classifier probabilities for the audiorep toolkit.",
    )
    parser.add_argument("--version", action="version", version=f"audiorep-extract {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="run a model over WAV clips, write EMB1/PRB1")
    p.add_argument("--model", required=True, choices=("vggish", "pitch", "instr"))
    p.add_argument("--weights", type=Path, default=None, help="model weights path")
    p.add_argument("--wavs", nargs="*", type=Path, default=None, help="input WAV files, in order")
    p.add_argument("--metadata", type=Path, default=None, help="dataset index (JSON-lines)")
    p.add_argument("--dataset", type=Path, default=None, help="root for relative WAV paths")
    p.add_argument("--out", type=Path, required=True, help="EMB1 output path")
    p.add_argument("--probs", type=Path, default=None, help="PRB1 output path (classifiers only)")
    p.add_argument("--batch-size", type=int, default=32)

    p = sub.add_parser("train", help="train a pitch or instrument classifier")
    p.add_argument("--target", required=True, choices=("pitch", "instrument"))
    p.add_argument("--metadata", type=Path, required=True)
    p.add_argument("--dataset", type=Path, default=None)
    p.add_argument("--epochs", type=int, default=12)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--out", type=Path, required=True, help="checkpoint output path")
    return parser


def cmd_extract(args) -> int:
    from audiorep_extractor.extract import extract_classifier, extract_vggish, resolve_wavs

    wavs = resolve_wavs(args.wavs, args.metadata, args.dataset)
    if args.model == "vggish":
        if args.probs is not None:
            log.error("vggish produces embeddings only; drop --probs")
            return 2
        extract_vggish(args.weights, wavs, args.out, args.batch_size)
    else:
        if args.weights is None:
            log.error("classifier extraction needs --weights from `train`")
            return 2
        extract_classifier(args.weights, wavs, args.out, args.probs, args.batch_size)
    return 0


def cmd_train(args) -> int:
    from audiorep_extractor.train import save_checkpoint, train_classifier

    checkpoint = train_classifier(
        args.metadata,
        args.target,
        epochs=args.epochs,
        seed=args.seed,
        batch_size=args.batch_size,
        root=args.dataset,
    )
    save_checkpoint(checkpoint, args.out)
    log.info(
        "saved %s (%d classes, val accuracy %.3f)",
        args.out,
        len(checkpoint["classes"]),
        checkpoint["val_accuracy"],
    )
    return 0


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return {"extract": cmd_extract, "train": cmd_train}[args.command](args)
    except Exception as exc:
        log.error("%s", exc)
        return 1


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
