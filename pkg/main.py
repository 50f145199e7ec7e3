import argparse
import logging
import sys
import typing

from main_utils import (EVAL_TASKS, cmd_build_corpus, cmd_eval, cmd_extract_features, cmd_query, cmd_train_joint,
                        cmd_train_word, load_run_config)
from utils.utils import USER_ERRORS

logger = logging.getLogger(__name__)

# Path flags per subcommand: (flag, key in the config file's "paths" section)
PATH_FLAGS = {
    "build-corpus": (("--general", "general_corpus"), ("--music", "music_corpus")),
    "train-word": (("--corpus", "corpus_dir"),),
    "extract-features": (("--audio", "audio_dir"),),
    "train-joint": (("--embedding", "embedding"), ("--vocabulary", "vocabulary"), ("--features", "features"),
                    ("--supervision", "supervision")),
    "eval": (("--embedding", "embedding"), ("--vocabulary", "vocabulary"), ("--checkpoint", "checkpoint"),
             ("--features", "features"), ("--annotations", "annotations"), ("--tag-metadata", "tag_metadata")),
    "query": (("--embedding", "embedding"), ("--vocabulary", "vocabulary"), ("--checkpoint", "checkpoint"),
              ("--features", "features")),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run config file", default=None)
    common.add_argument("--seed", help="global seed, split per stage", type=int, default=None)
    common.add_argument("--workers", help="SGNS worker threads", type=int, default=None)
    common.add_argument("--out", help="output directory", default=None)
    common.add_argument("--verbose", "-v", help="debug logging", action="store_true")

    parser = argparse.ArgumentParser(description="Musical word embedding toolkit")
    commands = parser.add_subparsers(dest="command", required=True)

    for command, flags in PATH_FLAGS.items():
        subparser = commands.add_parser(command, parents=[common])
        for flag, key in flags:
            subparser.add_argument(flag, dest=f"path_{key}", default=None, help=f"overrides paths.{key}")

        if command == "eval":
            subparser.add_argument("task", choices=EVAL_TASKS)
        elif command == "query":
            subparser.add_argument("words", nargs="+", help="query words; several are averaged")
            subparser.add_argument("--k", type=int, default=10)
            subparser.add_argument("--kind", action="append", dest="kinds", default=None,
                                   help="restrict results to a token kind (word, review, tag, artist, track)")

    return parser


def run(args: argparse.Namespace) -> None:
    paths = {name[len("path_"):]: value for name, value in vars(args).items() if name.startswith("path_")}
    config = load_run_config(args.config, args.seed, args.workers, args.out, paths)

    if args.command == "build-corpus":
        cmd_build_corpus(config)
    elif args.command == "train-word":
        cmd_train_word(config)
    elif args.command == "extract-features":
        cmd_extract_features(config)
    elif args.command == "train-joint":
        cmd_train_joint(config)
    elif args.command == "eval":
        cmd_eval(config, args.task)
    elif args.command == "query":
        cmd_query(config, args.words, args.k, args.kinds)


def main(argv: typing.Optional[list[str]] = None) -> int:
    """Exit codes: 0 success, 2 user or configuration error, 1 anything else."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        run(args)
    except USER_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:
        logger.debug("unhandled error", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
