"""Command-line front end.

Subcommands: ``encode`` (sentences file -> embeddings TSV + manifest),
``sts`` (similarity file -> Pearson x 100), ``rank`` (query/candidate
files -> MAP), ``weights`` (per-word score table), and ``serve`` (run the
HTTP service). Every run writes or prints a manifest echoing its full
effective configuration.

All logic lives in the core package; each subcommand only parses flags,
reads files, and delegates — either in process or, with ``--server``, to
a running service. Exit codes: 0 ok, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .errors import GembedError
from .evalharness import parse_ranking, parse_sts
from .gemcore import GemConfig
from .runner import (
    build_manifest,
    encode_texts,
    load_vectors,
    run_ranking_queries,
    run_sts_pairs,
    run_weights,
    write_embeddings_tsv,
)
from .textproc import TokenizerConfig, tokenize
from .vecstore import OovPolicy

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; the CLI contract wants 1.
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _add_common_flags(parser: argparse.ArgumentParser, ranking: bool = False) -> None:
    parser.add_argument(
        "--vectors",
        action="append",
        required=True,
        metavar="PATH",
        help="word-vector text file; repeat to concatenate stores in order",
    )
    parser.add_argument("--m", type=int, default=6 if ranking else 7, help="context window radius")
    parser.add_argument("--K", dest="k", type=int, default=45, help="candidate corpus directions")
    parser.add_argument("--h", type=int, default=15 if ranking else 17, help="directions kept per sentence")
    parser.add_argument("--t", type=int, default=3, help="singular-value exponent for coarse embeddings")
    parser.add_argument(
        "--rerank",
        choices=["sigma", "plain"],
        default="plain" if ranking else "sigma",
        help="direction re-ranking: sigma-weighted or plain correlation",
    )
    parser.add_argument("--removal", choices=["sdr", "sir", "none"], default="sdr")
    parser.add_argument("--oov", choices=["hash", "zero", "skip"], default="hash")
    parser.add_argument("--no-lowercase", dest="lowercase", action="store_false")
    parser.add_argument(
        "--threads",
        type=int,
        default=int(os.environ.get("GEM_THREADS", "1")),
        help="phase-2 worker threads (GEM_THREADS env fallback; output is worker-count independent)",
    )
    parser.add_argument("--server", metavar="URL", help="send the work to a running gembed service")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gembed", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_encode = sub.add_parser("encode", help="encode a sentences file into an embeddings TSV")
    _add_common_flags(p_encode)
    p_encode.add_argument("--input", required=True, help="input file, one sentence per line")
    p_encode.add_argument("--output", required=True, help="output TSV; manifest goes alongside")

    p_sts = sub.add_parser("sts", help="similarity evaluation: Pearson x 100 over a pairs file")
    _add_common_flags(p_sts)
    p_sts.add_argument("--pairs", required=True, help="pairs TSV")
    p_sts.add_argument("--layout", choices=["simple3", "stsb7"], default="simple3")

    p_rank = sub.add_parser("rank", help="ranking evaluation: MAP over query/candidate files")
    _add_common_flags(p_rank, ranking=True)
    p_rank.add_argument("--queries", required=True, help="TSV of query_id<TAB>text")
    p_rank.add_argument("--candidates", required=True, help="TSV of query_id<TAB>label<TAB>text")

    p_weights = sub.add_parser("weights", help="per-word score table for one sentence")
    _add_common_flags(p_weights)
    p_weights.add_argument("--sentence", required=True)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)

    return parser


def _gem_config(args) -> GemConfig:
    return GemConfig(
        m=args.m, k=args.k, h=args.h, t=args.t,
        rerank_mode=args.rerank, removal_mode=args.removal,
    )


def _gem_dict(args) -> dict:
    return {
        "m": args.m, "k": args.k, "h": args.h, "t": args.t,
        "rerank": args.rerank, "removal": args.removal,
    }


def _text_dict(args) -> dict:
    return {"oov": args.oov, "lowercase": args.lowercase}


def _read_lines(path: str) -> list[str]:
    return Path(path).read_text(encoding="utf-8").splitlines()


def _write_manifest(manifest_dict: dict, output: str) -> str:
    manifest_path = output + ".manifest.json"
    Path(manifest_path).write_text(
        json.dumps(manifest_dict, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return manifest_path


def _client(args):
    from .client import ServiceClient

    return ServiceClient(args.server)


def _cmd_encode(args) -> int:
    sentences = _read_lines(args.input)
    if args.server:
        with _client(args) as client:
            reply = client.encode(
                args.vectors, sentences, _gem_dict(args), _text_dict(args), threads=args.threads
            )
        with open(args.output, "w", encoding="utf-8") as out:
            for i, row in enumerate(reply["embeddings"]):
                out.write(str(i) + "\t" + "\t".join(repr(float(x)) for x in row) + "\n")
        manifest = dict(reply["manifest"], input=args.input, output=args.output)
    else:
        store = load_vectors(args.vectors)
        cfg = _gem_config(args)
        tok_cfg = TokenizerConfig(lowercase=args.lowercase)
        policy = OovPolicy(args.oov)
        outcome = encode_texts(store, sentences, cfg, tok_cfg, policy, threads=args.threads)
        write_embeddings_tsv(outcome.embeddings, args.output)
        manifest = build_manifest(
            "encode", args.vectors, store, cfg, tok_cfg, policy, args.threads, outcome,
            input_path=args.input, output_path=args.output,
        ).to_dict()
    manifest_path = _write_manifest(manifest, args.output)
    print(f"encoded {manifest['sentence_count']} sentences "
          f"in {manifest['encode_seconds']:.3f}s -> {args.output}")
    print(f"manifest -> {manifest_path}")
    return EXIT_OK


def _cmd_sts(args) -> int:
    if args.server:
        pairs = parse_sts(args.pairs, args.layout)
        payload = [{"gold": p.gold, "sent_a": p.sent_a, "sent_b": p.sent_b} for p in pairs]
        with _client(args) as client:
            reply = client.similarity(
                args.vectors, payload, _gem_dict(args), _text_dict(args), threads=args.threads
            )
        score, manifest = reply["pearson_x100"], reply["manifest"]
    else:
        pairs = parse_sts(args.pairs, args.layout)
        store = load_vectors(args.vectors)
        cfg = _gem_config(args)
        tok_cfg = TokenizerConfig(lowercase=args.lowercase)
        policy = OovPolicy(args.oov)
        score, outcome = run_sts_pairs(store, pairs, cfg, tok_cfg, policy, threads=args.threads)
        manifest = build_manifest(
            "sts", args.vectors, store, cfg, tok_cfg, policy, args.threads, outcome,
            input_path=args.pairs, extra_inputs={"layout": args.layout},
        ).to_dict()
    print(f"{score:.2f}")
    print(json.dumps(manifest, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_rank(args) -> int:
    queries = parse_ranking(args.queries, args.candidates)
    if args.server:
        payload = [
            {
                "query_id": q.query_id,
                "text": q.text,
                "candidates": [{"text": c.text, "label": c.label} for c in q.candidates],
            }
            for q in queries
        ]
        with _client(args) as client:
            reply = client.rank(
                args.vectors, payload, _gem_dict(args), _text_dict(args), threads=args.threads
            )
        score, manifest = reply["mean_average_precision"], reply["manifest"]
    else:
        store = load_vectors(args.vectors)
        cfg = _gem_config(args)
        tok_cfg = TokenizerConfig(lowercase=args.lowercase)
        policy = OovPolicy(args.oov)
        score, outcome = run_ranking_queries(store, queries, cfg, tok_cfg, policy, threads=args.threads)
        manifest = build_manifest(
            "rank", args.vectors, store, cfg, tok_cfg, policy, args.threads, outcome,
            extra_inputs={"queries": args.queries, "candidates": args.candidates},
        ).to_dict()
    print(f"MAP {score:.4f}")
    print(json.dumps(manifest, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_weights(args) -> int:
    tok_cfg = TokenizerConfig(lowercase=args.lowercase)
    if not tokenize(args.sentence, tok_cfg):
        raise UsageError("gembed weights: --sentence has no tokens")
    if args.server:
        with _client(args) as client:
            reply = client.weights(args.vectors, args.sentence, _gem_dict(args), _text_dict(args))
        rows = [
            (t["token"], t["novelty"], t["significance"], t["uniqueness"], t["weight"])
            for t in reply["tokens"]
        ]
        manifest = reply["manifest"]
    else:
        store = load_vectors(args.vectors)
        cfg = _gem_config(args)
        policy = OovPolicy(args.oov)
        rows, outcome = run_weights(store, args.sentence, cfg, tok_cfg, policy)
        manifest = build_manifest(
            "weights", args.vectors, store, cfg, tok_cfg, policy, 1, outcome,
        ).to_dict()
    print("token\tnovelty\tsignificance\tuniqueness\tweight")
    for token, novelty, significance, uniqueness, weight in rows:
        print(f"{token}\t{novelty:.3f}\t{significance:.3f}\t{uniqueness:.3f}\t{weight:.3f}")
    print(json.dumps(manifest, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


_COMMANDS = {
    "encode": _cmd_encode,
    "sts": _cmd_sts,
    "rank": _cmd_rank,
    "weights": _cmd_weights,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except (GembedError, ValueError, OSError) as exc:
        print(f"gembed {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
