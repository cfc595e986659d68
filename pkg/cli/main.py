# cli/main.py
"""
hci: one executable for the whole workflow.
Exit codes: 0 ok, 1 usage/config, 2 data, 3 runtime/IO/remote.
"""
from __future__ import annotations
import argparse
import json
import logging
import sys
from typing import Dict, List, Optional, Sequence, Tuple

from bench.grid import DEFAULT_VARIANT, SWEEP_VARIANTS, GridSpec, config_key, run_grid
from bench.reference import compare_to_reference
from bench.report import emit_report
from common import config
from common.errors import ConfigError, DataError, FingerprintError, HciError
from common.logger import CSVLogger, setup_logging
from common.paths import Paths
from common.utils import atomic_write, derive_seed, write_json
from corpus.dataset import Dataset, concat, filter_source, load_dataset, load_texts, validate, write_dataset
from corpus.document import LabelVector, Source
from corpus.projects import ProjectCandidate, check_selection, project_by_name
from corpus.split import SplitSpec, partition_fingerprint, split
from corpus.stats import corpus_stats
from features.pipeline import FeatureConfig, FeatureKind, FeaturePipeline
from github_client.client import (
    GitHubClient, RepoRef, merge_comments, read_raw_comments, token_from_env, write_raw_comments,
)
from github_client.export import export_unlabeled
from github_client.sampling import sample_random
from metrics.report import evaluate
from multilabel.base import BaseConfig, BaseKind
from multilabel.serialization import ModelBundle, load_model, save_model
from multilabel.strategies import (
    ChainConfig, Strategy, consistency_postprocess_matrix, predict_batch, train_chain, train_ovr,
)
from textprep.pipeline import PreprocessConfig, preprocess, preprocess_dataset

logger = logging.getLogger("hci")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_RUNTIME = 0, 1, 2, 3

KINDS = {"reviews": "AppReviews", "comments": "IssueComments", "combined": "Combined"}


class UsageError(ConfigError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ------------------------------
# Helpers
# ------------------------------

def _csv_list(raw: str) -> List[str]:
    return [s.strip() for s in (raw or "").split(",") if s.strip()]


def parse_ngram(raw: str) -> Tuple[int, int]:
    parts = _csv_list(raw)
    try:
        lo, hi = (int(parts[0]), int(parts[0])) if len(parts) == 1 else (int(parts[0]), int(parts[1]))
    except (ValueError, IndexError):
        raise UsageError(f"ngram must look like '4,4' or '1,2', got '{raw}'") from None
    if len(parts) > 2:
        raise UsageError(f"ngram must have at most two numbers, got '{raw}'")
    return lo, hi


def assemble_datasets(paths: Sequence[str], kinds: Optional[Sequence[str]] = None) -> Dict[str, Dataset]:
    """
    Bench datasets from the given files. AppReviews and IssueComments are the
    per-source slices of the pooled files; Combined is the pool itself.
    Without explicit kinds, every kind with data is returned.
    """
    pool = concat([load_dataset(p) for p in paths], name="Combined")
    slices = {
        "AppReviews": filter_source(pool, Source.APP_REVIEW, name="AppReviews"),
        "IssueComments": filter_source(pool, Source.ISSUE_COMMENT, name="IssueComments"),
        "Combined": pool,
    }
    if kinds:
        names = []
        for k in kinds:
            if k not in KINDS:
                raise UsageError(f"--kind must be one of {sorted(KINDS)}, got '{k}'")
            names.append(KINDS[k])
    else:
        names = [n for n in ("AppReviews", "IssueComments") if len(slices[n])]
        if len(names) == 2:
            names.append("Combined")
    out = {}
    for n in names:
        if not len(slices[n]):
            raise DataError(f"no documents for {n} in {', '.join(paths)}")
        out[n] = slices[n]
    return out


def _single_dataset(args) -> Tuple[str, Dataset]:
    kinds = [args.kind] if args.kind else None
    found = assemble_datasets(args.dataset, kinds)
    if kinds:
        return next(iter(found.items()))
    # no --kind: the pool, labelled by its sources
    name = "Combined" if len(found) > 1 else next(iter(found))
    return name, found[name]


def _emit_lines(lines: Sequence[str], out: Optional[str]) -> None:
    if out:
        with atomic_write(out) as f:
            f.write("\n".join(lines) + ("\n" if lines else ""))
    else:
        for line in lines:
            print(line)


# ------------------------------
# Subcommands
# ------------------------------

def cmd_validate(args) -> int:
    ds = load_dataset(args.dataset)
    report = validate(ds, check_projects=args.check_projects)
    for e in report:
        print(f"{e.level}\t{e.code}\t{e.doc_id}\t{e.msg}")
    logger.info("%d documents, %d issue(s), %d error(s)", len(ds), len(report), len(report.errors))
    return EXIT_OK if report.is_valid else EXIT_DATA


def cmd_stats(args) -> int:
    report = corpus_stats(load_dataset(args.dataset))
    if args.out:
        rows = report.rows()
        with CSVLogger(args.out, list(rows[0].keys())) as out:
            out.write_all(rows)
    for line in report.render():
        print(line)
    return EXIT_OK


def cmd_preprocess(args) -> int:
    ds = load_dataset(args.dataset)
    docs = preprocess_dataset(ds, PreprocessConfig(), n_jobs=args.jobs)
    lines = [json.dumps({"id": t.doc_id, "tokens": list(t.tokens), "normalized_text": t.normalized_text},
                        ensure_ascii=False) for t in docs]
    _emit_lines(lines, args.out)
    logger.info("preprocessed %d documents", len(docs))
    return EXIT_OK


def _learner_key(dataset_name: str, strategy: Strategy, feature: FeatureKind,
                 analyzer: str, ngram: Tuple[int, int], model: BaseKind) -> str:
    # same key the grid uses
    variant = (analyzer, ngram) if feature.uses_tfidf else None
    return config_key(dataset_name, strategy, feature, variant, model)


def cmd_train(args) -> int:
    strategy = Strategy.parse(args.strategy)
    feature = FeatureKind.parse(args.feature)
    model_kind = BaseKind.parse(args.model)
    ngram = parse_ngram(args.ngram)
    if feature.uses_embeddings and not args.embeddings:
        raise UsageError("--embeddings is required for w2v/stack features")
    try:
        order = tuple(int(i) for i in _csv_list(args.order)) if args.order else ChainConfig().order
    except ValueError:
        raise UsageError(f"--order must be label indices like '0,1,2,3', got '{args.order}'") from None
    chain = ChainConfig(order=order)
    fcfg = FeatureConfig(kind=feature, analyzer=args.analyzer, ngram_range=ngram,
                         min_df=args.min_df, embedding_path=args.embeddings)

    name, ds = _single_dataset(args)
    spec = SplitSpec(train_fraction=args.train_fraction, seed=args.seed, stratify=args.stratify)
    train, test = split(ds, spec)

    pre = PreprocessConfig()
    tokens = {t.doc_id: t for t in preprocess_dataset(ds, pre)}
    train_docs = [tokens[i] for i in train.ids]
    pipeline = FeaturePipeline.fit(train_docs, pre, fcfg)
    X = pipeline.transform(train_docs)
    Y = train.label_matrix()

    key = _learner_key(name, strategy, feature, args.analyzer, ngram, model_kind)
    seed = derive_seed(args.seed, key)
    base = BaseConfig(kind=model_kind)
    if strategy is Strategy.OVR:
        mlm = train_ovr(X, Y, base, seed=seed, sparse_width=pipeline.sparse_width,
                        cf=pipeline.collection_frequency)
    else:
        mlm = train_chain(X, Y, base, seed=seed, chain=chain, sparse_width=pipeline.sparse_width,
                          cf=pipeline.collection_frequency)

    split_info = {
        "dataset": name,
        "seed": spec.seed,
        "train_fraction": spec.train_fraction,
        "stratify": spec.stratify,
        "n_train": len(train),
        "n_test": len(test),
        "test_fingerprint": partition_fingerprint(test),
    }
    save_model(args.out, ModelBundle(model=mlm, pipeline=pipeline, split=split_info, config_key=key))
    logger.info("[%s] trained on %d documents (width %d)", key, len(train), pipeline.width)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    bundle = load_model(args.model, embedding_path=args.embeddings)
    info = bundle.split
    if not info:
        raise DataError("model file carries no split information")
    kind = {v: k for k, v in KINDS.items()}.get(info.get("dataset", ""))
    found = assemble_datasets(args.dataset, [kind] if kind else None)
    ds = found.get(info.get("dataset")) or next(iter(found.values()))

    spec = SplitSpec(train_fraction=float(info["train_fraction"]), seed=int(info["seed"]),
                     stratify=bool(info.get("stratify", False)))
    _, test = split(ds, spec)
    if partition_fingerprint(test) != info.get("test_fingerprint"):
        raise FingerprintError("test partition differs from the one recorded at training time")

    pipe = bundle.pipeline
    X_test = pipe.transform([preprocess(d.text, pipe.preprocess, d.id) for d in test])
    report = evaluate(bundle.model, X_test, test.label_matrix(), fingerprint=pipe.fingerprint(),
                      seed=bundle.model.seed)
    if args.out:
        write_json(args.out, report.to_dict())
    print(report.summary())
    return EXIT_OK


def predict_texts(model_path: str, input_path: str, postprocess: bool = False,
                  embedding_path: Optional[str] = None) -> List[Dict[str, object]]:
    """One record per input record, in input order."""
    bundle = load_model(model_path, embedding_path=embedding_path)
    records = load_texts(input_path)
    if not records:
        return []
    pipe = bundle.pipeline
    X = pipe.transform([preprocess(text, pipe.preprocess, doc_id) for doc_id, text in records])
    pred = predict_batch(bundle.model, X)
    forced = consistency_postprocess_matrix(pred.bits) if postprocess else None

    out = []
    for i, (doc_id, _) in enumerate(records):
        raw = LabelVector.from_bits(pred.bits[i].tolist())
        rec: Dict[str, object] = {
            "id": doc_id,
            "labels": dict(zip(config.LABEL_COLUMNS, raw.bits())),
            "scores": dict(zip(config.LABEL_COLUMNS, (round(float(s), 6) for s in pred.scores[i]))),
        }
        if forced is not None:
            rec["labels_consistent"] = dict(zip(config.LABEL_COLUMNS, (int(b) for b in forced[i])))
        out.append(rec)
    return out


def cmd_predict(args) -> int:
    recs = predict_texts(args.model, args.input, postprocess=args.postprocess, embedding_path=args.embeddings)
    _emit_lines([json.dumps(r, ensure_ascii=False) for r in recs], args.out)
    logger.info("predicted %d records", len(recs))
    return EXIT_OK


def cmd_grid(args) -> int:
    kinds = _csv_list(args.kind) if args.kind else None
    datasets = assemble_datasets(args.dataset, kinds)
    if args.sweep:
        variants = SWEEP_VARIANTS
    else:
        analyzer = args.analyzer or DEFAULT_VARIANT[0]
        ngram = parse_ngram(args.ngram) if args.ngram else DEFAULT_VARIANT[1]
        variants = ((analyzer, ngram),)

    spec = GridSpec(
        datasets=tuple(n for n in config.BENCH_DATASETS if n in datasets),
        strategies=tuple(Strategy.parse(s) for s in _csv_list(args.strategies)),
        features=tuple(FeatureKind.parse(s) for s in _csv_list(args.features)),
        models=tuple(BaseKind.parse(s) for s in _csv_list(args.models)),
        variants=variants,
        seed=args.seed,
        train_fraction=args.train_fraction,
        stratify=args.stratify,
        n_jobs=args.jobs,
        timing=args.timing,
    )
    table = run_grid(spec, datasets, embedding_path=args.embeddings)
    emit_report(table, args.out, args.format)

    if args.reference:
        ref = Paths.default().reference_table() if args.reference == "default" else args.reference
        diff = compare_to_reference(table, str(ref), strict=args.strict)
        for line in diff.render():
            print(line)
    return EXIT_OK


def cmd_fetch_github(args) -> int:
    repo = RepoRef.parse(args.repo)
    client = GitHubClient(token=token_from_env())

    stats = client.fetch_repo_stats(repo)
    rec = project_by_name(repo.slug)
    failed = check_selection(ProjectCandidate(
        name=rec.name if rec else repo.slug,
        stars=stats.stars,
        downloads_millions=rec.downloads_millions if rec else None,
    ))
    if failed:
        logger.warning("[%s] fails selection criteria: %s", repo.slug, ", ".join(failed))

    comments = client.fetch_issue_comments(repo, args.max_pages)
    if args.raw_out:
        try:
            existing = read_raw_comments(args.raw_out)
        except FileNotFoundError:
            existing = []
        merged = merge_comments(existing, comments)
        write_raw_comments(merged, args.raw_out)
        comments = merged
    if args.sample is not None:
        comments = sample_random(comments, args.sample, args.seed)
    if args.out:
        export_unlabeled(comments, args.out, repo=repo)
    return EXIT_OK


def cmd_export(args) -> int:
    if args.raw:
        repo = RepoRef.parse(args.repo) if args.repo else None
        export_unlabeled(read_raw_comments(args.input), args.out, repo=repo)
        return EXIT_OK
    ds = load_dataset(args.input)
    write_dataset(ds, args.out, args.format)
    logger.info("wrote %d documents to %s", len(ds), args.out)
    return EXIT_OK


# ------------------------------
# Parser
# ------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hci", description="Human-centric issue classification for app feedback.",
                allow_abbrev=False)
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("-q", "--quiet", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_, allow_abbrev=False)
        sp.set_defaults(func=fn)
        return sp

    s = add("validate", cmd_validate, "check a corpus file")
    s.add_argument("--dataset", required=True)
    s.add_argument("--check-projects", action="store_true")

    s = add("stats", cmd_stats, "per-category / per-project counts")
    s.add_argument("--dataset", required=True)
    s.add_argument("--out")

    s = add("preprocess", cmd_preprocess, "write token JSONL")
    s.add_argument("--dataset", required=True)
    s.add_argument("--out")
    s.add_argument("--jobs", type=int, default=1)

    s = add("train", cmd_train, "train one multi-label model")
    s.add_argument("--dataset", required=True, action="append")
    s.add_argument("--kind", choices=sorted(KINDS))
    s.add_argument("--strategy", default="cc")
    s.add_argument("--feature", default="tfidf")
    s.add_argument("--analyzer", default=config.TFIDF_ANALYZER)
    s.add_argument("--ngram", default=f"{config.TFIDF_NGRAM[0]},{config.TFIDF_NGRAM[1]}")
    s.add_argument("--min-df", type=int, default=config.TFIDF_MIN_DF)
    s.add_argument("--model", default="svm")
    s.add_argument("--order")
    s.add_argument("--embeddings")
    s.add_argument("--seed", type=int, default=config.SPLIT_SEED)
    s.add_argument("--train-fraction", type=float, default=config.TRAIN_FRACTION)
    s.add_argument("--stratify", action="store_true")
    s.add_argument("--out", required=True)

    s = add("evaluate", cmd_evaluate, "score a model on its recorded test split")
    s.add_argument("--model", required=True)
    s.add_argument("--dataset", required=True, action="append")
    s.add_argument("--embeddings")
    s.add_argument("--out")

    s = add("predict", cmd_predict, "label new texts")
    s.add_argument("--model", required=True)
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out")
    s.add_argument("--postprocess", action="store_true")
    s.add_argument("--embeddings")

    s = add("grid", cmd_grid, "run the experiment grid")
    s.add_argument("--dataset", required=True, action="append")
    s.add_argument("--kind")
    s.add_argument("--strategies", default="ovr,cc")
    s.add_argument("--features", default="tfidf,w2v,stack")
    s.add_argument("--models", default="lr,svm,rf,gbt")
    s.add_argument("--analyzer", choices=("word", "char"))
    s.add_argument("--ngram")
    s.add_argument("--sweep", action="store_true")
    s.add_argument("--embeddings")
    s.add_argument("--seed", type=int, default=config.SPLIT_SEED)
    s.add_argument("--train-fraction", type=float, default=config.TRAIN_FRACTION)
    s.add_argument("--stratify", action="store_true")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--timing", action="store_true")
    s.add_argument("--reference")
    s.add_argument("--strict", action="store_true")
    s.add_argument("--format", default="csv", choices=("csv", "markdown", "md"))
    s.add_argument("--out", required=True)

    s = add("fetch-github", cmd_fetch_github, "fetch issue comments")
    s.add_argument("--repo", "--project", dest="repo", required=True)
    s.add_argument("--max-pages", type=int, default=1)
    s.add_argument("--sample", type=int)
    s.add_argument("--seed", type=int, default=config.SPLIT_SEED)
    s.add_argument("--raw-out")
    s.add_argument("--out")

    s = add("export", cmd_export, "convert corpus files / raw comments")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--format", choices=("csv", "jsonl"))
    s.add_argument("--raw", action="store_true", help="input is raw comment JSONL")
    s.add_argument("--repo")

    return p


def run(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        # --help and other argparse exits
        if e.code is None:
            return EXIT_OK
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    setup_logging(level)

    try:
        return args.func(args)
    except ConfigError as e:
        logger.error("%s", e)
        return EXIT_USAGE
    except DataError as e:
        logger.error("%s", e)
        return EXIT_DATA
    except (HciError, OSError) as e:
        logger.error("%s", e)
        return EXIT_RUNTIME
    except Exception as e:  # noqa: BLE001
        logger.exception("unexpected failure: %s", e)
        return EXIT_RUNTIME


def main(argv: Optional[Sequence[str]] = None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
