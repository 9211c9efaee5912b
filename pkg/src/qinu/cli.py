"""Command-line entry points for the whole pipeline.

    qinu init | ingest | sample | segment | annotate | train | classify |
         score | evaluate | keywords | report

Every command resolves one project directory (--project, overridden by the
QINU_PROJECT environment variable), prints the resolved config hash to
stderr, and is deterministic given the config and store contents. Exit
codes: 0 success, 1 usage error, 2 data error. Mutating commands hold an
exclusive lockfile in the project directory.
"""

import argparse
import json
import math
import os
import sys
from contextlib import contextmanager
from pathlib import Path

from .classifiers import KINDS, load_model, predict, save_model, tokenize_dataset, train_lsa, train_nb, train_simsent, train_svm
from .config import ProjectConfig, init_project, open_project
from .corpus import Topic
from .errors import DataError, StoreLockedError
from .evaluation import cross_validate, top_keywords
from .pipeline import tokenize
from .scoring import QinUWeights, build_lexicon, characteristic_scores, qinu_score, score_polarity
from .server import AnnotationService
from .similarity import Taxonomy, build_ngram_table

PROG = "qinu"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@contextmanager
def project_lock(root: Path):
    lock_path = root / ".lock"
    fd = None
    for attempt in (0, 1):
        try:
            fd = os.open(lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
            break
        except FileExistsError:
            pid = _read_pid(lock_path)
            if attempt == 0 and pid is not None and not _alive(pid):
                lock_path.unlink(missing_ok=True)  # stale lock from a dead process
                continue
            raise StoreLockedError(
                f"project {root} is locked by pid {pid if pid is not None else 'unknown'}"
            ) from None
    os.write(fd, str(os.getpid()).encode("ascii"))
    os.close(fd)
    try:
        yield
    finally:
        lock_path.unlink(missing_ok=True)


def _read_pid(path: Path) -> int | None:
    try:
        return int(path.read_text().strip())
    except (OSError, ValueError):
        return None


def _alive(pid: int) -> bool:
    try:
        os.kill(pid, 0)
    except ProcessLookupError:
        return False
    except PermissionError:
        return True
    return True


def _resolve_project(args) -> Path:
    env = os.environ.get("QINU_PROJECT")
    return Path(env) if env else Path(args.project)


def build_parser() -> _Parser:
    parser = _Parser(prog=PROG, description="Quality-in-use scoring for software reviews.")
    parser.add_argument(
        "--project",
        default="qinu_project",
        help="project directory (QINU_PROJECT env var overrides)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="create a project directory with default config")
    p.add_argument("--seed", type=int, default=0, help="seed recorded in the project config")

    p = sub.add_parser("ingest", help="append reviews from a JSONL file")
    p.add_argument("--input", required=True, help="reviews JSONL file")
    p.add_argument("--strict", action="store_true", help="abort on the first invalid record")

    p = sub.add_parser("sample", help="balanced star sampling of top reviews")
    p.add_argument("--per-star", type=int, default=10)

    p = sub.add_parser("segment", help="split reviews into sentences")
    p.add_argument("--all", action="store_true", help="segment every review, not just the selection")
    p.add_argument("--force", action="store_true", help="re-segment reviews that already have sentences")

    p = sub.add_parser("annotate", help="serve the annotation API / UI")
    p.add_argument("--serve", action="store_true", required=True)
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--static", default=None, help="directory with the annotation UI assets")

    p = sub.add_parser("train", help="train a topic classifier on the gold standard")
    p.add_argument("--classifier", choices=KINDS, required=True)
    p.add_argument("--output", default=None, help="model file (default models/<kind>.json)")

    p = sub.add_parser("classify", help="classify sentences from a text file (one per line)")
    p.add_argument("--input", required=True)
    p.add_argument("--model", required=True, help="model file written by train")

    p = sub.add_parser("score", help="compute quality-in-use scores per product")
    p.add_argument("--weights", default=None, help="effectiveness,efficiency,risk (must sum to 1)")
    p.add_argument("--classifier", choices=KINDS, default="nb")
    p.add_argument("--model", default=None, help="model file (default models/<classifier>.json)")

    p = sub.add_parser("evaluate", help="cross-validated classifier evaluation")
    p.add_argument("--classifier", choices=KINDS, required=True)
    p.add_argument("--folds", type=int, default=3)
    p.add_argument("--seed", type=int, default=None, help="default: seed from project config")
    p.add_argument("--output", default=None, help="report file (default reports/eval_<kind>.json)")

    p = sub.add_parser("keywords", help="top annotated keywords per topic")
    p.add_argument("--top", type=int, default=5)

    sub.add_parser("report", help="consolidated project report from stored artifacts")
    return parser


def _print_hash(config: ProjectConfig) -> None:
    print(f"config: {config.config_hash()}", file=sys.stderr)


def _reports_dir(root: Path) -> Path:
    d = root / "reports"
    d.mkdir(exist_ok=True)
    return d


def _models_dir(root: Path) -> Path:
    d = root / "models"
    d.mkdir(exist_ok=True)
    return d


def _write_json(path: Path, payload) -> None:
    path.write_text(
        json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )


def _train_model(kind: str, store, config: ProjectConfig):
    gold = store.export_gold()
    pairs = tokenize_dataset(gold, config.pipeline)
    if kind == "nb":
        return train_nb(pairs, smoothing=config.nb_smoothing)
    if kind == "svm":
        return train_svm(pairs, hyper=config.svm)
    if kind == "lsa":
        return train_lsa(pairs, rank=config.lsa_rank)
    if config.similarity.backend == "taxonomy":
        if not config.taxonomy_path:
            raise DataError("similarity backend 'taxonomy' needs taxonomy_path in the config")
        knowledge = Taxonomy.load(config.taxonomy_path)
    else:
        knowledge = build_ngram_table([toks for toks, _ in pairs])
    return train_simsent(pairs, params=config.similarity, knowledge=knowledge)


def _finite_scores(scores: dict) -> dict:
    return {t.value: (s if math.isfinite(s) else None) for t, s in scores.items()}


def cmd_init(args) -> int:
    root = _resolve_project(args)
    config = ProjectConfig(seed=args.seed)
    init_project(root, config)
    _print_hash(config)
    print(f"initialized project at {root}")
    return 0


def cmd_ingest(args) -> int:
    root = _resolve_project(args)
    store, config = open_project(root)
    _print_hash(config)
    with project_lock(root):
        n = store.ingest_reviews(args.input, strict=args.strict)
    print(f"ingested {n} new review(s)")
    return 0


def cmd_sample(args) -> int:
    root = _resolve_project(args)
    store, config = open_project(root)
    _print_hash(config)
    if args.per_star < 1:
        raise UsageError("--per-star must be >= 1")
    with project_lock(root):
        selected = store.sample_balanced(args.per_star)
    print(f"selected {len(selected)} review(s)")
    return 0


def cmd_segment(args) -> int:
    root = _resolve_project(args)
    store, config = open_project(root)
    _print_hash(config)
    with project_lock(root):
        ids = list(store.snapshot.reviews) if args.all else None
        n = store.segment(review_ids=ids, force=args.force)
    print(f"segmented into {n} new sentence(s)")
    return 0


def cmd_annotate(args) -> int:
    root = _resolve_project(args)
    store, config = open_project(root)
    _print_hash(config)
    static = args.static
    if static is None:
        bundled = Path(__file__).parent / "static"
        static = bundled if (bundled / "index.html").exists() else None
    with project_lock(root):
        service = AnnotationService(
            store, config, host=args.host, port=args.port, static_dir=static
        )
        port = service.bind()
        print(f"annotation service on http://{args.host}:{port}/ (Ctrl-C stops)", flush=True)
        service.serve_forever()
    return 0


def cmd_train(args) -> int:
    root = _resolve_project(args)
    store, config = open_project(root)
    _print_hash(config)
    with project_lock(root):
        model = _train_model(args.classifier, store, config)
        out = Path(args.output) if args.output else _models_dir(root) / f"{args.classifier}.json"
        save_model(model, out)
    print(f"trained {args.classifier} model -> {out}")
    return 0


def cmd_classify(args) -> int:
    root = _resolve_project(args)
    _, config = open_project(root)
    _print_hash(config)
    model = load_model(args.model)
    try:
        lines = Path(args.input).read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise DataError(f"cannot read {args.input}: {e}") from e
    for line in lines:
        text = line.strip()
        if not text:
            continue
        p = predict(model, tokenize(text, config.pipeline))
        print(
            json.dumps(
                {"text": text, "topic": p.topic.value, "scores": _finite_scores(p.scores)},
                ensure_ascii=False,
            )
        )
    return 0


def cmd_score(args) -> int:
    root = _resolve_project(args)
    store, config = open_project(root)
    _print_hash(config)
    weights = config.weights
    if args.weights is not None:
        parts = args.weights.split(",")
        if len(parts) != 3:
            raise UsageError("--weights needs three comma-separated values")
        try:
            weights = QinUWeights(*(float(x) for x in parts))
        except ValueError as e:
            raise UsageError(str(e)) from e
    model_path = Path(args.model) if args.model else _models_dir(root) / f"{args.classifier}.json"
    if not model_path.exists():
        raise DataError(f"no model at {model_path}; run 'train --classifier {args.classifier}' first")
    model = load_model(model_path)
    gold = store.export_gold()
    lexicon = build_lexicon(gold, config.pipeline)

    state = store.snapshot
    by_product: dict[str, list] = {}
    for sid, sentence in sorted(state.sentences.items()):
        review = state.reviews[sentence.review_id]
        tokens = tokenize(sentence.text, config.pipeline)
        topic = predict(model, tokens).topic
        pol = score_polarity(tokens, lexicon)
        by_product.setdefault(review.product_id, []).append((topic, pol))

    reports_dir = _reports_dir(root)
    with project_lock(root):
        for product_id in sorted(by_product):
            classified = by_product[product_id]
            chars = characteristic_scores(classified)
            n_other = sum(1 for topic, _ in classified if topic is Topic.OTHER)
            report = qinu_score(chars, weights, product_id=product_id, n_other=n_other)
            base = reports_dir / f"qinu_{product_id}"
            _write_json(base.with_suffix(".json"), report.to_json())
            base.with_suffix(".txt").write_text(report.render_text(), encoding="utf-8")
            print(report.render_text(), end="")
    return 0


def cmd_evaluate(args) -> int:
    root = _resolve_project(args)
    store, config = open_project(root)
    _print_hash(config)
    if args.folds < 2:
        raise UsageError("--folds must be >= 2")
    seed = config.seed if args.seed is None else args.seed
    gold = store.export_gold()
    report = cross_validate(gold, args.classifier, k=args.folds, seed=seed, config=config)
    with project_lock(root):
        out = Path(args.output) if args.output else _reports_dir(root) / f"eval_{args.classifier}.json"
        report.save(out)
        out.with_suffix(".txt").write_text(report.render_text(), encoding="utf-8")
    print(report.render_text(), end="")
    return 0


def cmd_keywords(args) -> int:
    root = _resolve_project(args)
    store, config = open_project(root)
    _print_hash(config)
    if args.top < 1:
        raise UsageError("--top must be >= 1")
    gold = store.export_gold()
    ranking = top_keywords(gold, args.top, config.pipeline)
    with project_lock(root):
        _write_json(_reports_dir(root) / "keywords.json", ranking.to_json())
    for topic, ranked in ranking.per_topic.items():
        words = ", ".join(f"{w} ({c})" for w, c in ranked)
        print(f"{topic.value}: {words}")
    return 0


def cmd_report(args) -> int:
    root = _resolve_project(args)
    store, config = open_project(root)
    _print_hash(config)
    state = store.snapshot
    reports_dir = _reports_dir(root)

    lines = ["Project report", f"config hash: {config.config_hash()}", ""]
    selected = len(state.selection) if state.selection is not None else 0
    lines.append(
        f"store: {len(state.reviews)} reviews ({selected} selected), "
        f"{len(state.sentences)} sentences, "
        f"{len(store.annotated_sentence_ids())} annotated"
    )
    payload = {
        "config_hash": config.config_hash(),
        "reviews": len(state.reviews),
        "selected": selected,
        "sentences": len(state.sentences),
        "annotated": len(store.annotated_sentence_ids()),
        "quality_in_use": {},
        "evaluations": {},
    }
    for path in sorted(reports_dir.glob("qinu_*.txt")):
        lines += ["", path.stem.replace("qinu_", "product: "), path.read_text(encoding="utf-8").rstrip()]
        payload["quality_in_use"][path.stem[5:]] = json.loads(
            path.with_suffix(".json").read_text(encoding="utf-8")
        )
    for path in sorted(reports_dir.glob("eval_*.txt")):
        lines += ["", path.read_text(encoding="utf-8").rstrip()]
        payload["evaluations"][path.stem[5:]] = json.loads(
            path.with_suffix(".json").read_text(encoding="utf-8")
        )
    if not payload["quality_in_use"] and not payload["evaluations"]:
        lines += ["", "no score/evaluate artifacts yet; run 'score' and 'evaluate' first"]
    text = "\n".join(lines) + "\n"
    with project_lock(root):
        (reports_dir / "report.txt").write_text(text, encoding="utf-8")
        _write_json(reports_dir / "report.json", payload)
    print(text, end="")
    return 0


_COMMANDS = {
    "init": cmd_init,
    "ingest": cmd_ingest,
    "sample": cmd_sample,
    "segment": cmd_segment,
    "annotate": cmd_annotate,
    "train": cmd_train,
    "classify": cmd_classify,
    "score": cmd_score,
    "evaluate": cmd_evaluate,
    "keywords": cmd_keywords,
    "report": cmd_report,
}


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except (UsageError, ValueError) as e:
        # bad flags or parameter preconditions
        print(f"{PROG}: {e}", file=sys.stderr)
        return 1
    except DataError as e:
        print(f"{PROG}: {e}", file=sys.stderr)
        return 2


def main() -> None:
    raise SystemExit(run_cli())


if __name__ == "__main__":
    main()
