#!/usr/bin/env python3
"""End-to-end use case: from raw review files to a quality-in-use report.

Walks the entire pipeline against the bundled fixture corpus:

    1. generate the fixture (60 reviews for one product, gold annotations)
    2. init a project
    3. ingest the review file
    4. balanced sampling: top 10 reviews per star -> exactly 50 selected
    5. segment the selected reviews into sentences (600 of them)
    6. load the pre-built gold annotations
    7. train a classifier
    8. 3-fold cross-validated evaluation
    9. score quality-in-use per characteristic and in aggregate
   10. render the consolidated report

Everything is deterministic for a fixed --seed: run it twice into two
directories and the report files come out byte-identical.
"""

import argparse
import shutil
import sys
from pathlib import Path

from qinu.cli import run_cli
from qinu.fixture import write_fixture


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--workdir", default="use_case_run", help="directory for fixture + project")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--classifier", default="nb", choices=["nb", "svm", "lsa", "simsent"])
    args = parser.parse_args(argv)

    workdir = Path(args.workdir)
    fixture_dir = workdir / "fixture"
    project = workdir / "project"
    if project.exists():
        shutil.rmtree(project)
    project_flag = ["--project", str(project)]

    print(f"[1] generating fixture corpus (seed={args.seed})")
    write_fixture(fixture_dir, seed=args.seed)

    steps = [
        ("init", ["init", "--seed", str(args.seed)]),
        ("ingest", ["ingest", "--input", str(fixture_dir / "reviews.jsonl")]),
        ("sample", ["sample", "--per-star", "10"]),
        ("segment", ["segment"]),
    ]
    for i, (name, cmd) in enumerate(steps, start=2):
        print(f"[{i}] {name}")
        code = run_cli(project_flag + cmd)
        if code != 0:
            return code

    print("[6] loading pre-built gold annotations")
    gold = (fixture_dir / "gold_annotations.jsonl").read_text(encoding="utf-8")
    with (project / "annotations.jsonl").open("a", encoding="utf-8") as f:
        f.write(gold)

    final = [
        ("train", ["train", "--classifier", args.classifier]),
        ("evaluate", ["evaluate", "--classifier", args.classifier, "--folds", "3", "--seed", str(args.seed)]),
        ("score", ["score"]),
        ("keywords", ["keywords", "--top", "5"]),
        ("report", ["report"]),
    ]
    for i, (name, cmd) in enumerate(final, start=7):
        print(f"[{i}] {name}")
        code = run_cli(project_flag + cmd)
        if code != 0:
            return code

    print(f"\ndone; see {project / 'reports'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
