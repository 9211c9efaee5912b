import pytest

from qinu.fixture import fixture_dataset, generate


@pytest.fixture(scope="session")
def bundle():
    return generate(7)


@pytest.fixture(scope="session")
def gold600(bundle):
    return bundle.gold


@pytest.fixture()
def project(tmp_path, bundle):
    """Fixture corpus materialized into a real project store."""
    import json

    from qinu.config import ProjectConfig, init_project

    root = tmp_path / "proj"
    store = init_project(root, ProjectConfig(seed=7))
    with (tmp_path / "reviews.jsonl").open("w", encoding="utf-8") as f:
        for r in bundle.reviews:
            f.write(json.dumps(r.to_json(), ensure_ascii=False) + "\n")
    store.ingest_reviews(tmp_path / "reviews.jsonl")
    store.sample_balanced(10)
    store.segment()
    for a in bundle.annotations:
        store.record_annotation(a)
    return store
