import json
from importlib import resources

import pytest

from bioinvert.frames import parse_frame


def _fixture_text(name: str) -> str:
    return resources.files("bioinvert.fixtures").joinpath(name).read_text("utf-8")


@pytest.fixture(scope="session")
def golden_corpus() -> list[dict]:
    return [json.loads(line) for line in _fixture_text("golden-corpus.jsonl").strip().splitlines()]


@pytest.fixture(scope="session")
def gerund_table() -> dict:
    return json.loads(_fixture_text("gerund-table.json"))


def load_golden_frame(name: str):
    return parse_frame(json.loads(_fixture_text(f"frames/{name}.json")))


@pytest.fixture(scope="session")
def tail_swing_frame():
    return load_golden_frame("tail-swing")


@pytest.fixture(scope="session")
def jet_frame():
    return load_golden_frame("jet-propulsion")


@pytest.fixture(scope="session")
def crawl_frame():
    return load_golden_frame("crawling")


@pytest.fixture(scope="session")
def crawl_source_frame():
    return load_golden_frame("crawling-source")


@pytest.fixture(scope="session")
def demo_doc_texts() -> dict[str, str]:
    return {
        name: _fixture_text(f"demo-corpus/{name}.txt")
        for name in ("squid", "inchworm", "fish")
    }
