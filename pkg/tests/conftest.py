from __future__ import annotations

from pathlib import Path

import pytest

from sqlporter.corpus import Corpus, load_corpus

REPO_ROOT = Path(__file__).resolve().parent.parent
CORPUS_DIR = REPO_ROOT / "corpus"

FIG1_SOURCE = 'DECLARE var1 VARCHAR(20) = NULL\nSELECT var1 + "string" AS var2'
FIG1_TARGET = 'DECLARE var1 VARCHAR(20) DEFAULT NULL\nSELECT CONCAT(ISNULL(var1, ""), "string") AS var2'
FIG1_ERROR_MESSAGE = (
    "String concatenation between NULL and NOT NULL values makes the whole string AS NULL"
)


@pytest.fixture(scope="session")
def corpus() -> Corpus:
    return load_corpus(CORPUS_DIR)


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return CORPUS_DIR


@pytest.fixture()
def fig1_dir(tmp_path: Path) -> Path:
    root = tmp_path / "input"
    root.mkdir()
    (root / "fig1.sql").write_text(FIG1_SOURCE + "\n")
    return root
