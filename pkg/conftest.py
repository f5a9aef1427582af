"""
================================================================================
DESCRIPTIVE KEYPHRASES — Shared Test Fixtures
================================================================================
Fixture corpus under fixtures/ (10 annotated foreground documents, 12
background abstracts, 60 annotator responses). Hand-computed counts live in
fixtures/manifest.json.
================================================================================
"""

import json
import os
import tempfile
from pathlib import Path

# Log files go to a scratch directory; must be set before any module logs
os.environ.setdefault("KEYPHRASE_LOG_DIR", tempfile.mkdtemp(prefix="keyphrase-logs-"))

import pytest

from core.config import Config

ROOT_DIR = Path(__file__).parent
FIXTURES_DIR = ROOT_DIR / "fixtures"

# Read-only reference material, not part of the suite
collect_ignore = ["examples"]


@pytest.fixture(scope="session")
def fixture_paths():
    return {
        "foreground_dir": str(FIXTURES_DIR / "foreground"),
        "background_dir": str(FIXTURES_DIR / "background"),
        "annotations_dir": str(FIXTURES_DIR / "annotations"),
        "responses_file": str(FIXTURES_DIR / "responses.csv"),
        "blocklist_file": str(ROOT_DIR / "data" / "spurious_phrases.txt"),
    }


@pytest.fixture(scope="session")
def manifest():
    with open(FIXTURES_DIR / "manifest.json", 'r', encoding='utf-8') as f:
        return json.load(f)


@pytest.fixture(scope="session")
def foreground():
    from corpus_ingest import load_corpus
    return load_corpus(FIXTURES_DIR / "foreground", "foreground").with_annotations(
        FIXTURES_DIR / "annotations"
    )


@pytest.fixture(scope="session")
def background():
    from corpus_ingest import load_corpus
    return load_corpus(FIXTURES_DIR / "background", "background")


@pytest.fixture(scope="session")
def index(background):
    from commonness import build_index
    return build_index(background, n_max=5)


@pytest.fixture(scope="session")
def responses():
    from candidates import load_responses
    return load_responses(FIXTURES_DIR / "responses.csv")


@pytest.fixture(scope="session")
def blocklist():
    from candidates import load_blocklist
    return load_blocklist(ROOT_DIR / "data" / "spurious_phrases.txt")


@pytest.fixture
def run_config(tmp_path, fixture_paths):
    """Config pointing at the fixture corpus with output in a temp directory"""
    config = Config().with_overrides({
        "paths": dict(fixture_paths, output_dir=str(tmp_path / "output")),
    })
    return config.require_valid()


@pytest.fixture
def run_config_file(tmp_path, fixture_paths):
    """JSON run-config file for driving run.main()"""
    path = tmp_path / "run.json"
    data = {"paths": dict(fixture_paths, output_dir=str(tmp_path / "output")), "seed": 13}
    path.write_text(json.dumps(data), encoding='utf-8')
    return path
