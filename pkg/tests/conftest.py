import json
from pathlib import Path

import pytest

from qfs_forge import corpus

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"

# filled by tests/test_acceptance.py, printed at the end of the run
ACCEPTANCE_RESULTS = {}


def load_raw_records():
    with (FIXTURES / "raw_records.jsonl").open(encoding="utf-8") as f:
        return [corpus.RawRecord.from_dict(json.loads(line)) for line in f if line.strip()]


@pytest.fixture(scope="session")
def raw_records():
    return load_raw_records()


@pytest.fixture(scope="session")
def fixture_examples(raw_records):
    examples, _ = corpus.ingest(raw_records)
    return examples


@pytest.fixture(scope="session")
def fixture_clusters():
    with (FIXTURES / "clusters.jsonl").open(encoding="utf-8") as f:
        return [corpus.Cluster.from_dict(json.loads(line)) for line in f if line.strip()]


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: int(k.split()[0][2:])):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key}  {detail}")
