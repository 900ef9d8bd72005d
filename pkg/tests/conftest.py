import sys
from pathlib import Path

import pytest

import flowlab
from flowlab.flowdata import DEFAULT_SCHEMA, load_flow_csv

sys.path.insert(0, str(Path(__file__).parent))  # make `oracles` importable

FIXTURE_CSV = Path(flowlab.__file__).parent / "data" / "synthetic_1000.csv"

TWO_ROWS = "L4_DST_PORT,L7_PROTO,TCP_FLAGS,Label,Attack\n80,7.0,25,0,Benign\n53,5.0,0,1,Exploits\n"


@pytest.fixture(scope="session")
def fixture_csv() -> Path:
    assert FIXTURE_CSV.is_file(), "bundled fixture missing from the package"
    return FIXTURE_CSV


@pytest.fixture(scope="session")
def fixture_table(fixture_csv):
    return load_flow_csv(fixture_csv, DEFAULT_SCHEMA)


@pytest.fixture
def two_row_csv(tmp_path) -> Path:
    path = tmp_path / "two_rows.csv"
    path.write_text(TWO_ROWS, encoding="utf-8")
    return path
