import json
from pathlib import Path

import pytest

from incident_atlas import cli
from incident_atlas.model import Dataset

FIXTURE_DIR = Path(__file__).parent / "fixtures" / "pipeline"

_acceptance_results: list[tuple[str, str]] = []


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(name): ties a test to one acceptance criterion"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call":
        return
    marker = item.get_closest_marker("acceptance")
    if marker:
        status = "PASS" if report.passed else "FAIL"
        _acceptance_results.append((marker.args[0], status))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.write_line("")
    for name, status in _acceptance_results:
        terminalreporter.write_line(f"ACCEPTANCE {status}: {name}")


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    return FIXTURE_DIR


@pytest.fixture(scope="session")
def pipeline_build(tmp_path_factory) -> Path:
    """One in-process pipeline run over the bundled fixture, shared by tests."""
    out_dir = tmp_path_factory.mktemp("pipeline-build")
    code = cli.main(
        ["pipeline", "--config", str(FIXTURE_DIR / "config.json"), "--out-dir", str(out_dir)]
    )
    assert code == 0
    return out_dir


@pytest.fixture(scope="session")
def fixture_dataset(pipeline_build) -> Dataset:
    return Dataset.from_dict(json.loads((pipeline_build / "dataset.json").read_text()))


@pytest.fixture(scope="session")
def fixture_atlas(pipeline_build) -> dict:
    return json.loads((pipeline_build / "atlas.json").read_text())
