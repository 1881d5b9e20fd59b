"""Shared fixtures: one synthetic corpus per session, plus an acceptance
summary hook that prints a pass/fail line per acceptance criterion."""

from __future__ import annotations

import pytest

from riskrel import corpus, synthetic


@pytest.fixture(scope="session")
def fixture_manifest(tmp_path_factory):
    root = tmp_path_factory.mktemp("fixture")
    return synthetic.write_fixture(root)


@pytest.fixture(scope="session")
def fixture_paragraphs(fixture_manifest):
    return corpus.ingest_directory(fixture_manifest.filings_dir)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance" not in nodeid:
                continue
            if getattr(report, "when", "call") not in ("call", "setup"):
                continue
            if outcome != "passed" or report.when == "call":
                name = nodeid.split("::")[-1]
                status = "PASS" if outcome == "passed" else "FAIL"
                lines.append((name, status))
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, status in sorted(set(lines)):
            terminalreporter.write_line(f"{status}  {name}")
