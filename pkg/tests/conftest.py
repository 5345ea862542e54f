import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from infoimb.ingest import AlignedPanel, Frequency  # noqa: E402
from infoimb.synth import business_days  # noqa: E402


def make_panel(columns: dict, target: str | None = None) -> AlignedPanel:
    names = list(columns)
    raw = np.column_stack([np.asarray(columns[c], float) for c in names])
    return AlignedPanel.from_raw(business_days(raw.shape[0]), names, raw, target or names[0], Frequency.DAILY)


def write_rows(path: Path, header: list[str], rows: list[list]) -> Path:
    lines = [",".join(header)] + [",".join(str(c) for c in r) for r in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(12345))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
