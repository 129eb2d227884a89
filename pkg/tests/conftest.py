import os
from pathlib import Path

import numpy as np
import pytest

from gbgpp.core import Dataset

REPO = Path(__file__).resolve().parents[1]
DATA_DIR = Path(os.environ.get("GBGPP_DATA_DIR", REPO / "data"))


def data_file(stem: str) -> Path | None:
    for ext in (".csv", ".libsvm", ".txt", ""):
        p = DATA_DIR / f"{stem}{ext}"
        if p.is_file():
            return p
    return None


def toy_1d() -> Dataset:
    """{0,0,1,1} labelled 0 and {10,10} labelled 1."""
    X = np.array([[0.0], [0.0], [1.0], [1.0], [10.0], [10.0]])
    y = np.array([0, 0, 0, 0, 1, 1])
    return Dataset(X, y, name="toy")


@pytest.fixture
def toy():
    return toy_1d()


# one verdict line per acceptance criterion, printed after the run
VERDICTS: dict[str, tuple[bool, str]] = {}


class verdict:
    """Context manager recording whether the enclosed acceptance check passed."""

    def __init__(self, cid: str, title: str):
        self.cid, self.title = cid, title
        self.detail = ""

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        ok = exc_type is None
        note = self.detail
        message = str(exc).split("\nassert")[0].strip() if exc is not None else ""
        if message and message not in note:
            note = f"{note} {message}".strip()
        VERDICTS[self.cid] = (ok, f"{self.title}: {note}" if note else self.title)
        line = f"[{'PASS' if ok else 'FAIL'}] {self.cid} {VERDICTS[self.cid][1]}"
        print(line)
        return False


def require_data(*stems: str) -> dict:
    missing = [s for s in stems if data_file(s) is None]
    if missing:
        raise AssertionError(
            f"dataset file(s) {', '.join(missing)} not found in {DATA_DIR} "
            "(set GBGPP_DATA_DIR to a directory holding them)"
        )
    from gbgpp.io import load_dataset

    return {s: load_dataset(data_file(s), name=s) for s in stems}


def pytest_terminal_summary(terminalreporter):
    if not VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(VERDICTS, key=lambda c: int(c[1:])):
        ok, text = VERDICTS[cid]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {cid} {text}")
