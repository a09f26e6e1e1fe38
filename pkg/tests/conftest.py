import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).parent
sys.path.insert(0, str(TESTS_DIR))

TOYPROC = TESTS_DIR / "procs" / "toyproc.py"


@pytest.fixture
def toyproc():
    """Command-line prefix for the configurable toy child process."""

    def make(*extra: str) -> list[str]:
        return [sys.executable, str(TOYPROC), *extra]

    return make


@pytest.fixture
def stub_bridge_cmd():
    def make(dim: int = 8, seed: int = 0, max_length: int = 256) -> list[str]:
        return [
            sys.executable, "-m", "humrank.stub_bridge",
            "--dim", str(dim), "--seed", str(seed), "--max-length", str(max_length),
        ]

    return make


@pytest.fixture
def write_tsv(tmp_path):
    counter = [0]

    def make(rows: list[tuple[str, str]], name: str | None = None) -> Path:
        counter[0] += 1
        path = tmp_path / (name or f"data{counter[0]}.tsv")
        path.write_text("".join(f"{i}\t{t}\n" for i, t in rows), encoding="utf-8")
        return path

    return make
