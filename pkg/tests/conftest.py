from __future__ import annotations

from pathlib import Path

import pytest


@pytest.fixture(scope="session")
def problems_dir() -> Path:
    return Path(__file__).resolve().parents[1] / "problems"
