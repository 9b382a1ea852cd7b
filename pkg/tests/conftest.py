import json
from pathlib import Path

import pytest

_GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def golden():
    """Loader for the frozen reference values in tests/golden/."""

    def load(name: str):
        with open(_GOLDEN / f"{name}.json") as fh:
            return json.load(fh)

    return load
