import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fuzzyreserve import load_taylor_ashe  # noqa: E402


@pytest.fixture(scope="session")
def ta():
    return load_taylor_ashe()
