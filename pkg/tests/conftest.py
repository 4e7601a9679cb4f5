import json
import pathlib

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fig1_labels():
    """Element labels of the fig1 formula mapped to preorder ids of build_structure."""
    return json.loads((FIXTURES / "fig1_labels.json").read_text())
