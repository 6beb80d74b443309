from pathlib import Path

import pytest

from statesum import default_ontology, load_multiwoz

FIXTURE_CORPUS = Path(__file__).parent / "data" / "mini_multiwoz"


@pytest.fixture(scope="session")
def ont():
    return default_ontology()


@pytest.fixture(scope="session")
def mini_corpus():
    return load_multiwoz(FIXTURE_CORPUS, version="2.1")
