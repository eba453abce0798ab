import pytest

from cwemap.corpus import load_catalog, load_dataset
from cwemap.ingest import load_records
from cwemap.preprocess import load_gazetteer, load_stopwords

from pathlib import Path

DATA_DIR = Path(__file__).resolve().parents[1] / "data"


@pytest.fixture(scope="session")
def catalog():
    return load_catalog()


@pytest.fixture(scope="session")
def gazetteer():
    return load_gazetteer()


@pytest.fixture(scope="session")
def stopwords():
    return load_stopwords()


@pytest.fixture(scope="session")
def dataset_path():
    return DATA_DIR / "dataset.csv"


@pytest.fixture(scope="session")
def records_path():
    return DATA_DIR / "cve_records.jsonl"


@pytest.fixture(scope="session")
def dataset(dataset_path):
    return load_dataset(dataset_path)


@pytest.fixture(scope="session")
def records(records_path):
    return load_records(records_path)
