import pytest

from tabletalk.bench import cities_csv_path, cities_rules_path
from tabletalk.table import load_csv


@pytest.fixture(scope="session")
def cities_table():
    return load_csv(cities_csv_path(), name="cities")


@pytest.fixture(scope="session")
def cities_rules():
    return cities_rules_path()
