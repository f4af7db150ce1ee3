from pathlib import Path


def fixtures_dir() -> Path:
    """Directory holding the bundled benchmark fixtures."""
    return Path(__file__).parent / "fixtures"


def mini_manifest_path() -> Path:
    return fixtures_dir() / "mini" / "manifest.json"


def mini_gold_rules_path() -> Path:
    return fixtures_dir() / "mini" / "gold_rules.json"


def edges_manifest_path() -> Path:
    return fixtures_dir() / "edges" / "manifest.json"


def edges_gold_rules_path() -> Path:
    return fixtures_dir() / "edges" / "gold_rules.json"


def cities_csv_path() -> Path:
    return fixtures_dir() / "cities" / "cities.csv"


def cities_rules_path() -> Path:
    return fixtures_dir() / "cities" / "rules.json"
