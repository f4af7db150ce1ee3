"""Deterministic generator for the bundled benchmark fixtures.

Running ``python -m tabletalk.bench.generate`` rewrites the committed
fixture files from a fixed seed: three CSV datasets sized to cover every
accuracy bucket, one manifest of templated cases whose ground truths are
recomputed by brute force from the loaded tables, and a gold rule file
mapping each question to its reference plan.

The generator is pure given its seed, so regenerating must reproduce the
committed bytes exactly; a test holds it to that.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
from pathlib import Path

from ..checker import DEFAULT_MARGIN
from ..table import load_csv, size_category
from . import fixtures_dir
from .templates import oracle_answer, template

DEFAULT_SEED = 7

CITY_NAMES = (
    "Aberdeen", "Bristol", "Cardiff", "Derby", "Exeter", "Falmouth", "Glasgow",
    "Harrogate", "Inverness", "Jarrow", "Keswick", "Lancaster", "Margate",
    "Norwich", "Oxford", "Plymouth", "Reading", "Salisbury", "Truro", "York",
)
REGIONS = ("North", "South", "East", "West", "Central")
PRODUCTS = ("Widget", "Gadget", "Sprocket", "Flange", "Gizmo", "Doohickey", "Bracket", "Spindle")
DEPARTMENTS = ("Engineering", "Sales", "Marketing", "Support", "Finance", "Operations")
CLOUD_KINDS = ("Sun", "PartShade", "Shade")


def _inject_missing(header: list[str], rows: list[list[str]], spec: dict[str, int], rng: random.Random) -> None:
    for col, count in spec.items():
        idx = header.index(col)
        for row_i in rng.sample(range(len(rows)), count):
            rows[row_i][idx] = ""


def make_weather(rng: random.Random) -> tuple[list[str], list[list[str]]]:
    header = ["City", "Temp", "Humidity", "Wind", "Clouds"]
    rows = [
        [
            rng.choice(CITY_NAMES),
            f"{rng.uniform(-5, 42):.1f}",
            f"{rng.uniform(10, 95):.1f}",
            f"{rng.uniform(0, 30):.1f}",
            rng.choice(CLOUD_KINDS),
        ]
        for _ in range(60)
    ]
    # distinct counts so "most missing" has a unique answer
    _inject_missing(header, rows, {"Temp": 7, "Humidity": 5, "Wind": 4, "Clouds": 6}, rng)
    return header, rows


def make_sales(rng: random.Random) -> tuple[list[str], list[list[str]]]:
    header = ["Region", "Product", "AdSpend", "Units", "Revenue"]
    rows = []
    for _ in range(165):
        ad_spend = rng.uniform(50, 950)
        revenue = 3.2 * ad_spend + 200 + rng.gauss(0, 120)
        rows.append(
            [
                rng.choice(REGIONS),
                rng.choice(PRODUCTS),
                f"{ad_spend:.2f}",
                str(rng.randrange(1, 500)),
                f"{revenue:.2f}",
            ]
        )
    _inject_missing(header, rows, {"AdSpend": 14, "Units": 17, "Revenue": 9}, rng)
    return header, rows


def make_people(rng: random.Random) -> tuple[list[str], list[list[str]]]:
    header = ["Name", "Department", "Age", "Salary", "YearsExperience"]
    rows = []
    for i in range(240):
        age = rng.randrange(21, 66)
        years = max(0, age - 22 - rng.randrange(0, 6))
        salary = 28000 + 1400 * years + rng.gauss(0, 3000)
        rows.append(
            [
                f"Person{i + 1:03d}",
                rng.choice(DEPARTMENTS),
                str(age),
                f"{salary:.2f}",
                str(years),
            ]
        )
    _inject_missing(header, rows, {"Age": 25, "Salary": 19, "YearsExperience": 22}, rng)
    return header, rows


def write_csv(path: Path, header: list[str], rows: list[list[str]]) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _dump_json(path: Path, obj: object) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


_DIFFICULTY = {
    "rows": "easy",
    "cols": "easy",
    "missing_in": "easy",
    "distinct": "easy",
    "most_common": "easy",
    "stat_mean": "easy",
    "stat_median": "easy",
    "stat_std": "easy",
    "stat_sum": "easy",
    "stat_range": "easy",
    "stat_min": "easy",
    "stat_max": "easy",
    "most_missing": "medium",
    "count_above": "medium",
    "top_k": "medium",
    "which_extreme": "medium",
    "corr_between": "hard",
    "group_mean": "hard",
    "predict": "hard",
}

# (dataset, template, params, margin override)
MINI_CASES = (
    ("weather", "rows", {}, 0.0),
    ("weather", "stat_mean", {"col": "Temp"}, None),
    ("weather", "stat_median", {"col": "Humidity"}, None),
    ("weather", "stat_std", {"col": "Wind"}, None),
    ("weather", "most_missing", {}, None),
    ("weather", "which_extreme", {"ret": "City", "direction": "highest", "col": "Temp"}, None),
    ("weather", "count_above", {"col": "Temp", "v": 30.0}, None),
    ("weather", "group_mean", {"target": "Temp", "by": "Clouds"}, None),
    ("weather", "most_common", {"col": "Clouds"}, None),
    ("weather", "corr_between", {"x": "Temp", "y": "Humidity"}, None),
    ("sales", "cols", {}, None),
    ("sales", "stat_mean", {"col": "Revenue"}, None),
    ("sales", "stat_median", {"col": "AdSpend"}, None),
    ("sales", "stat_sum", {"col": "Units"}, None),
    ("sales", "missing_in", {"col": "AdSpend"}, None),
    ("sales", "distinct", {"col": "Product"}, None),
    ("sales", "corr_between", {"x": "AdSpend", "y": "Revenue"}, None),
    ("sales", "predict", {"y": "Revenue", "x": "AdSpend", "v": 500.0}, None),
    ("sales", "top_k", {"k": 3, "ret": "Product", "col": "Revenue"}, None),
    ("sales", "which_extreme", {"ret": "Region", "direction": "highest", "col": "Revenue"}, None),
    ("people", "rows", {}, 0.0),
    ("people", "stat_max", {"col": "Salary"}, None),
    ("people", "stat_min", {"col": "Age"}, None),
    ("people", "stat_range", {"col": "Salary"}, None),
    ("people", "distinct", {"col": "Department"}, None),
    ("people", "group_mean", {"target": "Salary", "by": "Department"}, None),
    ("people", "which_extreme", {"ret": "Name", "direction": "highest", "col": "Salary"}, None),
    ("people", "top_k", {"k": 5, "ret": "Name", "col": "Age"}, None),
    ("people", "count_above", {"col": "Salary", "v": 50000.0}, None),
    ("people", "missing_in", {"col": "YearsExperience"}, None),
)

_MINI_DATASETS = (
    ("weather", "Small", make_weather),
    ("sales", "Medium", make_sales),
    ("people", "Large", make_people),
)


def _truth_json(question: str, table, margin: float | None) -> dict:
    truth = oracle_answer(question, table)
    value = truth.value
    if isinstance(value, tuple):
        value = list(value)
    out: dict = {"kind": truth.kind, "value": value}
    if margin is not None and margin != DEFAULT_MARGIN:
        out["margin"] = margin
    return out


def _add_rule(rules: dict[str, str], question: str, plan: str) -> None:
    if rules.setdefault(question, plan) != plan:
        raise ValueError(f"conflicting plans for question {question!r}")


def build_mini(out_dir: Path, seed: int = DEFAULT_SEED) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = random.Random(seed)
    tables = {}
    dataset_entries = []
    for ds_id, size, builder in _MINI_DATASETS:
        header, rows = builder(rng)
        path = out_dir / f"{ds_id}.csv"
        write_csv(path, header, rows)
        table = load_csv(path, name=ds_id)
        if size_category(table).value != size:
            raise ValueError(f"{ds_id} generated with the wrong row count")
        tables[ds_id] = table
        dataset_entries.append({"id": ds_id, "path": f"{ds_id}.csv", "size": size})

    case_entries = []
    rules: dict[str, str] = {}
    counters: dict[str, int] = {}
    for ds_id, tpl_name, params, margin in MINI_CASES:
        tpl = template(tpl_name)
        question = tpl.question(**params)
        counters[ds_id] = counters.get(ds_id, 0) + 1
        case_entries.append(
            {
                "id": f"{ds_id}-{counters[ds_id]:02d}",
                "dataset": ds_id,
                "question": question,
                "difficulty": _DIFFICULTY[tpl_name],
                "order_insensitive": False,
                "truth": _truth_json(question, tables[ds_id], margin),
            }
        )
        _add_rule(rules, question, tpl.plan(**params))

    _dump_json(out_dir / "manifest.json", {"datasets": dataset_entries, "cases": case_entries})
    _dump_json(
        out_dir / "gold_rules.json",
        {"rules": [{"match": f"Question: {q}", "response": plan} for q, plan in rules.items()]},
    )


def make_complete(**_: object) -> tuple[list[str], list[list[str]]]:
    header = ["Item", "Grade", "Score"]
    rows = [
        [f"Item{i + 1:02d}", "ABC"[i % 3], f"{50 + 3.5 * i:.1f}"]
        for i in range(12)
    ]
    return header, rows


def build_edges(out_dir: Path) -> None:
    """A gapless table plus the questions that trip on it."""
    out_dir.mkdir(parents=True, exist_ok=True)
    header, rows = make_complete()
    write_csv(out_dir / "complete.csv", header, rows)

    median_q = template("stat_median").question(col="Grade")
    missing_q = template("most_missing").question()
    manifest = {
        "datasets": [{"id": "complete", "path": "complete.csv", "size": "Small"}],
        "cases": [
            {
                "id": "edge-median-categorical",
                "dataset": "complete",
                "question": median_q,
                "difficulty": "edge",
                "order_insensitive": False,
                "truth": {"kind": "number", "value": 0.0},
            },
            {
                "id": "edge-most-missing",
                "dataset": "complete",
                "question": missing_q,
                "difficulty": "edge",
                "order_insensitive": False,
                "truth": {"kind": "text", "value": "Item"},
            },
        ],
    }
    rules = {
        "rules": [
            {
                "match": f"Question: {median_q}",
                "response": template("stat_median").plan(col="Grade"),
            },
            {
                "match": f"Question: {missing_q}",
                "response": template("most_missing").plan(),
            },
        ]
    }
    _dump_json(out_dir / "manifest.json", manifest)
    _dump_json(out_dir / "gold_rules.json", rules)


def build_cities_rules(out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    tpl = template("which_extreme")
    params = {"ret": "City", "direction": "highest", "col": "Temp"}
    rules = {
        "rules": [
            {
                "match": f"Question: {tpl.question(**params)}",
                "response": tpl.plan(**params),
            }
        ],
        "default": "The answer is probably Dubai.",
    }
    _dump_json(out_dir / "rules.json", rules)


def build_all(root: Path, seed: int = DEFAULT_SEED) -> None:
    build_mini(root / "mini", seed)
    build_edges(root / "edges")
    build_cities_rules(root / "cities")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="regenerate the bundled benchmark fixtures")
    parser.add_argument("--out", type=Path, default=fixtures_dir())
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    args = parser.parse_args(argv)
    build_all(args.out, args.seed)
    print(f"fixtures written under {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
