#!/usr/bin/env python3
"""Regenerates the CSV fixtures under data/fixtures."""
import json
import math
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "data" / "fixtures"


def fmt(x, places=4):
    return f"{x:.{places}f}"


def write(name, header, rows, schema):
    OUT.mkdir(parents=True, exist_ok=True)
    with open(OUT / f"{name}.csv", "w", newline="") as f:
        f.write(",".join(header) + "\n")
        for r in rows:
            f.write(",".join(r) + "\n")
    with open(OUT / f"{name}.schema.json", "w") as f:
        json.dump(schema, f, indent=2)
        f.write("\n")


def bimodal(rng, n=2000):
    rows = []
    for _ in range(n):
        if rng.random() < 0.5:
            x, label = rng.gauss(-3.0, 0.5), "a"
        else:
            x, label = rng.gauss(3.0, 0.5), "b"
        rows.append([fmt(x), label])
    schema = {
        "columns": [
            {"name": "x", "kind": "continuous"},
            {"name": "label", "kind": "categorical", "vocabulary": ["a", "b"],
             "target": True, "task": "classification"},
        ]
    }
    write("bimodal", ["x", "label"], rows, schema)


def mixed(rng, n=1000):
    rows = []
    for _ in range(n):
        colour = rng.choices(["red", "green", "blue"], weights=[5, 3, 2])[0]
        income = rng.lognormvariate(10.0, 0.4)
        u = rng.random()
        if u < 0.15:
            debt = ""
        elif u < 0.40:
            debt = "-1"
        else:
            debt = fmt(rng.gauss(5.0, 1.0), 3)
        age = str(rng.randint(18, 90))
        score = 0.8 * math.log(income) + (0.5 if colour == "red" else 0.0) + rng.gauss(0, 0.3)
        churn = "yes" if score > 8.4 else "no"
        rows.append([fmt(income, 2), colour, debt, age, churn])
    schema = {
        "columns": [
            {"name": "income", "kind": "continuous"},
            {"name": "colour", "kind": "categorical", "vocabulary": ["red", "green", "blue"]},
            {"name": "debt", "kind": "mixed", "specials": [-1], "missing": True},
            {"name": "age", "kind": "minmax"},
            {"name": "churn", "kind": "categorical", "vocabulary": ["no", "yes"],
             "target": True, "task": "classification"},
        ],
        "missing_token": "",
    }
    write("mixed", ["income", "colour", "debt", "age", "churn"], rows, schema)


def small(rng, n=200):
    rows = []
    for _ in range(n):
        x = rng.gauss(0.0, 1.0)
        g = rng.choice(["u", "v"])
        y = 3.0 * x + (1.0 if g == "u" else -1.0) + rng.gauss(0.0, 0.2)
        rows.append([fmt(x), g, fmt(y)])
    schema = {
        "columns": [
            {"name": "x", "kind": "continuous", "max_modes": 4},
            {"name": "group", "kind": "categorical", "vocabulary": ["u", "v"]},
            {"name": "y", "kind": "continuous", "target": True, "task": "regression"},
        ]
    }
    write("small", ["x", "group", "y"], rows, schema)


if __name__ == "__main__":
    bimodal(random.Random(20240601))
    mixed(random.Random(20240602))
    small(random.Random(20240603))
