"""Python interface to the FCT-GAN tabular synthesizer.

Tables are column lists of floats: numeric cells hold their value, categorical
cells hold the category index, missing cells are NaN.
"""

import json

from . import _core
from ._core import DataError, Model, NumericalFault, Schema, SchemaError, Table, plan_resolution

__all__ = [
    "DataError",
    "Model",
    "NumericalFault",
    "Schema",
    "SchemaError",
    "Table",
    "evaluate",
    "gradcheck",
    "plan_resolution",
    "run_cli",
    "train",
]


def train(data, schema, config=None):
    """Fit a model. Returns (model, history) where history is a list of dicts."""
    model, history = _core.train(data, schema, json.dumps(config or {}))
    return model, [json.loads(line) for line in history.splitlines()]


def evaluate(real, synth, schema, test=None, seed=0):
    """Statistical similarity and, with a target column and a test table, ML utility."""
    return json.loads(_core.evaluate(real, synth, schema, test, seed))


def gradcheck(seed=7):
    return [
        {"name": n, "max_rel_error": e, "tolerance": t, "passed": ok}
        for n, e, t, ok in _core.gradcheck(seed)
    ]


def run_cli(*args):
    """Run the command-line tool in-process. Returns (exit_code, stdout, stderr)."""
    return _core.run_cli([str(a) for a in args])
