"""JSON schemas for the command-line reports."""

import json
from importlib import resources

NAMES = ("stat", "test_report", "check_verdict", "simulate_summary", "experiment_record", "evd_replicate")


def load(name):
    """Parsed schema ``name`` (one of :data:`NAMES`)."""
    if name not in NAMES:
        raise KeyError(f"unknown schema {name!r}; known: {', '.join(NAMES)}")
    return json.loads(resources.files(__name__).joinpath(f"{name}.json").read_text(encoding="utf-8"))
