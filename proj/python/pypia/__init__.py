"""Phase-integral approximations for coupled second-order systems."""

import json
from importlib import resources

from ._pypia import (
    Engine,
    PiaError,
    Problem,
    differentiate,
    evaluate,
    example_json,
    example_names,
    run_cli,
    scalar_corrections,
)

__all__ = [
    "Engine",
    "PiaError",
    "Problem",
    "differentiate",
    "evaluate",
    "example",
    "example_json",
    "example_names",
    "run_cli",
    "scalar_corrections",
    "verify",
    "verify_schema",
]


def example(name):
    return json.loads(example_json(name))


def verify(check, **options):
    """Run `pia verify --check <check>` and return (exit_code, report)."""
    args = ["verify", "--check", check]
    for key, value in options.items():
        flag = "--" + key.replace("_", "-")
        values = value if isinstance(value, (list, tuple)) else [value]
        for v in values:
            args += [flag, str(v)]
    code, out, err = run_cli(args)
    if code not in (0, 4):
        raise PiaError(err.strip())
    return code, json.loads(out)


def verify_schema():
    return json.loads(resources.files(__package__).joinpath("verify_report.schema.json").read_text())
