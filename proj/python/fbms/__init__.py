"""Morse index and harmonic form checks for free boundary minimal surfaces."""

import json

from ._core import (
    FbmsError,
    Mesh,
    RunConfig,
    exemplar_mesh,
    harmonic_basis,
    morse_index,
    morse_index_mesh,
    read_mesh,
    version,
    write_mesh,
)
from ._core import execute as _execute

__version__ = version()

__all__ = [
    "FbmsError",
    "Mesh",
    "RunConfig",
    "exemplar_mesh",
    "harmonic_basis",
    "morse_index",
    "morse_index_mesh",
    "read_mesh",
    "run",
    "version",
    "write_mesh",
]


def run(subcommand, **options):
    """Run a subcommand in process; returns (exit_code, report dict, summary).

    Options are RunConfig fields, e.g. run("certify", exemplar="disk", resolution=16).
    """
    config = RunConfig()
    config.subcommand = subcommand
    for key, value in options.items():
        if not hasattr(config, key):
            raise TypeError(f"unknown option {key!r}")
        setattr(config, key, value)
    code, report, summary = _execute(config)
    return code, json.loads(report), summary
