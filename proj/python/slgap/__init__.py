"""Spectral gap tools for weighted Dirichlet Sturm-Liouville problems.

Each command takes the same JSON document the ``slgap`` CLI reads, as a dict,
and returns the parsed result. Artifacts (CSV, JSON) go to ``out_dir``, or to a
temporary directory that is removed afterwards when ``out_dir`` is None.
"""

from __future__ import annotations

import json
import os
import tempfile
from typing import Any

from ._core import COMMANDS, execute

__all__ = ["COMMANDS", "run", *COMMANDS]
__version__ = "0.1.0"


def run(command: str, problem: dict[str, Any], out_dir: str | os.PathLike | None = None, **options: Any) -> dict:
    """Run ``command`` on ``problem``. Raises ValueError on invalid input and
    RuntimeError on solver failure."""
    text = json.dumps(problem)
    if out_dir is not None:
        return json.loads(execute(command, text, os.fspath(out_dir), **options))
    with tempfile.TemporaryDirectory(prefix="slgap_") as tmp:
        return json.loads(execute(command, text, tmp, **options))


def _command(name: str):
    def call(problem: dict[str, Any], out_dir: str | os.PathLike | None = None, **options: Any) -> dict:
        return run(name, problem, out_dir, **options)

    call.__name__ = name
    call.__doc__ = f"Run the ``{name}`` command; see :func:`run`."
    return call


for _name in COMMANDS:
    globals()[_name] = _command(_name)
del _name
