"""Contract JSON files and the human-readable block format.

The JSON interchange format, used by the CLI and the HTTP service::

    {
      "input_vars": ["i"],
      "output_vars": ["o"],
      "assumptions": ["|i| <= 2"],
      "guarantees": ["o - i <= 0", "i - 2 o <= 2"]
    }

Constraint strings use the grammar of :mod:`contractforge.parser`.
"""

from __future__ import annotations

import json
from pathlib import Path

from .contracts import PolyhedralContract, new_contract
from .errors import ConfigError
from .parser import render

BLOCK_PRECISION = 6


def contract_from_dict(data: dict) -> PolyhedralContract:
    try:
        inputs = data["input_vars"]
        outputs = data["output_vars"]
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"contract JSON needs input_vars/output_vars: {exc}") from exc
    return new_contract(inputs, outputs, data.get("assumptions", []), data.get("guarantees", []))


def contract_to_dict(c: PolyhedralContract) -> dict:
    return {
        "input_vars": list(c.inputs),
        "output_vars": list(c.outputs),
        "assumptions": render(c.assumptions),
        "guarantees": render(c.guarantees),
    }


def load_contract(path: str | Path) -> PolyhedralContract:
    with open(path) as fh:
        return contract_from_dict(json.load(fh))


def save_contract(c: PolyhedralContract, path: str | Path) -> None:
    Path(path).write_text(json.dumps(contract_to_dict(c), indent=2) + "\n")


def format_block(c: PolyhedralContract, precision: int = BLOCK_PRECISION) -> str:
    """The InVars/OutVars/A/G block, numbers display-rounded."""
    lines = [
        "InVars: [" + ", ".join(c.inputs) + "]",
        "OutVars:[" + ", ".join(c.outputs) + "]",
        "A: [",
        *(f"  {s}" for s in render(c.assumptions, precision)),
        "]",
        "G: [",
        *(f"  {s}" for s in render(c.guarantees, precision)),
        "]",
    ]
    return "\n".join(lines)
