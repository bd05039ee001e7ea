"""Reading and writing the JSON forms of the package's value types."""

from __future__ import annotations

import json
import sys
from pathlib import Path

from .cadlag import StepFunction, TimeChange
from .errors import ValidationError


def read_json(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from None


def kind_of(data):
    """Name of the type a parsed JSON document describes."""
    if isinstance(data, dict):
        if "t_breakpoints" in data:
            return "nested"
        if "breakpoints" in data:
            return "scalar"
        if "knots" in data:
            return "timechange"
        if "paths" in data:
            return "ensemble"
        if "alpha" in data:
            return "config"
    raise ValidationError("unrecognised document; expected a step function, nested path, "
                          "time change, ensemble or simulation config")


def load(path, expect=None):
    """Parse ``path`` into a value object; ``expect`` restricts the accepted kinds."""
    from .diagnostics import PathEnsemble
    from .nested import NestedPath
    from .simulate import SimConfig

    data = read_json(path)
    kind = kind_of(data)
    if expect is not None and kind not in expect:
        raise ValidationError(f"{path} holds a {kind} document, expected {' or '.join(expect)}")
    parser = {"scalar": StepFunction.from_json, "nested": NestedPath.from_json,
              "timechange": TimeChange.from_json, "ensemble": PathEnsemble.from_json,
              "config": SimConfig.from_json}[kind]
    try:
        return parser(data)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def dumps(data):
    # floats go through repr, so values round-trip bit-exactly
    return json.dumps(data, indent=2) + "\n"


def emit(text, out=None):
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise ValidationError(f"cannot write {out}: {exc.strerror or exc}") from None
