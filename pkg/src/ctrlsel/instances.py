"""Reading and writing instance files.

An instance is a JSON document:

    {
      "name": "demo",           optional
      "n": 3,
      "m": 2,
      "a_pattern": [[1, 1], [2, 1]],
      "b_pattern": [[1, 1, 5], [3, 2, 1, 2]]
    }

Each b_pattern entry is [i, j, cost] with an integer cost, or
[i, j, numerator, denominator] for an exact non-integer rational.
Writing then reading a system round-trips exactly.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Union

from .errors import CtrlselError
from .graphs import StructuredSystem


class InstanceParseError(CtrlselError):
    """Malformed instance file; the message states where."""


def _parse_pair(entry, where: str) -> tuple[int, int]:
    if (
        not isinstance(entry, list)
        or len(entry) != 2
        or not all(isinstance(v, int) for v in entry)
    ):
        raise InstanceParseError(f"{where}: expected [i, j], got {entry!r}")
    return entry[0], entry[1]


def _parse_link(entry, where: str) -> tuple[int, int, Fraction]:
    if not isinstance(entry, list) or len(entry) not in (3, 4):
        raise InstanceParseError(
            f"{where}: expected [i, j, cost] or [i, j, num, den], got {entry!r}"
        )
    if not all(isinstance(v, int) for v in entry):
        raise InstanceParseError(f"{where}: entries must be integers, got {entry!r}")
    if len(entry) == 3:
        cost = Fraction(entry[2])
    else:
        if entry[3] == 0:
            raise InstanceParseError(f"{where}: zero denominator")
        cost = Fraction(entry[2], entry[3])
    return entry[0], entry[1], cost


def loads_instance(text: str, source: str = "<string>") -> StructuredSystem:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceParseError(
            f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise InstanceParseError(f"{source}: top level must be an object")
    for key in ("n", "m", "a_pattern", "b_pattern"):
        if key not in doc:
            raise InstanceParseError(f"{source}: missing field {key!r}")
    n, m = doc["n"], doc["m"]
    if not isinstance(n, int) or not isinstance(m, int):
        raise InstanceParseError(f"{source}: n and m must be integers")
    a_pattern = [
        _parse_pair(e, f"{source}: a_pattern[{idx}]")
        for idx, e in enumerate(doc["a_pattern"])
    ]
    links = [
        _parse_link(e, f"{source}: b_pattern[{idx}]")
        for idx, e in enumerate(doc["b_pattern"])
    ]
    b_pattern = [(i, j) for i, j, _w in links]
    if len(set(b_pattern)) != len(b_pattern):
        raise InstanceParseError(f"{source}: duplicate b_pattern entries")
    costs = {(i, j): w for i, j, w in links}
    name = doc.get("name", "")
    if not isinstance(name, str):
        raise InstanceParseError(f"{source}: name must be a string")
    try:
        return StructuredSystem.create(
            n=n, m=m, a_pattern=a_pattern, b_pattern=b_pattern, costs=costs, name=name
        )
    except ValueError as exc:
        raise InstanceParseError(f"{source}: {exc}") from exc


def load_instance(path: Union[str, Path]) -> StructuredSystem:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InstanceParseError(f"{path}: {exc}") from exc
    return loads_instance(text, source=str(path))


def dumps_instance(sys: StructuredSystem) -> str:
    b_entries = []
    for (i, j) in sorted(sys.b_pattern):
        w = sys.costs[(i, j)]
        if w.denominator == 1:
            b_entries.append([i, j, w.numerator])
        else:
            b_entries.append([i, j, w.numerator, w.denominator])
    # one entry per line, entries themselves compact, so files stay
    # pleasant to write and diff by hand
    a_text = ",\n    ".join(json.dumps(list(e)) for e in sorted(sys.a_pattern))
    b_text = ",\n    ".join(json.dumps(e) for e in b_entries)
    return (
        "{\n"
        f'  "name": {json.dumps(sys.name)},\n'
        f'  "n": {sys.n},\n'
        f'  "m": {sys.m},\n'
        f'  "a_pattern": [\n    {a_text}\n  ],\n'
        f'  "b_pattern": [\n    {b_text}\n  ]\n'
        "}\n"
    )


def dump_instance(sys: StructuredSystem, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps_instance(sys))
