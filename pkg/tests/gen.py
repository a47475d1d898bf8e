"""Seeded random generator of valid MPFile documents.

Independent of production serialization logic: used as the oracle for the
round-trip properties. Generated content stays inside the grammar's
unambiguous core (names without '#', keys without ':' or ',', first-column
cells without ':').
"""

from __future__ import annotations

import random
import string

from matcontrib.mpfile import DataTable, MPFileDoc, Section

NAME_CHARS = string.ascii_letters + string.digits + " _-"
VALUE_CHARS = string.ascii_letters + string.digits + " _-.:,()/+%"
CELL_CHARS = string.ascii_letters + string.digits + " _-.()/+"


def _name(rng: random.Random, taken: set[str]) -> str:
    while True:
        n = rng.randint(1, 12)
        s = "".join(rng.choice(NAME_CHARS) for _ in range(n)).strip()
        if s and s not in taken:
            taken.add(s)
            return s


def _value(rng: random.Random) -> str:
    n = rng.randint(0, 16)
    return "".join(rng.choice(VALUE_CHARS) for _ in range(n)).strip()


def _cell(rng: random.Random, first_column: bool) -> str:
    if rng.random() < 0.5:
        # numeric-looking cell
        if rng.random() < 0.5:
            return str(rng.randint(-9999, 9999))
        return f"{rng.uniform(-100, 100):.4f}"
    chars = CELL_CHARS if first_column else CELL_CHARS + ",:"
    n = rng.randint(0, 10)
    return "".join(rng.choice(chars) for _ in range(n)).strip()


def _table(rng: random.Random) -> DataTable:
    ncols = rng.randint(1, 4)
    nrows = rng.randint(1, 5)
    columns = [_cell(rng, j == 0) for j in range(ncols)]
    if ncols == 1 and not columns[0]:
        columns[0] = "c"
    rows = [[_cell(rng, j == 0) for j in range(ncols)] for _ in range(nrows)]
    return DataTable(columns=columns, rows=rows)


def random_section(rng: random.Random, depth: int, taken: set[str]) -> Section:
    section = Section(name=_name(rng, taken), depth=depth)
    if rng.random() < 0.3:
        section.comment = _value(rng) or None
    if rng.random() < 0.5:
        keys: set[str] = set()
        for _ in range(rng.randint(1, 4)):
            key = _name(rng, keys)
            section.kv.append((key, _value(rng)))
    if rng.random() < 0.35:  # may follow a kv block: the table comes last
        section.table = _table(rng)
    if depth < 3 and rng.random() < (0.6 if depth == 0 else 0.35):
        names: set[str] = set()
        for _ in range(rng.randint(1, 3)):
            section.children.append(random_section(rng, depth + 1, names))
    return section


def random_doc(rng: random.Random) -> MPFileDoc:
    names: set[str] = set()
    return MPFileDoc(
        roots=[random_section(rng, 0, names) for _ in range(rng.randint(1, 3))]
    )
