"""MPFile markup: parsing, canonical serialization, and path lookup.

An MPFile is a plain-text file of nested sections. A section header is a run
of three or more '>' characters followed by the section name and an optional
``# comment``; the number of '>' minus three is the nesting depth. Section
content is a block of ``key: value`` lines and/or one CSV table (header row
first); the two never interleave, and the table is the final content of its
section. Full-line comments (first non-blank character '#') are discarded;
blank lines are ignored.

A content line is a key/value pair when its first ':' occurs before any ',';
otherwise it is a CSV row. Double-quoted values and cells are unwrapped, and
commas are only cell separators outside quotes.

The parser stores cells as raw strings; numeric coercion is a later cleaning
step (see pipeline.clean_table). ``serialize`` emits a canonical form that
reparses to a structurally equal document.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import (
    DepthJump,
    DuplicateKey,
    DuplicateSibling,
    EmptySectionName,
    EmptyTable,
    InvariantViolation,
    MixedContent,
    NotFound,
    OrphanContent,
    RaggedTable,
)

HEADER_RE = re.compile(r"^(>{3,})\s*(.*?)(\s*#\s*(.*))?$")

# A cell is a raw string straight out of the parser, or an int/float after
# table cleaning. The serializer accepts either.
Cell = str | int | float


@dataclass
class DataTable:
    """One CSV table: a header row plus at least one data row."""

    columns: list[str]
    rows: list[list[Cell]]

    @property
    def shape(self) -> tuple[int, int]:
        """(number of columns, number of rows)."""
        return len(self.columns), len(self.rows)


@dataclass
class Section:
    name: str
    depth: int
    comment: str | None = None
    kv: list[tuple[str, str]] = field(default_factory=list)
    children: list["Section"] = field(default_factory=list)
    table: DataTable | None = None

    def child(self, name: str) -> "Section | None":
        for c in self.children:
            if c.name == name:
                return c
        return None


@dataclass
class MPFileDoc:
    roots: list[Section] = field(default_factory=list)

    def root(self, name: str) -> Section | None:
        for r in self.roots:
            if r.name == name:
                return r
        return None


# -- parsing ------------------------------------------------------------------


def _unquote(text: str) -> str:
    if len(text) >= 2 and text[0] == '"' and text[-1] == '"':
        return text[1:-1].replace('""', '"')
    return text


def split_csv_row(line: str) -> list[str]:
    """Split one CSV line into cells, honoring double quotes.

    Cells are trimmed of surrounding whitespace first, then unwrapped if
    fully quoted ('""' inside quotes is an escaped quote).
    """
    cells: list[str] = []
    buf: list[str] = []
    in_quotes = False
    i = 0
    while i < len(line):
        ch = line[i]
        if ch == '"':
            if in_quotes and i + 1 < len(line) and line[i + 1] == '"':
                buf.append('""')
                i += 2
                continue
            in_quotes = not in_quotes
            buf.append(ch)
        elif ch == "," and not in_quotes:
            cells.append("".join(buf))
            buf = []
        else:
            buf.append(ch)
        i += 1
    cells.append("".join(buf))
    return [_unquote(c.strip()) for c in cells]


def _is_kv_line(line: str) -> bool:
    colon = line.find(":")
    if colon == -1:
        return False
    comma = line.find(",")
    return comma == -1 or colon < comma


def parse(text: str) -> MPFileDoc:
    """Parse MPFile text into a document tree.

    Raises ParseError subclasses (DepthJump, DuplicateSibling, RaggedTable,
    EmptySectionName, MixedContent, ...) carrying the offending line number.
    """
    doc = MPFileDoc()
    stack: list[Section] = []

    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip("\r")
        if not line.strip():
            continue

        m = HEADER_RE.match(line)
        if m:
            depth = len(m.group(1)) - 3
            name = m.group(2).strip()
            if not name:
                raise EmptySectionName("section header has no name", line=lineno)
            comment = m.group(4).strip() if m.group(4) else None
            if comment == "":
                comment = None
            if depth > len(stack):
                if not stack:
                    raise DepthJump(
                        f"first section {name!r} starts at depth {depth}, expected 0",
                        line=lineno,
                    )
                raise DepthJump(
                    f"section {name!r} at depth {depth} under a depth-"
                    f"{stack[-1].depth} section",
                    line=lineno,
                )
            del stack[depth:]
            siblings = stack[-1].children if stack else doc.roots
            if any(s.name == name for s in siblings):
                raise DuplicateSibling(
                    f"duplicate sibling section {name!r}", line=lineno
                )
            section = Section(name=name, depth=depth, comment=comment)
            siblings.append(section)
            stack.append(section)
            continue

        if not stack:
            raise OrphanContent("content before any section header", line=lineno)
        if line.lstrip().startswith("#"):
            continue

        current = stack[-1]
        if _is_kv_line(line):
            if current.table is not None:
                raise MixedContent(
                    f"key/value line after table rows in section {current.name!r}",
                    line=lineno,
                )
            key, _, value = line.partition(":")
            key = key.strip()
            if not key:
                raise MixedContent("key/value line with empty key", line=lineno)
            if any(k == key for k, _ in current.kv):
                raise DuplicateKey(
                    f"duplicate key {key!r} in section {current.name!r}", line=lineno
                )
            current.kv.append((key, _unquote(value.strip())))
        else:
            cells = split_csv_row(line)
            if current.table is None:
                current.table = DataTable(columns=cells, rows=[])
            else:
                if len(cells) != len(current.table.columns):
                    raise RaggedTable(
                        f"row has {len(cells)} cells, header has "
                        f"{len(current.table.columns)}",
                        line=lineno,
                    )
                current.table.rows.append(cells)

    _check_tables(doc.roots)
    return doc


def _check_tables(sections: list[Section]) -> None:
    for s in sections:
        if s.table is not None and not s.table.rows:
            raise EmptyTable(f"table in section {s.name!r} has a header but no rows")
        _check_tables(s.children)


# -- canonical serialization --------------------------------------------------


def format_number(value) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def _format_cell(cell) -> str:
    text = cell if isinstance(cell, str) else format_number(cell)
    if not text:
        return text
    if (
        "," in text
        or '"' in text
        or text != text.strip()
        or text[0] in "#>"
    ):
        return '"' + text.replace('"', '""') + '"'
    return text


def _format_value(value: str) -> str:
    if value != value.strip() or (
        len(value) >= 2 and value[0] == '"' and value[-1] == '"'
    ):
        return '"' + value.replace('"', '""') + '"'
    return value


def table_to_csv(table: DataTable) -> str:
    """Canonical CSV text of a table: header then rows, no padding."""
    lines = []
    for row in [table.columns] + table.rows:
        line = ",".join(_format_cell(c) for c in row)
        if not line:
            line = '""'
        lines.append(line)
    return "\n".join(lines)


def serialize(doc: MPFileDoc) -> str:
    """Emit the canonical text form of a document.

    parse(serialize(parse(t))) is structurally equal to parse(t) for every
    parseable t; canonical text is a fixed point of serialize∘parse.
    """
    _validate(doc)
    blocks = [_serialize_section(root) for root in doc.roots]
    return "\n\n".join(blocks) + "\n" if blocks else ""


def _serialize_section(section: Section) -> str:
    header = ">" * (section.depth + 3) + " " + section.name
    if section.comment:
        header += " # " + section.comment
    lines = [header]
    for key, value in section.kv:
        lines.append(f"{key}: {_format_value(value)}".rstrip())
    if section.table is not None:
        lines.append(table_to_csv(section.table))
    for child in section.children:
        lines.append(_serialize_section(child))
    return "\n".join(lines)


def _validate(doc: MPFileDoc) -> None:
    seen: set[str] = set()
    for root in doc.roots:
        if root.depth != 0:
            raise InvariantViolation(f"root section {root.name!r} has depth {root.depth}")
        if root.name in seen:
            raise InvariantViolation(f"duplicate root section {root.name!r}")
        seen.add(root.name)
        _validate_section(root)


def _validate_section(section: Section) -> None:
    name = section.name
    if not name or name != name.strip():
        raise InvariantViolation(f"section name {name!r} is empty or untrimmed")
    if "#" in name or "\n" in name:
        raise InvariantViolation(f"section name {name!r} contains '#' or newline")
    if section.comment is not None:
        c = section.comment
        if not c or c != c.strip() or "\n" in c:
            raise InvariantViolation(f"comment {c!r} is empty, untrimmed, or multiline")
    keys: set[str] = set()
    for key, value in section.kv:
        if key in keys:
            raise InvariantViolation(f"duplicate key {key!r} in section {name!r}")
        keys.add(key)
        if not key or key != key.strip():
            raise InvariantViolation(f"key {key!r} is empty or untrimmed")
        if any(ch in key for ch in ":,\n") or key.startswith("#") or key.startswith(">>>"):
            raise InvariantViolation(f"key {key!r} cannot round-trip")
        if not isinstance(value, str) or "\n" in value:
            raise InvariantViolation(f"value for key {key!r} must be a single-line string")
    if section.table is not None:
        _validate_table(section)
    child_names: set[str] = set()
    for child in section.children:
        if child.depth != section.depth + 1:
            raise InvariantViolation(
                f"child {child.name!r} has depth {child.depth}, parent is {section.depth}"
            )
        if child.name in child_names:
            raise InvariantViolation(f"duplicate sibling section {child.name!r}")
        child_names.add(child.name)
        _validate_section(child)


def _validate_table(section: Section) -> None:
    table = section.table
    if not table.columns:
        raise InvariantViolation(f"table in {section.name!r} has no columns")
    if not table.rows:
        raise InvariantViolation(f"table in {section.name!r} has no rows")
    for row in [table.columns] + table.rows:
        if len(row) != len(table.columns):
            raise InvariantViolation(
                f"ragged row in table of section {section.name!r}"
            )
        for cell in row:
            if isinstance(cell, str) and "\n" in cell:
                raise InvariantViolation("table cell contains a newline")
        line = ",".join(_format_cell(c) for c in row)
        if _is_kv_line(line):
            raise InvariantViolation(
                f"table row {line!r} would reparse as a key/value line"
            )


# -- path lookup ---------------------------------------------------------------


def get_path(doc: MPFileDoc, path: list[str]):
    """Resolve a name path to a Section, a kv value, or a bare DataTable.

    Names resolve level by level through child sections; the final name may
    instead match a key in the last section's kv block. A section holding
    only a table resolves to the table itself.
    """
    if not path:
        raise NotFound("empty path")
    current: Section | None = None
    for i, name in enumerate(path):
        siblings = doc.roots if current is None else current.children
        nxt = next((s for s in siblings if s.name == name), None)
        if nxt is None:
            if current is not None and i == len(path) - 1:
                for key, value in current.kv:
                    if key == name:
                        return value
            raise NotFound(f"path {'.'.join(path)!r} not found at {name!r}")
        current = nxt
    if current.table is not None and not current.kv and not current.children:
        return current.table
    return current
