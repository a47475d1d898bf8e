"""Turn parsed documents into atomic per-material contributions.

Each non-"general" root section becomes one contribution draft. When the
first root is named "general", its content is shared across all drafts, with
each root's own local "general" subsection taking precedence. Tables are
cleaned (trimmed, empty rows/columns dropped, numbers coerced) and a size
policy keeps submissions at desk scale.
"""

from __future__ import annotations

import copy
import hashlib
import json
import math
import re
import secrets
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable, Union

from .errors import (
    DuplicateColumn,
    DuplicateTableName,
    EmptyDocument,
    EmptyTable,
    GeneralOnly,
    IdExhaustion,
    OversizeContribution,
    PipelineError,
)
from .identifier import MaterialId, canonical_key, classify
from .mpfile import DataTable, MPFileDoc, Section

HierData = dict[str, Union[str, "HierData"]]

GENERAL_SECTION = "general"
BARE_TABLE_NAME = "data"
CID_KEY = "cid"
CID_RE = re.compile(r"[0-9a-f]{24}")

SIZE_OK_BYTES = 200 * 1024
SIZE_WARN_BYTES = 1024 * 1024

_NUMBER_RE = re.compile(r"[+-]?([0-9]+(\.[0-9]*)?|\.[0-9]+)([eE][+-]?[0-9]+)?")
_INT_RE = re.compile(r"[+-]?[0-9]+")


@dataclass
class ContributionDraft:
    """One root section's data, ready to be stored as a contribution."""

    root_name: str
    project: str
    material: MaterialId
    tree: HierData
    tables: dict[str, DataTable]
    cid: str | None = None  # embedded id: resubmission updates in place

    @property
    def material_key(self) -> str:
        return canonical_key(self.material)


@dataclass
class Contribution:
    cid: str
    project: str
    material: MaterialId
    tree: HierData
    tables: dict[str, DataTable]
    visibility: str = "private"
    created_at: str = ""
    updated_at: str = ""
    content_hash: str = ""
    plot_customizations: dict[str, dict] = field(default_factory=dict)

    @property
    def material_key(self) -> str:
        return canonical_key(self.material)


def utcnow() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


# -- split ---------------------------------------------------------------------


def split(doc: MPFileDoc, project: str) -> list[ContributionDraft]:
    """Split a parsed document into one draft per non-general root section.

    Raises EmptyDocument, GeneralOnly, or the identifier error of the first
    root that fails classification (the whole submission aborts atomically).
    """
    if not project or not project.strip():
        raise PipelineError("project name must be non-empty")
    if not doc.roots:
        raise EmptyDocument("document has no sections")

    roots = list(doc.roots)
    shared: HierData = {}
    if roots[0].name == GENERAL_SECTION:
        shared = _section_tree(roots[0], tables=None)
        roots = roots[1:]
        if not roots:
            raise GeneralOnly("document has only a general section")

    drafts = []
    for root in roots:
        material = classify(root.name)
        tables: dict[str, DataTable] = {}
        local = _section_tree(root, tables=tables, bare_name=BARE_TABLE_NAME)
        local_general = {}
        if isinstance(local.get(GENERAL_SECTION), dict):
            local_general = local.pop(GENERAL_SECTION)
        cid = None
        embedded = local.pop(CID_KEY, None)  # root-level key signals an update
        if isinstance(embedded, str) and embedded:
            cid = embedded.strip().lower()
            if not CID_RE.fullmatch(cid):
                raise PipelineError(
                    f"embedded cid {embedded!r} in {root.name!r} is not a "
                    "24-character hex identifier"
                )
        tree = recursive_update(shared, recursive_update(local, local_general))
        tree.pop(CID_KEY, None)  # an id never belongs in the stored tree
        drafts.append(
            ContributionDraft(
                root_name=root.name,
                project=project,
                material=material,
                tree=tree,
                tables=tables,
                cid=cid,
            )
        )
    return drafts


def _section_tree(
    section: Section,
    tables: dict[str, DataTable] | None,
    bare_name: str | None = None,
) -> HierData:
    """Collect a section's kv and children into nested dicts, harvesting tables.

    With tables=None (shared general section) tables are not allowed at all.
    """
    node: HierData = {}
    for key, value in section.kv:
        node[key] = value
    if section.table is not None:
        if tables is None:
            raise PipelineError(
                f"tables are not allowed in the {section.name!r} section"
            )
        name = bare_name or section.name
        if name in tables:
            raise DuplicateTableName(f"table name {name!r} used twice")
        tables[name] = section.table
    for child in section.children:
        sub = _section_tree(child, tables=tables)
        if sub:
            node[child.name] = sub
    return node


def recursive_update(base: HierData, overlay: HierData) -> HierData:
    """Deep merge: overlay wins on conflicts, nested maps merge recursively.

    Base key order is preserved; overlay-only keys append in overlay order.
    """
    result: HierData = {}
    for key, bval in base.items():
        if key in overlay:
            oval = overlay[key]
            if isinstance(bval, dict) and isinstance(oval, dict):
                result[key] = recursive_update(bval, oval)
            else:
                result[key] = copy.deepcopy(oval)
        else:
            result[key] = copy.deepcopy(bval)
    for key, oval in overlay.items():
        if key not in base:
            result[key] = copy.deepcopy(oval)
    return result


# -- table cleaning --------------------------------------------------------------


def _is_blank(cell) -> bool:
    return isinstance(cell, str) and cell == ""


def coerce_cell(cell):
    """Parse decimal/exponent notation into int or float; leave text alone."""
    if not isinstance(cell, str):
        return cell
    if _INT_RE.fullmatch(cell):
        return int(cell)
    if _NUMBER_RE.fullmatch(cell):
        value = float(cell)
        if math.isfinite(value):  # overflowing literals stay text
            return value
    return cell


def clean_table(raw: DataTable) -> DataTable:
    """Trim cells, drop fully-empty rows/columns, coerce numeric cells.

    Raises EmptyTable when nothing survives and DuplicateColumn when two
    column names collide after trimming.
    """
    columns = [c.strip() if isinstance(c, str) else c for c in raw.columns]
    rows = [
        [c.strip() if isinstance(c, str) else c for c in row] for row in raw.rows
    ]
    rows = [row for row in rows if not all(_is_blank(c) for c in row)]
    if not rows:
        raise EmptyTable("all table rows are empty")
    keep = [j for j in range(len(columns)) if not all(_is_blank(r[j]) for r in rows)]
    if not keep:
        raise EmptyTable("all table columns are empty")
    columns = [columns[j] for j in keep]
    seen: set[str] = set()
    for name in columns:
        if name in seen:
            raise DuplicateColumn(f"duplicate column name {name!r}")
        seen.add(name)
    rows = [[coerce_cell(row[j]) for j in keep] for row in rows]
    return DataTable(columns=columns, rows=rows)


# -- size policy and hashing ------------------------------------------------------


def canonical_content(tree: HierData, tables: dict[str, DataTable]) -> bytes:
    """Canonical byte form of a contribution's content (tree + tables)."""
    payload = {
        "tree": tree,
        "tables": {
            name: {"columns": t.columns, "rows": t.rows} for name, t in tables.items()
        },
    }
    return json.dumps(payload, ensure_ascii=False, separators=(",", ":")).encode(
        "utf-8"
    )


def content_hash(tree: HierData, tables: dict[str, DataTable]) -> str:
    return hashlib.sha256(canonical_content(tree, tables)).hexdigest()


def enforce_size(draft: ContributionDraft) -> str:
    """Return "ok" (≤200 KiB) or "warning" (≤1 MiB); reject anything larger."""
    size = len(canonical_content(draft.tree, draft.tables))
    if size <= SIZE_OK_BYTES:
        return "ok"
    if size <= SIZE_WARN_BYTES:
        return "warning"
    raise OversizeContribution(
        f"contribution {draft.root_name!r} is {size} bytes; "
        f"the limit is {SIZE_WARN_BYTES}"
    )


# -- contribution ids -------------------------------------------------------------


def new_cid(exists: Callable[[str], bool] | None = None, retries: int = 8) -> str:
    """Generate a fresh 24-hex contribution id, retrying on collisions."""
    for _ in range(retries):
        cid = secrets.token_hex(12)
        if exists is None or not exists(cid):
            return cid
    raise IdExhaustion(f"no unused contribution id after {retries} attempts")


def display_cid(cid: str) -> str:
    """Shortened display form: the first 7 hex characters."""
    return cid[:7]


def make_contribution(
    draft: ContributionDraft, cid: str, now: str | None = None
) -> Contribution:
    now = now or utcnow()
    return Contribution(
        cid=cid,
        project=draft.project,
        material=draft.material,
        tree=draft.tree,
        tables=draft.tables,
        visibility="private",
        created_at=now,
        updated_at=now,
        content_hash=content_hash(draft.tree, draft.tables),
    )
