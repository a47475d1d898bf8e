"""(Re-)aggregate contributions into derived per-material documents.

Every cleaned table with at least two columns and one numeric non-first
column gets a default line plot (first column as abscissae, remaining numeric
columns as traces). The reserved "plots" section overrides defaults (child
name prefix "default") or appends extra plots. The builder renders declarative
plot documents, groups contributions by project, and keeps user-customized
plot layouts intact across data updates.
"""

from __future__ import annotations

import hashlib
import threading
from contextlib import contextmanager
from dataclasses import dataclass, field, asdict

from .errors import (
    KeyMismatch,
    MalformedPlotSection,
    NonNumericSeries,
    NotFound,
    UnknownColumn,
    UnknownKind,
    UnknownTable,
)
from .mpfile import DataTable, table_to_csv
from .pipeline import Contribution, HierData, utcnow
from .refs import DoiResolver, Reference, extract_references, resolve

KINDS = ("line", "bar", "scatter")
DEFAULT_PREFIX = "default"


@dataclass
class PlotSpec:
    plot_id: str
    name: str
    table: str
    x: str
    y: list[str]
    kind: str = "line"
    is_default: bool = True
    customized: bool = False


@dataclass
class PlotDocument:
    plot_id: str
    layout: dict
    series: list[dict]
    source_hash: str

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class DerivedMaterialDoc:
    """Per-material aggregation of contributions, grouped by project."""

    material_key: str
    projects: dict[str, list[dict]] = field(default_factory=dict)
    built_at: str = ""

    def to_json(self) -> dict:
        return {
            "material_key": self.material_key,
            "projects": self.projects,
            "built_at": self.built_at,
        }

    @classmethod
    def from_json(cls, body: dict) -> "DerivedMaterialDoc":
        return cls(
            material_key=body["material_key"],
            projects=body["projects"],
            built_at=body.get("built_at", ""),
        )


def table_hash(table: DataTable) -> str:
    return hashlib.sha256(table_to_csv(table).encode("utf-8")).hexdigest()


def _numeric_columns(table: DataTable, skip_first: bool = True) -> list[str]:
    start = 1 if skip_first else 0
    return [
        col
        for j, col in enumerate(table.columns)
        if j >= start
        and all(isinstance(row[j], (int, float)) for row in table.rows)
    ]


def default_plots(c: Contribution) -> list[PlotSpec]:
    """One line plot per table with ≥2 columns and ≥1 numeric non-first column."""
    specs = []
    for name, table in c.tables.items():
        if len(table.columns) < 2:
            continue
        ys = _numeric_columns(table)
        if not ys:
            continue
        specs.append(
            PlotSpec(
                plot_id=_default_plot_id(c.cid, name),
                name=f"{DEFAULT_PREFIX} {name}",
                table=name,
                x=table.columns[0],
                y=ys,
                kind="line",
                is_default=True,
            )
        )
    return specs


def _default_plot_id(cid: str, table: str) -> str:
    return f"{cid}:default:{table}"


def _split_columns(value: str) -> list[str]:
    return [part.strip() for part in value.split(",") if part.strip()]


def apply_overrides(
    defaults: list[PlotSpec],
    plots_section: HierData,
    *,
    tables: dict[str, DataTable],
    cid: str,
) -> list[PlotSpec]:
    """Apply the reserved "plots" section to the default specs.

    A child whose name starts with "default" replaces the default spec of the
    table named by its mandatory "table" key; any other child appends a new
    spec. Absent fields keep their default values.
    """
    specs = list(defaults)
    for child_name, child in plots_section.items():
        if not isinstance(child, dict):
            raise MalformedPlotSection(
                f"plots entry {child_name!r} must be a subsection"
            )
        unknown = [k for k in child if k not in ("x", "y", "kind", "table")]
        if unknown:
            raise MalformedPlotSection(
                f"plot {child_name!r} has unsupported keys: {', '.join(unknown)}"
            )
        if any(isinstance(v, dict) for v in child.values()):
            raise MalformedPlotSection(
                f"plot {child_name!r} must contain key/value pairs only"
            )
        table_name = child.get("table")
        if not table_name:
            raise UnknownTable(f"plot {child_name!r} is missing the table key")
        if table_name not in tables:
            raise UnknownTable(f"plot {child_name!r} references unknown table {table_name!r}")
        table = tables[table_name]

        is_override = child_name.startswith(DEFAULT_PREFIX)
        base_idx = None
        if is_override:
            for i, spec in enumerate(specs):
                if spec.is_default and spec.table == table_name:
                    base_idx = i
                    break
        base = specs[base_idx] if base_idx is not None else _skeleton(table, table_name)

        x = child.get("x", base.x)
        y = _split_columns(child["y"]) if "y" in child else list(base.y)
        kind = child.get("kind", base.kind)
        if kind not in KINDS:
            raise UnknownKind(
                f"plot {child_name!r}: kind {kind!r} is not one of {', '.join(KINDS)}"
            )
        for col in [x] + y:
            if col not in table.columns:
                raise UnknownColumn(
                    f"plot {child_name!r}: column {col!r} not in table {table_name!r}"
                )
        if not y:
            raise MalformedPlotSection(f"plot {child_name!r} has no y columns")
        if x in y:
            raise MalformedPlotSection(
                f"plot {child_name!r}: x column {x!r} also appears in y"
            )

        if is_override:
            spec = PlotSpec(
                plot_id=_default_plot_id(cid, table_name),
                name=child_name,
                table=table_name,
                x=x,
                y=y,
                kind=kind,
                is_default=True,
            )
            if base_idx is not None:
                specs[base_idx] = spec
            else:
                specs.append(spec)
        else:
            specs.append(
                PlotSpec(
                    plot_id=f"{cid}:add:{child_name}",
                    name=child_name,
                    table=table_name,
                    x=x,
                    y=y,
                    kind=kind,
                    is_default=False,
                )
            )
    return specs


def _skeleton(table: DataTable, name: str) -> PlotSpec:
    return PlotSpec(
        plot_id="",
        name=f"{DEFAULT_PREFIX} {name}",
        table=name,
        x=table.columns[0],
        y=_numeric_columns(table),
        kind="line",
        is_default=True,
    )


def render_plot(spec: PlotSpec, table: DataTable) -> PlotDocument:
    """Extract the spec's columns into parallel series.

    Ordinates must be numeric (NonNumericSeries otherwise); abscissae may be
    text, which renders as a categorical axis.
    """
    index = {col: j for j, col in enumerate(table.columns)}
    for col in [spec.x] + spec.y:
        if col not in index:
            raise UnknownColumn(f"column {col!r} not in table {spec.table!r}")
    xs = [row[index[spec.x]] for row in table.rows]
    series = []
    for col in spec.y:
        ys = [row[index[col]] for row in table.rows]
        if any(isinstance(v, str) for v in ys):
            raise NonNumericSeries(
                f"column {col!r} has text cells and cannot be plotted as y"
            )
        series.append({"name": col, "x": xs, "y": ys})
    layout = {
        "title": spec.name,
        "x_label": spec.x,
        "y_label": ", ".join(spec.y),
        "kind": spec.kind,
    }
    return PlotDocument(
        plot_id=spec.plot_id,
        layout=layout,
        series=series,
        source_hash=table_hash(table),
    )


LAYOUT_FIELDS = ("title", "x_label", "y_label", "kind")


def contribution_specs(c: Contribution) -> list[PlotSpec]:
    """Default specs plus the contribution's own plot overrides."""
    plots_section = c.tree.get("plots")
    if not isinstance(plots_section, dict):
        plots_section = {}
    specs = apply_overrides(
        default_plots(c), plots_section, tables=c.tables, cid=c.cid
    )
    for spec in specs:
        if spec.plot_id in c.plot_customizations:
            spec.customized = True
    return specs


def render_contribution(
    c: Contribution, previous_plots: dict[str, dict] | None = None
) -> list[PlotDocument]:
    """Render all plot documents for one contribution.

    A customized layout (stored on the contribution) overrides the generated
    layout field by field, so user customization survives data updates. When
    the previous build holds the same plot over unchanged table data, its
    layout is reused verbatim.
    """
    previous_plots = previous_plots or {}
    docs = []
    for spec in contribution_specs(c):
        doc = render_plot(spec, c.tables[spec.table])
        if spec.customized:
            prev = previous_plots.get(spec.plot_id)
            if prev and prev.get("source_hash") == doc.source_hash:
                doc.layout = dict(prev["layout"])
            custom = c.plot_customizations.get(spec.plot_id, {})
            doc.layout.update(
                {k: v for k, v in custom.items() if k in LAYOUT_FIELDS}
            )
        docs.append(doc)
    return docs


def build_material(
    key: str,
    contributions: list[Contribution],
    previous: DerivedMaterialDoc | None = None,
    *,
    resolver: DoiResolver | None = None,
    online_refs: bool = False,
) -> DerivedMaterialDoc:
    """Aggregate all contributions for one material into a derived document.

    Deterministic given identical inputs (modulo built_at). Raises KeyMismatch
    if a contribution belongs to a different material.
    """
    previous_plots: dict[str, dict] = {}
    if previous is not None:
        for entries in previous.projects.values():
            for entry in entries:
                for plot in entry.get("plots", []):
                    previous_plots[plot["plot_id"]] = plot

    doc = DerivedMaterialDoc(material_key=key, built_at=utcnow())
    for c in contributions:
        if c.material_key != key:
            raise KeyMismatch(
                f"contribution {c.cid} belongs to {c.material_key!r}, not {key!r}"
            )
        plots = render_contribution(c, previous_plots)
        references = [
            _ref_json(resolve(r, online=online_refs, resolver=resolver))
            for r in extract_references(c.tree)
        ]
        entry = {
            "cid": c.cid,
            "visibility": c.visibility,
            "tree": c.tree,
            "tables": {
                name: {"columns": t.columns, "rows": t.rows}
                for name, t in c.tables.items()
            },
            "plots": [p.to_json() for p in plots],
            "references": references,
        }
        doc.projects.setdefault(c.project, []).append(entry)
    return doc


def _ref_json(ref: Reference) -> dict:
    body = {"kind": ref.kind, "value": ref.value}
    if ref.display is not None:
        body["display"] = ref.display
    if ref.warning:
        body["warning"] = True
    return body


def rebuild_material(store, key: str, **build_kwargs) -> DerivedMaterialDoc | None:
    """Rebuild one material's derived document from the store.

    Removes the derived document when no contributions remain.
    """
    contributions = store.query(material=key)
    if not contributions:
        store.delete_derived(key)
        return None
    try:
        previous = store.get_derived(key)
    except NotFound:
        previous = None
    doc = build_material(key, contributions, previous, **build_kwargs)
    store.put_derived(doc)
    return doc


class MaterialLocks:
    """Serialize builds per material key; distinct keys build in parallel."""

    def __init__(self):
        self._locks: dict[str, threading.Lock] = {}
        self._meta = threading.Lock()

    @contextmanager
    def acquire(self, *keys: str):
        locks = []
        with self._meta:
            for key in sorted(set(keys)):
                locks.append(self._locks.setdefault(key, threading.Lock()))
        for lock in locks:
            lock.acquire()
        try:
            yield
        finally:
            for lock in reversed(locks):
                lock.release()
