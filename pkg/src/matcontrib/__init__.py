"""Community-contribution framework for a materials database.

Parses MPFile submissions, splits them into per-material contributions,
aggregates contributions into derived documents with declarative plots, and
serves them over a REST API and the ``mgc`` command-line client.
"""

__version__ = "0.1.0"

from .mpfile import DataTable, MPFileDoc, Section, get_path, parse, serialize
from .identifier import (
    ChemicalSpace,
    Composition,
    MaterialId,
    MpId,
    canonical_key,
    classify,
    contains,
)
from .pipeline import (
    Contribution,
    ContributionDraft,
    clean_table,
    display_cid,
    enforce_size,
    new_cid,
    recursive_update,
    split,
)
from .builder import (
    PlotDocument,
    PlotSpec,
    apply_overrides,
    build_material,
    default_plots,
    render_plot,
)
from .refs import Reference, extract_references, resolve
from .store import Store

__all__ = [
    "ChemicalSpace",
    "Composition",
    "Contribution",
    "ContributionDraft",
    "DataTable",
    "MPFileDoc",
    "MaterialId",
    "MpId",
    "PlotDocument",
    "PlotSpec",
    "Reference",
    "Section",
    "Store",
    "apply_overrides",
    "build_material",
    "canonical_key",
    "classify",
    "clean_table",
    "contains",
    "default_plots",
    "display_cid",
    "enforce_size",
    "extract_references",
    "get_path",
    "new_cid",
    "parse",
    "recursive_update",
    "render_plot",
    "resolve",
    "serialize",
    "split",
]
