"""File-backed document store for contributions and derived documents.

One directory per collection, one JSON file per record (name = id), plus a
per-collection append-only index file rebuilt on open if missing. Writes go
to a temp file, carry a checksum, and land via atomic rename, so a crashed
write never leaves a torn record. Writes are serialized per collection by a
single-writer lock; reads see consistent snapshots.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import threading
from pathlib import Path

from .builder import DerivedMaterialDoc
from .errors import Corrupt, NotFound
from .identifier import ChemicalSpace, Composition, MaterialId, MpId
from .mpfile import DataTable
from .pipeline import Contribution

CONTRIBUTIONS = "contributions"
DERIVED = "derived"


def _body_checksum(body: dict) -> str:
    canonical = json.dumps(body, ensure_ascii=False, sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def material_to_json(mid: MaterialId) -> dict:
    if isinstance(mid, MpId):
        return {"kind": "mp_id", "number": mid.number}
    if isinstance(mid, Composition):
        return {"kind": "composition", "elements": dict(mid.elements)}
    return {"kind": "chemical_space", "elements": sorted(mid.elements)}


def material_from_json(body: dict) -> MaterialId:
    kind = body["kind"]
    if kind == "mp_id":
        return MpId(body["number"])
    if kind == "composition":
        return Composition(dict(body["elements"]))
    return ChemicalSpace(frozenset(body["elements"]))


def contribution_to_json(c: Contribution) -> dict:
    return {
        "cid": c.cid,
        "project": c.project,
        "material": material_to_json(c.material),
        "material_key": c.material_key,
        "tree": c.tree,
        "tables": {
            name: {"columns": t.columns, "rows": t.rows}
            for name, t in c.tables.items()
        },
        "visibility": c.visibility,
        "created_at": c.created_at,
        "updated_at": c.updated_at,
        "content_hash": c.content_hash,
        "plot_customizations": c.plot_customizations,
    }


def contribution_from_json(body: dict) -> Contribution:
    return Contribution(
        cid=body["cid"],
        project=body["project"],
        material=material_from_json(body["material"]),
        tree=body["tree"],
        tables={
            name: DataTable(columns=t["columns"], rows=t["rows"])
            for name, t in body["tables"].items()
        },
        visibility=body["visibility"],
        created_at=body["created_at"],
        updated_at=body["updated_at"],
        content_hash=body["content_hash"],
        plot_customizations=body.get("plot_customizations", {}),
    )


class Store:
    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self._locks = {CONTRIBUTIONS: threading.Lock(), DERIVED: threading.Lock()}
        for collection in (CONTRIBUTIONS, DERIVED):
            (self.data_dir / collection).mkdir(parents=True, exist_ok=True)
            index = self._index_path(collection)
            if not index.exists():
                self._rebuild_index(collection)

    # -- low-level records ----------------------------------------------------

    def _collection_dir(self, collection: str) -> Path:
        return self.data_dir / collection

    def _index_path(self, collection: str) -> Path:
        return self.data_dir / f"{collection}.idx"

    def _record_path(self, collection: str, rid: str) -> Path:
        return self._collection_dir(collection) / f"{rid}.json"

    def _rebuild_index(self, collection: str) -> None:
        ids = sorted(
            p.stem for p in self._collection_dir(collection).glob("*.json")
        )
        self._index_path(collection).write_text(
            "".join(f"{rid}\n" for rid in ids), encoding="utf-8"
        )

    def _ids(self, collection: str) -> list[str]:
        seen: set[str] = set()
        ids = []
        index = self._index_path(collection)
        if index.exists():
            for line in index.read_text(encoding="utf-8").splitlines():
                rid = line.strip()
                if not rid or rid in seen:
                    continue
                seen.add(rid)
                if self._record_path(collection, rid).exists():
                    ids.append(rid)
        return ids

    def _put(self, collection: str, rid: str, body: dict) -> int:
        with self._locks[collection]:
            path = self._record_path(collection, rid)
            version = 0
            if path.exists():
                version = self._load(collection, rid)["version"]
            record = {
                "id": rid,
                "version": version + 1,
                "checksum": _body_checksum(body),
                "body": body,
            }
            data = json.dumps(record, ensure_ascii=False).encode("utf-8")
            fd, tmp = tempfile.mkstemp(
                dir=path.parent, prefix=f".{rid}.", suffix=".tmp"
            )
            try:
                os.write(fd, data)
                os.fsync(fd)
            finally:
                os.close(fd)
            os.replace(tmp, path)
            if version == 0:
                with open(self._index_path(collection), "a", encoding="utf-8") as f:
                    f.write(f"{rid}\n")
            return version + 1

    def _load(self, collection: str, rid: str) -> dict:
        path = self._record_path(collection, rid)
        if not path.exists():
            raise NotFound(f"{collection[:-1]} {rid!r} not found")
        try:
            record = json.loads(path.read_text(encoding="utf-8"))
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise Corrupt(f"record {rid!r} is unreadable: {exc}") from exc
        if _body_checksum(record.get("body", {})) != record.get("checksum"):
            raise Corrupt(f"record {rid!r} failed its checksum")
        return record

    def _delete(self, collection: str, rid: str) -> bool:
        with self._locks[collection]:
            path = self._record_path(collection, rid)
            if not path.exists():
                return False
            path.unlink()
            return True

    # -- contributions ----------------------------------------------------------

    def put_contribution(self, c: Contribution) -> int:
        return self._put(CONTRIBUTIONS, c.cid, contribution_to_json(c))

    def get_contribution(self, cid: str) -> Contribution:
        return contribution_from_json(self._load(CONTRIBUTIONS, cid)["body"])

    def delete_contribution(self, cid: str) -> bool:
        return self._delete(CONTRIBUTIONS, cid)

    def has_contribution(self, cid: str) -> bool:
        return self._record_path(CONTRIBUTIONS, cid).exists()

    def all_contributions(self) -> list[Contribution]:
        results = []
        for cid in self._ids(CONTRIBUTIONS):
            try:
                results.append(self.get_contribution(cid))
            except NotFound:
                continue
        results.sort(key=lambda c: (c.created_at, c.cid))
        return results

    def query(
        self,
        material: str | None = None,
        project: str | None = None,
        key_path: str | None = None,
        visibility: str | None = None,
    ) -> list[Contribution]:
        """Contributions matching the conjunction of the given filters,
        ordered by creation time."""
        results = []
        for cid in self._ids(CONTRIBUTIONS):
            try:
                c = self.get_contribution(cid)
            except NotFound:
                continue
            if material is not None and c.material_key != material:
                continue
            if project is not None and c.project != project:
                continue
            if visibility is not None and c.visibility != visibility:
                continue
            if key_path is not None and not _has_key_path(c.tree, key_path):
                continue
            results.append(c)
        results.sort(key=lambda c: (c.created_at, c.cid))
        return results

    # -- derived documents --------------------------------------------------------

    def put_derived(self, doc: DerivedMaterialDoc) -> int:
        return self._put(DERIVED, doc.material_key, doc.to_json())

    def get_derived(self, material_key: str) -> DerivedMaterialDoc:
        return DerivedMaterialDoc.from_json(self._load(DERIVED, material_key)["body"])

    def delete_derived(self, material_key: str) -> bool:
        return self._delete(DERIVED, material_key)

    def list_materials(self) -> list[str]:
        return sorted(self._ids(DERIVED))

    def list_projects(self) -> list[str]:
        projects = set()
        for cid in self._ids(CONTRIBUTIONS):
            try:
                projects.add(self.get_contribution(cid).project)
            except NotFound:
                continue
        return sorted(projects)


def _has_key_path(tree: dict, dotted: str) -> bool:
    node = tree
    for part in dotted.split("."):
        if not isinstance(node, dict) or part not in node:
            return False
        node = node[part]
    return True
