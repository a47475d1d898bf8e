"""REST service: submission, query, retrieval, build, and visibility control.

All endpoints live under /api/v1. Submission accepts raw MPFile text and is
atomic per file: any validation failure leaves the store untouched. Errors
use the envelope {"error": {"code", "message", "line"?}} with parser line
numbers where available. API keys map to project names; a contribution is
private on creation and visible only to its owning project until released.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import builder, pipeline
from .builder import DerivedMaterialDoc, MaterialLocks, contribution_specs
from .errors import ContribError, NotFound, OversizeContribution
from .mpfile import parse
from .pipeline import clean_table, display_cid, enforce_size, new_cid, split
from .refs import DoiResolver
from .store import Store, contribution_to_json

API_PREFIX = "/api/v1"


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        self.status = status
        self.code = code
        self.message = message
        super().__init__(message)


def load_key_file(path: str | Path) -> dict[str, str]:
    """Parse an API key config file: one `key = project` per line."""
    keys: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, project = line.partition("=")
        key, project = key.strip(), project.strip()
        if not sep or not key or not project:
            raise ValueError(f"{path}:{lineno}: expected 'key = project'")
        if key in keys:
            raise ValueError(f"{path}:{lineno}: duplicate key")
        keys[key] = project
    return keys


def create_app(
    data_dir: str | Path,
    api_keys: dict[str, str] | None = None,
    key_file: str | Path | None = None,
    online_refs: bool = False,
    resolver: DoiResolver | None = None,
) -> FastAPI:
    keys = dict(api_keys or {})
    if key_file is not None:
        keys.update(load_key_file(key_file))

    app = FastAPI(title="matcontrib", version="0.1.0")
    # the curation UI may be served from any origin; auth rides in a header
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["X-API-Key", "Content-Type"],
    )
    app.state.store = Store(data_dir)
    app.state.api_keys = keys
    app.state.locks = MaterialLocks()
    app.state.build_kwargs = {"online_refs": online_refs, "resolver": resolver}

    store: Store = app.state.store

    def caller_project(request: Request) -> str | None:
        key = request.headers.get("X-API-Key")
        if key is None:
            return None
        project = keys.get(key)
        if project is None:
            raise ApiError(401, "BadApiKey", "unknown API key")
        return project

    def require_project(request: Request) -> str:
        project = caller_project(request)
        if project is None:
            raise ApiError(401, "MissingApiKey", "this endpoint requires X-API-Key")
        return project

    def rebuild(*material_keys: str) -> int:
        n = 0
        with app.state.locks.acquire(*material_keys):
            for key in sorted(set(material_keys)):
                builder.rebuild_material(store, key, **app.state.build_kwargs)
                n += 1
        return n

    @app.exception_handler(ApiError)
    async def _api_error(_request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"error": {"code": exc.code, "message": exc.message}},
        )

    @app.exception_handler(ContribError)
    async def _contrib_error(_request, exc: ContribError):
        if isinstance(exc, NotFound):
            status = 404
        elif isinstance(exc, OversizeContribution):
            status = 413
        else:
            status = 400
        envelope = {"code": exc.code, "message": exc.message}
        if exc.line is not None:
            envelope["line"] = exc.line
        return JSONResponse(status_code=status, content={"error": envelope})

    # -- submission -------------------------------------------------------------

    @app.post(f"{API_PREFIX}/contributions", status_code=201)
    async def submit(request: Request):
        project = require_project(request)
        raw = await request.body()
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError:
            raise ApiError(400, "BadEncoding", "request body is not UTF-8")

        doc = parse(text)
        drafts = split(doc, project)

        embedded = [d.cid for d in drafts if d.cid is not None]
        if len(embedded) != len(set(embedded)):
            raise ApiError(
                400, "DuplicateCid", "two sections embed the same contribution id"
            )

        prepared = []
        results = []
        now = pipeline.utcnow()
        for draft in drafts:
            draft.tables = {
                name: clean_table(t) for name, t in draft.tables.items()
            }
            size_level = enforce_size(draft)
            if draft.cid is not None:
                try:
                    existing = store.get_contribution(draft.cid)
                except NotFound:
                    raise ApiError(
                        400,
                        "UnknownCid",
                        f"embedded cid {display_cid(draft.cid)} does not exist",
                    )
                if existing.project != project:
                    raise ApiError(
                        403,
                        "ForeignContribution",
                        f"cid {display_cid(draft.cid)} belongs to another project",
                    )
                c = pipeline.Contribution(
                    cid=draft.cid,
                    project=project,
                    material=draft.material,
                    tree=draft.tree,
                    tables=draft.tables,
                    visibility=existing.visibility,
                    created_at=existing.created_at,
                    updated_at=now,
                    content_hash=pipeline.content_hash(draft.tree, draft.tables),
                    plot_customizations=existing.plot_customizations,
                )
                action = "updated"
                previous_key = existing.material_key
            else:
                c = pipeline.make_contribution(
                    draft, new_cid(exists=store.has_contribution), now
                )
                action = "created"
                previous_key = None
            # Full dry render now, so plot/reference errors reject the
            # submission before anything is stored.
            builder.render_contribution(c)
            prepared.append((c, previous_key))
            entry = {"cid": c.cid, "material": c.material_key, "action": action}
            if size_level == "warning":
                entry["warnings"] = [
                    f"contribution {c.material_key} exceeds 200 KiB; "
                    "consider linking large raw data instead"
                ]
            results.append(entry)

        affected = set()
        for c, previous_key in prepared:
            store.put_contribution(c)
            affected.add(c.material_key)
            if previous_key is not None:
                affected.add(previous_key)
        rebuild(*affected)
        return results

    # -- retrieval ----------------------------------------------------------------

    @app.get(f"{API_PREFIX}/contributions")
    def list_contributions(
        request: Request,
        material: str | None = None,
        project: str | None = None,
        key: str | None = None,
        visibility: str | None = None,
    ):
        if material is None and project is None and key is None and visibility is None:
            raise ApiError(
                400, "MissingFilter", "provide at least one of material, project, key, visibility"
            )
        caller = caller_project(request)
        matches = store.query(
            material=material, project=project, key_path=key, visibility=visibility
        )
        return [
            contribution_to_json(c)
            for c in matches
            if c.visibility == "public" or c.project == caller
        ]

    @app.get(f"{API_PREFIX}/contributions/{{cid}}")
    def get_contribution(cid: str, request: Request):
        c = store.get_contribution(cid)
        if c.visibility != "public" and c.project != caller_project(request):
            raise ApiError(403, "ForeignContribution", "contribution is private")
        return contribution_to_json(c)

    @app.delete(f"{API_PREFIX}/contributions/{{cid}}")
    def delete_contribution(cid: str, request: Request):
        project = require_project(request)
        c = store.get_contribution(cid)
        if c.project != project:
            raise ApiError(
                403, "ForeignContribution", "contribution belongs to another project"
            )
        store.delete_contribution(cid)
        rebuild(c.material_key)
        return {"cid": cid, "deleted": True}

    @app.patch(f"{API_PREFIX}/contributions/{{cid}}")
    async def patch_contribution(cid: str, request: Request):
        project = require_project(request)
        c = store.get_contribution(cid)
        if c.project != project:
            raise ApiError(
                403, "ForeignContribution", "contribution belongs to another project"
            )
        body = await request.json()
        if not isinstance(body, dict):
            raise ApiError(422, "BadPatch", "PATCH body must be a JSON object")
        unknown = [k for k in body if k not in ("visibility", "plot_customized")]
        if unknown:
            raise ApiError(422, "BadPatch", f"unknown fields: {', '.join(unknown)}")

        if "visibility" in body:
            value = body["visibility"]
            if value not in ("public", "private"):
                raise ApiError(
                    422, "BadPatch", "visibility must be 'public' or 'private'"
                )
            c.visibility = value

        if "plot_customized" in body:
            patch = body["plot_customized"]
            if (
                not isinstance(patch, dict)
                or not isinstance(patch.get("plot_id"), str)
                or not isinstance(patch.get("layout"), dict)
            ):
                raise ApiError(
                    422, "BadPatch", "plot_customized needs plot_id and layout"
                )
            plot_ids = {spec.plot_id for spec in contribution_specs(c)}
            if patch["plot_id"] not in plot_ids:
                raise ApiError(
                    422, "UnknownPlot", f"no plot with id {patch['plot_id']!r}"
                )
            bad = [k for k in patch["layout"] if k not in builder.LAYOUT_FIELDS]
            if bad:
                raise ApiError(
                    422,
                    "BadPatch",
                    f"layout fields must be among {', '.join(builder.LAYOUT_FIELDS)}",
                )
            c.plot_customizations[patch["plot_id"]] = dict(patch["layout"])

        c.updated_at = pipeline.utcnow()
        store.put_contribution(c)
        rebuild(c.material_key)
        return contribution_to_json(c)

    # -- derived documents -----------------------------------------------------------

    @app.get(f"{API_PREFIX}/materials/{{material_key}}")
    def get_material(material_key: str, request: Request):
        doc = store.get_derived(material_key)
        caller = caller_project(request)
        projects = {}
        for project, entries in doc.projects.items():
            kept = [
                e
                for e in entries
                if e.get("visibility") == "public" or project == caller
            ]
            if kept:
                projects[project] = kept
        if not projects:
            raise NotFound(f"material {material_key!r} not found")
        return {
            "material_key": doc.material_key,
            "projects": projects,
            "built_at": doc.built_at,
        }

    @app.post(f"{API_PREFIX}/build", status_code=202)
    def build(request: Request, material: str | None = None):
        require_project(request)
        if material is not None:
            known = bool(store.query(material=material)) or material in store.list_materials()
            if not known:
                raise NotFound(f"material {material!r} not found")
            keys = [material]
        else:
            keys = sorted(
                {c.material_key for c in store.all_contributions()}
                | set(store.list_materials())
            )
        return {"rebuilt": rebuild(*keys)}

    @app.get(f"{API_PREFIX}/projects")
    def projects():
        return store.list_projects()

    return app
