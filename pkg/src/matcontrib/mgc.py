"""mgc: command-line client for contributors.

Subcommands: validate (offline preflight), submit (POST a file, then embed
the returned contribution ids back into it so resubmission updates in
place), view, delete, and build.

Exit codes: 0 ok, 1 remote/auth failure, 2 validation failure. Result lines
on stdout are tab-separated; human messages go to stderr.

Configuration precedence: flags > MGC_API_URL / MGC_API_KEY > ~/.mgc.conf
(lines of 'key = value').
"""

from __future__ import annotations

import re
import sys
from pathlib import Path

import click
import requests

from .errors import ContribError
from .mpfile import HEADER_RE, parse
from .pipeline import (
    CID_RE,
    canonical_content,
    clean_table,
    display_cid,
    enforce_size,
    split,
)

EXIT_REMOTE = 1
EXIT_VALIDATION = 2

CONFIG_PATH = Path.home() / ".mgc.conf"
DEFAULT_API_URL = "http://127.0.0.1:8080"

_CID_LINE_RE = re.compile(r"^\s*cid\s*:")


def _load_config() -> dict[str, str]:
    config: dict[str, str] = {}
    if CONFIG_PATH.exists():
        for raw in CONFIG_PATH.read_text(encoding="utf-8").splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if sep:
                config[key.strip()] = value.strip()
    return config


def _setting(flag: str | None, env: str, conf_key: str, default: str | None = None):
    import os

    if flag:
        return flag
    if os.environ.get(env):
        return os.environ[env]
    return _load_config().get(conf_key, default)


def _fail(message: str, code: int):
    click.echo(message, err=True)
    sys.exit(code)


def _fail_error(exc: ContribError):
    where = f" at line {exc.line}" if exc.line is not None else ""
    _fail(f"{exc.code}{where}: {exc.message}", EXIT_VALIDATION)


def _server_failure(response: requests.Response):
    try:
        envelope = response.json()["error"]
        where = f" at line {envelope['line']}" if "line" in envelope else ""
        detail = f"{envelope['code']}{where}: {envelope['message']}"
    except Exception:
        detail = response.text.strip() or response.reason
    code = (
        EXIT_VALIDATION
        if response.status_code in (400, 413, 422)
        else EXIT_REMOTE
    )
    _fail(f"server returned {response.status_code}: {detail}", code)


def _request(method: str, url: str, **kwargs) -> requests.Response:
    try:
        return requests.request(method, url, timeout=30, **kwargs)
    except requests.RequestException as exc:
        _fail(f"cannot reach server: {exc}", EXIT_REMOTE)


def _api(url_flag: str | None) -> str:
    return (_setting(url_flag, "MGC_API_URL", "api_url", DEFAULT_API_URL)).rstrip("/")


def _key(key_flag: str | None) -> str | None:
    return _setting(key_flag, "MGC_API_KEY", "api_key")


def _headers(key_flag: str | None) -> dict[str, str]:
    key = _key(key_flag)
    return {"X-API-Key": key} if key else {}


@click.group()
def main():
    """Submit and curate contributions to the materials database."""


# -- validate ---------------------------------------------------------------------


def _validate_file(path: str, project: str) -> list:
    text = Path(path).read_text(encoding="utf-8")
    doc = parse(text)
    drafts = split(doc, project)
    for draft in drafts:
        draft.tables = {name: clean_table(t) for name, t in draft.tables.items()}
    return drafts


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--project", default="local", show_default=True)
def validate(file: str, project: str):
    """Run the submission checks offline and print a per-root summary."""
    try:
        drafts = _validate_file(file, project)
        for draft in drafts:
            level = enforce_size(draft)
            size = len(canonical_content(draft.tree, draft.tables))
            tables = len(draft.tables)
            summary = (
                f"{draft.root_name}\t{draft.material_key}\t"
                f"{tables} table{'s' if tables != 1 else ''}\t{size} B"
            )
            click.echo(summary)
            if level == "warning":
                click.echo(
                    f"warning: {draft.root_name} exceeds 200 KiB", err=True
                )
    except ContribError as exc:
        _fail_error(exc)


# -- submit -----------------------------------------------------------------------


def embed_cids(text: str, assignments: list[tuple[str, str]]) -> str:
    """Insert or update a `cid: <hex>` line under each named root section.

    Only the cid lines change; every other byte of the file is preserved.
    """
    lines = text.split("\n")
    root_positions: dict[str, int] = {}
    header_lines = []
    for i, raw in enumerate(lines):
        m = HEADER_RE.match(raw.rstrip("\r"))
        if m:
            header_lines.append(i)
            if len(m.group(1)) == 3:
                root_positions[m.group(2).strip()] = i

    for root_name, cid in reversed(assignments):
        start = root_positions[root_name]
        end = next((i for i in header_lines if i > start), len(lines))
        for i in range(start + 1, end):
            if _CID_LINE_RE.match(lines[i]):
                lines[i] = f"cid: {cid}"
                break
        else:
            lines.insert(start + 1, f"cid: {cid}")
    return "\n".join(lines)


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--project", default="local", show_default=True, help="used by --dry-run only")
@click.option("--api-url")
@click.option("--api-key")
@click.option("--dry-run", is_flag=True, help="validate locally, submit nothing")
def submit(file: str, project: str, api_url: str | None, api_key: str | None, dry_run: bool):
    """Submit a file; embed the returned ids so resubmission updates."""
    try:
        drafts = _validate_file(file, project)
    except ContribError as exc:
        _fail_error(exc)
    if dry_run:
        for draft in drafts:
            action = "update" if draft.cid else "create"
            click.echo(f"-\t{draft.material_key}\t{action} (dry run)")
        return

    text = Path(file).read_text(encoding="utf-8")
    response = _request(
        "POST",
        f"{_api(api_url)}/api/v1/contributions",
        data=text.encode("utf-8"),
        headers={**_headers(api_key), "Content-Type": "text/plain; charset=utf-8"},
    )
    if response.status_code != 201:
        _server_failure(response)

    results = response.json()
    assignments = [
        (draft.root_name, entry["cid"]) for draft, entry in zip(drafts, results)
    ]
    Path(file).write_text(embed_cids(text, assignments), encoding="utf-8")
    for entry in results:
        click.echo(
            f"{display_cid(entry['cid'])}\t{entry['material']}\t{entry['action']}"
        )
        for warning in entry.get("warnings", []):
            click.echo(f"warning: {warning}", err=True)


# -- view -------------------------------------------------------------------------


def _print_tree(tree: dict, indent: int):
    pad = "  " * indent
    for key, value in tree.items():
        if isinstance(value, dict):
            click.echo(f"{pad}{key}")
            _print_tree(value, indent + 1)
        else:
            click.echo(f"{pad}{key}: {value}")


def _print_table(name: str, table: dict, indent: int):
    pad = "  " * indent
    columns = table["columns"]
    rows = table["rows"]
    click.echo(f"{pad}{name} ({len(columns)} cols x {len(rows)} rows)")
    text_rows = [[str(c) for c in row] for row in [columns] + rows]
    widths = [max(len(r[j]) for r in text_rows) for j in range(len(columns))]
    for row in text_rows:
        line = "  ".join(cell.ljust(widths[j]) for j, cell in enumerate(row))
        click.echo(f"{pad}  {line.rstrip()}")


def _print_entry(entry: dict, indent: int):
    pad = "  " * indent
    click.echo(f"{pad}contribution {display_cid(entry['cid'])} ({entry['visibility']})")
    _print_tree(entry["tree"], indent + 1)
    for name, table in entry["tables"].items():
        _print_table(name, table, indent + 1)
    for plot in entry.get("plots", []):
        layout = plot["layout"]
        click.echo(
            f"{pad}  plot {layout['title']} [{layout['kind']}] "
            f"x={layout['x_label']} y={layout['y_label']}"
        )


@main.command()
@click.argument("target")
@click.option("--api-url")
@click.option("--api-key")
def view(target: str, api_url: str | None, api_key: str | None):
    """Pretty-print a contribution (by cid) or a material page (by key)."""
    headers = _headers(api_key)
    if CID_RE.fullmatch(target):
        response = _request(
            "GET", f"{_api(api_url)}/api/v1/contributions/{target}", headers=headers
        )
        if response.status_code != 200:
            _server_failure(response)
        _print_entry(response.json(), 0)
        return
    response = _request(
        "GET", f"{_api(api_url)}/api/v1/materials/{target}", headers=headers
    )
    if response.status_code != 200:
        _server_failure(response)
    doc = response.json()
    click.echo(f"material {doc['material_key']} (built {doc['built_at']})")
    for project, entries in doc["projects"].items():
        click.echo(f"project {project}")
        for entry in entries:
            _print_entry(entry, 1)


# -- delete / build ------------------------------------------------------------------


@main.command()
@click.argument("cid")
@click.option("--yes", is_flag=True, help="skip the confirmation prompt")
@click.option("--api-url")
@click.option("--api-key")
def delete(cid: str, yes: bool, api_url: str | None, api_key: str | None):
    """Delete one contribution and rebuild its material."""
    if not yes:
        click.confirm(f"delete contribution {display_cid(cid)}?", abort=True)
    response = _request(
        "DELETE",
        f"{_api(api_url)}/api/v1/contributions/{cid}",
        headers=_headers(api_key),
    )
    if response.status_code != 200:
        _server_failure(response)
    click.echo(f"deleted {display_cid(cid)}")


@main.command()
@click.option("--material")
@click.option("--api-url")
@click.option("--api-key")
def build(material: str | None, api_url: str | None, api_key: str | None):
    """Trigger a rebuild of one material, or of everything."""
    params = {"material": material} if material else {}
    response = _request(
        "POST",
        f"{_api(api_url)}/api/v1/build",
        params=params,
        headers=_headers(api_key),
    )
    if response.status_code != 202:
        _server_failure(response)
    n = response.json()["rebuilt"]
    click.echo(f"rebuilt {n} material{'s' if n != 1 else ''}")


if __name__ == "__main__":
    main()
