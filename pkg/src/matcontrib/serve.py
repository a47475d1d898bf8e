"""Server launcher: bind address, data directory, and key file come from
flags or environment variables."""

from __future__ import annotations

import click
import uvicorn

from .api import create_app


@click.command()
@click.option(
    "--bind",
    envvar="MATCONTRIB_BIND",
    default="127.0.0.1:8080",
    show_default=True,
    help="host:port to listen on",
)
@click.option(
    "--data-dir",
    envvar="MATCONTRIB_DATA_DIR",
    default="./data",
    show_default=True,
    help="store directory",
)
@click.option(
    "--keys",
    "key_file",
    envvar="MATCONTRIB_KEYS",
    required=True,
    help="API key config file (lines of 'key = project')",
)
@click.option(
    "--online-refs/--offline-refs",
    default=False,
    show_default=True,
    help="resolve DOI references over HTTP during builds",
)
def main(bind: str, data_dir: str, key_file: str, online_refs: bool):
    """Run the contribution REST service."""
    host, _, port = bind.partition(":")
    app = create_app(data_dir, key_file=key_file, online_refs=online_refs)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8080))


if __name__ == "__main__":
    main()
