"""Normalize and resolve the reserved "references" section.

Reference kinds come from the kv key prefix before the first '-': the allowed
keys are url, doi, and bibtex. Resolution fills the display string: urls
display as themselves, BibTeX entries are reduced to "Author. Title (Year)",
and DOIs are resolved online via content negotiation against a DOI resolver.
Resolution failures set a warning flag and never fail a submission.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass, replace
from urllib.parse import urlparse

import requests

from .errors import MalformedDoi, MalformedUrl, RefsError, UnknownReferenceKind

KINDS = ("url", "doi", "bibtex")
DOI_RE = re.compile(r"10\.\d{4,9}/\S+")

DEFAULT_RESOLVER_URL = "https://doi.org"
RESOLVER_TIMEOUT = 5.0
PER_HOST_CAP = 4


@dataclass(frozen=True)
class Reference:
    kind: str
    value: str
    display: str | None = None
    warning: bool = False


def extract_references(tree: dict) -> list[Reference]:
    """Pull references out of a contribution tree, preserving kv order."""
    sub = tree.get("references")
    if sub is None:
        return []
    if not isinstance(sub, dict):
        raise RefsError("references must be a section of key/value pairs")
    refs = []
    for key, value in sub.items():
        if isinstance(value, dict):
            raise RefsError(f"nested section {key!r} not allowed in references")
        kind = key.split("-", 1)[0]
        if kind not in KINDS:
            raise UnknownReferenceKind(
                f"reference key {key!r}: allowed kinds are url, doi, bibtex"
            )
        if kind == "url":
            parsed = urlparse(value)
            if not parsed.scheme or not parsed.netloc:
                raise MalformedUrl(f"{value!r} is not an absolute URL")
        elif kind == "doi" and not DOI_RE.fullmatch(value):
            raise MalformedDoi(f"{value!r} is not a DOI")
        refs.append(Reference(kind=kind, value=value))
    return refs


class DoiResolver:
    """HTTP client for DOI content negotiation, shareable across threads.

    Concurrent requests are capped at 4 per host.
    """

    def __init__(
        self,
        base_url: str = DEFAULT_RESOLVER_URL,
        timeout: float = RESOLVER_TIMEOUT,
        session: requests.Session | None = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self._session = session or requests.Session()
        self._semaphores: dict[str, threading.Semaphore] = {}
        self._lock = threading.Lock()

    def _semaphore(self) -> threading.Semaphore:
        host = urlparse(self.base_url).netloc
        with self._lock:
            if host not in self._semaphores:
                self._semaphores[host] = threading.Semaphore(PER_HOST_CAP)
            return self._semaphores[host]

    def citation(self, doi: str) -> str | None:
        """Fetch a bibliographic text rendering of a DOI, or None on failure."""
        try:
            with self._semaphore():
                response = self._session.get(
                    f"{self.base_url}/{doi}",
                    headers={"Accept": "text/x-bibliography"},
                    timeout=self.timeout,
                )
            if response.ok and response.text.strip():
                return response.text.strip()
        except requests.RequestException:
            pass
        return None


def resolve(
    ref: Reference, online: bool = False, resolver: DoiResolver | None = None
) -> Reference:
    """Fill the display string of a reference; warnings instead of failures."""
    if ref.display is not None:
        return ref
    if ref.kind == "url":
        return replace(ref, display=ref.value)
    if ref.kind == "bibtex":
        display = format_bibtex(ref.value)
        if display is None:
            return replace(ref, warning=True)
        return replace(ref, display=display)
    # doi
    if not online:
        return replace(ref, warning=True)
    citation = (resolver or DoiResolver()).citation(ref.value)
    if citation is None:
        return replace(ref, warning=True)
    return replace(ref, display=citation)


# -- minimal BibTeX ---------------------------------------------------------------


def parse_bibtex_fields(text: str) -> dict[str, str]:
    """Extract top-level fields from one BibTeX entry.

    Handles braced or quoted values and top-level commas only; the full
    grammar is out of scope.
    """
    start = text.find("{")
    end = text.rfind("}")
    if start == -1 or end <= start:
        return {}
    body = text[start + 1 : end]
    parts: list[str] = []
    depth = 0
    buf: list[str] = []
    for ch in body:
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(buf))
            buf = []
        else:
            buf.append(ch)
    parts.append("".join(buf))

    fields: dict[str, str] = {}
    for part in parts:
        if "=" not in part:
            continue
        name, _, value = part.partition("=")
        value = value.strip()
        if len(value) >= 2 and value[0] == "{" and value[-1] == "}":
            value = value[1:-1]
        elif len(value) >= 2 and value[0] == '"' and value[-1] == '"':
            value = value[1:-1]
        fields[name.strip().lower()] = value.strip()
    return fields


def format_bibtex(text: str) -> str | None:
    """Render "Author. Title (Year)" from a BibTeX string, or None."""
    fields = parse_bibtex_fields(text)
    author = fields.get("author", "")
    title = fields.get("title", "")
    year = fields.get("year", "")
    if not author and not title:
        return None
    if author and title:
        sep = " " if author.endswith(".") else ". "
        display = author + sep + title
    else:
        display = author or title
    if year:
        display += f" ({year})"
    return display
