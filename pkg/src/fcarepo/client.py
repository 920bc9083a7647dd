"""Fetch contexts from a hosted repository over plain HTTP(S), with a local cache.

The repository is addressed as raw files: ``<base_url>/contexts.yaml`` for the
index and ``<base_url>/contexts/<stem>.cxt`` for each context. Cached copies
live in ``<cache_dir>/<stem>.cxt`` next to ``<stem>.meta.json``, which records
the HTTP validators (``ETag``/``Last-Modified``) and the fetch time.

>>> import fcarepo
>>> ctx = fcarepo.load_dataset("livingbeings_en")  # doctest: +SKIP
"""
from __future__ import annotations

import difflib
import json
import logging
import os
import tempfile
import time
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Protocol
from urllib.parse import urlsplit

from .context import FormalContext
from .errors import (
    ContextNotFound,
    HTTPStatusError,
    NetworkError,
    OfflineError,
    ParseError,
    RepoError,
)
from .formats import parse_burmeister
from .index import INDEX_FILENAME, RepositoryIndex, parse_index, validate_filename

__all__ = [
    "DEFAULT_BASE_URL",
    "DEFAULT_MAX_AGE",
    "RepoConfig",
    "CacheEntry",
    "Response",
    "Transport",
    "UrllibTransport",
    "RepoClient",
    "InvalidRemoteContent",
    "list_contexts",
    "fetch_raw",
    "load_dataset",
]

log = logging.getLogger(__name__)

DEFAULT_BASE_URL = "https://raw.githubusercontent.com/fcatools/contexts/main"
DEFAULT_MAX_AGE = 24 * 60 * 60.0


def _default_base_url() -> str:
    return os.environ.get("FCAREPO_BASE_URL") or DEFAULT_BASE_URL


def _default_cache_dir() -> str:
    env = os.environ.get("FCAREPO_CACHE_DIR")
    if env:
        return env
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return os.path.join(base, "fcarepo")


@dataclass(frozen=True)
class RepoConfig:
    """Where the repository lives and how to cache it.

    ``base_url`` and ``cache_dir`` default to ``$FCAREPO_BASE_URL`` and
    ``$FCAREPO_CACHE_DIR`` when those are set.
    """

    base_url: str = field(default_factory=_default_base_url)
    cache_dir: str = field(default_factory=_default_cache_dir)
    offline: bool = False
    timeout: float = 30.0
    max_age: float = DEFAULT_MAX_AGE

    def __post_init__(self):
        if urlsplit(self.base_url).scheme not in ("http", "https"):
            raise ValueError(f"base_url must use http or https: {self.base_url!r}")
        if not self.timeout > 0:
            raise ValueError("timeout must be positive")
        object.__setattr__(self, "base_url", self.base_url.rstrip("/"))
        object.__setattr__(self, "cache_dir", os.fspath(self.cache_dir))


@dataclass(frozen=True)
class CacheEntry:
    filename: str
    content: bytes
    etag: Optional[str] = None
    last_modified: Optional[str] = None
    fetched_at: float = 0.0

    @property
    def has_validator(self) -> bool:
        return bool(self.etag or self.last_modified)


@dataclass(frozen=True)
class Response:
    status: int
    headers: Mapping[str, str]  # lower-cased names
    body: bytes
    url: str = ""


class Transport(Protocol):
    def get(self, url: str, headers: Mapping[str, str], timeout: float) -> Response: ...


class UrllibTransport:
    """Blocking GET via :mod:`urllib`; HTTP error statuses become responses."""

    def get(self, url, headers, timeout):
        req = urllib.request.Request(url, headers=dict(headers), method="GET")
        try:
            with urllib.request.urlopen(req, timeout=timeout) as resp:
                return Response(resp.status, _lower(resp.headers), resp.read(), url)
        except urllib.error.HTTPError as exc:
            body = exc.read() if exc.fp is not None else b""
            return Response(exc.code, _lower(exc.headers or {}), body, url)
        except (urllib.error.URLError, OSError) as exc:
            reason = getattr(exc, "reason", exc)
            raise NetworkError(f"GET {url} failed: {reason}") from exc


def _lower(headers) -> dict:
    return {k.lower(): v for k, v in headers.items()}


class InvalidRemoteContent(RepoError):
    """The server answered, but the payload failed validation."""

    def __init__(self, filename: str, cause: Exception):
        self.filename = filename
        self.cause = cause
        super().__init__(f"{filename}: {cause}")


class RepoClient:
    """Client for one repository; safe to share between threads."""

    def __init__(
        self,
        config: Optional[RepoConfig] = None,
        transport: Optional[Transport] = None,
        clock: Callable[[], float] = time.time,
    ):
        self.config = config or RepoConfig()
        self.transport = transport or UrllibTransport()
        self._clock = clock

    # -- cache ---------------------------------------------------------------

    def _paths(self, filename):
        root = self.config.cache_dir
        stem = filename[: -len(".cxt")] if filename.endswith(".cxt") else filename
        return os.path.join(root, filename), os.path.join(root, stem + ".meta.json")

    def cache_entry(self, filename: str) -> Optional[CacheEntry]:
        data_path, meta_path = self._paths(filename)
        try:
            with open(data_path, "rb") as fh:
                content = fh.read()
        except FileNotFoundError:
            return None
        meta = {}
        try:
            with open(meta_path, encoding="utf-8") as fh:
                meta = json.load(fh)
        except (FileNotFoundError, ValueError):
            pass
        return CacheEntry(
            filename,
            content,
            meta.get("etag"),
            meta.get("last_modified"),
            float(meta.get("fetched_at", 0.0)),
        )

    def _write_cache(self, entry: CacheEntry) -> None:
        os.makedirs(self.config.cache_dir, exist_ok=True)
        data_path, meta_path = self._paths(entry.filename)
        meta = {
            "etag": entry.etag,
            "fetched_at": entry.fetched_at,
            "last_modified": entry.last_modified,
        }
        _atomic_write(data_path, entry.content)
        _atomic_write(meta_path, json.dumps(meta, sort_keys=True).encode("utf-8"))

    # -- fetching -----------------------------------------------------------

    def _fetch(self, filename: str, url: str, validate: Callable[[bytes], object]) -> bytes:
        cached = self.cache_entry(filename)
        if self.config.offline:
            if cached is None:
                raise OfflineError(f"offline mode and no cached copy of {filename}")
            return cached.content

        headers = {}
        if cached is not None:
            if cached.has_validator:
                if cached.etag:
                    headers["If-None-Match"] = cached.etag
                if cached.last_modified:
                    headers["If-Modified-Since"] = cached.last_modified
            elif self._clock() - cached.fetched_at < self.config.max_age:
                return cached.content

        log.debug("GET %s", url)
        resp = self.transport.get(url, headers, self.config.timeout)
        if resp.status == 304 and cached is not None:
            self._write_cache(
                CacheEntry(filename, cached.content, cached.etag, cached.last_modified, self._clock())
            )
            return cached.content
        if resp.status == 404 and filename != INDEX_FILENAME:
            raise ContextNotFound(filename[: -len(".cxt")], url, self._suggest(filename))
        if resp.status >= 400:
            raise HTTPStatusError(resp.status, url)
        if resp.status != 200:
            raise RepoError(f"unexpected HTTP {resp.status} for {url}")

        try:
            validate(resp.body)
        except (ParseError, UnicodeDecodeError, ValueError) as exc:
            raise InvalidRemoteContent(filename, exc) from exc
        self._write_cache(
            CacheEntry(
                filename,
                resp.body,
                resp.headers.get("etag"),
                resp.headers.get("last-modified"),
                self._clock(),
            )
        )
        return resp.body

    def _suggest(self, filename: str) -> list[str]:
        try:
            index = self.list_contexts()
        except RepoError:
            return []
        stems = [f[: -len(".cxt")] for f in index.entries]
        return difflib.get_close_matches(filename[: -len(".cxt")], stems, n=5, cutoff=0.4)

    def list_contexts(self) -> RepositoryIndex:
        """Fetch and parse ``contexts.yaml``."""
        url = f"{self.config.base_url}/{INDEX_FILENAME}"
        return parse_index(self._fetch(INDEX_FILENAME, url, parse_index))

    def fetch_raw(self, name: str) -> bytes:
        """Bytes of ``contexts/<name>.cxt``, validated as Burmeister before caching."""
        filename = _filename(name)
        url = f"{self.config.base_url}/contexts/{filename}"
        return self._fetch(filename, url, parse_burmeister)

    def load_dataset(self, name: str) -> FormalContext:
        return parse_burmeister(self.fetch_raw(name))


def _filename(name: str) -> str:
    stem = name[: -len(".cxt")] if name.endswith(".cxt") else name
    filename = stem + ".cxt"
    problems = validate_filename(filename)
    if problems:
        raise ValueError("; ".join(problems))
    return filename


def _atomic_write(path: str, data: bytes) -> None:
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def list_contexts(config: Optional[RepoConfig] = None, transport: Optional[Transport] = None):
    return RepoClient(config, transport).list_contexts()


def fetch_raw(name: str, config: Optional[RepoConfig] = None, transport: Optional[Transport] = None):
    return RepoClient(config, transport).fetch_raw(name)


def load_dataset(
    name: str, config: Optional[RepoConfig] = None, transport: Optional[Transport] = None
) -> FormalContext:
    """Load a context from the repository by name, e.g. ``load_dataset("livingbeings_en")``."""
    return RepoClient(config, transport).load_dataset(name)
