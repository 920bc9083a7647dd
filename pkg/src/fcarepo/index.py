"""The repository metadata index (``contexts.yaml``) and repository checks.

The index maps each context filename to its metadata. Two entry shapes are
read: a list of single-key mappings and a plain mapping::

    livingbeings_en.cxt:
    - title: Living Beings and Water
    - language: English

    livingbeings_en.cxt:
      title: Living Beings and Water
      language: en

The plain mapping is what :func:`serialize_index` writes. Two reserved
top-level keys exist: ``_collections`` (name -> list of filenames) and
``_schema`` (integer, currently 1).
"""
from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Optional

import yaml

from .errors import MetadataError, ParseError
from .formats import parse_burmeister

__all__ = [
    "INDEX_FILENAME",
    "CONTEXTS_DIR",
    "SCHEMA_VERSION",
    "RELATION_KINDS",
    "MANDATORY_FIELDS",
    "Relation",
    "ContextMetadata",
    "RepositoryIndex",
    "Finding",
    "ValidationReport",
    "iso639_languages",
    "normalize_language",
    "validate_filename",
    "check_index",
    "parse_index",
    "serialize_index",
    "validate_repository",
]

INDEX_FILENAME = "contexts.yaml"
CONTEXTS_DIR = "contexts"
SCHEMA_VERSION = 1
RELATION_KINDS = ("derived_from", "translated_from", "subcontext_of")
MANDATORY_FIELDS = ("title", "source", "description")
OPTIONAL_FIELDS = ("language", "relations")
MAX_STEM_LENGTH = 64


@lru_cache(maxsize=1)
def iso639_languages() -> dict[str, str]:
    """Bundled ISO 639-1 table: two-letter code -> English name."""
    text = resources.files("fcarepo").joinpath("data/iso639_1.tsv").read_text("utf-8")
    table = {}
    for line in text.splitlines():
        if line and not line.startswith("#"):
            code, name = line.split("\t")
            table[code] = name
    return table


@lru_cache(maxsize=1)
def _names_to_codes() -> dict[str, str]:
    out = {}
    for code, name in iso639_languages().items():
        out[name.lower()] = code
        out.setdefault(re.sub(r"\s*\(.*\)$", "", name).lower(), code)
    return out


def normalize_language(value: str) -> Optional[str]:
    """Map an ISO 639-1 code or an English language name to its code."""
    value = value.strip()
    if value in iso639_languages():
        return value
    return _names_to_codes().get(value.lower())


_STEM_RE = re.compile(r"[a-z0-9][a-z0-9_]*\Z")
_LANG_SUFFIX_RE = re.compile(r"_([a-z]{2})\Z")


def validate_filename(name: str) -> list[str]:
    """Check a context filename against the naming convention.

    Returns one message per violated rule, in rule order: extension, lowercase,
    language suffix, length. An empty list means the name is fine.
    """
    violations = []
    if name.endswith(".cxt"):
        stem = name[: -len(".cxt")]
    else:
        violations.append(f"{name}: extension: must end in '.cxt'")
        stem = os.path.splitext(name)[0]
    if not _STEM_RE.match(stem):
        violations.append(
            f"{name}: not lowercase: name may only use lowercase letters, digits "
            f"and underscores, and must not start with '_'"
        )
    match = _LANG_SUFFIX_RE.search(stem)
    if match is None:
        violations.append(f"{name}: missing language suffix: name must end in '_<ISO 639-1 code>'")
    elif match.group(1) not in iso639_languages():
        violations.append(
            f"{name}: language suffix: {match.group(1)!r} is not an ISO 639-1 code"
        )
    if len(stem) > MAX_STEM_LENGTH:
        violations.append(f"{name}: length: name is longer than {MAX_STEM_LENGTH} characters")
    return violations


@dataclass(frozen=True)
class Relation:
    kind: str
    target: str


@dataclass(frozen=True)
class ContextMetadata:
    title: str
    source: str
    description: str
    language: Optional[str] = None  # ISO 639-1 code; None means English
    relations: tuple = ()
    extra: dict = field(default_factory=dict, compare=True, hash=False)

    @property
    def language_code(self) -> str:
        return self.language or "en"

    @property
    def language_name(self) -> str:
        return iso639_languages()[self.language_code]


@dataclass(frozen=True)
class RepositoryIndex:
    entries: dict  # filename -> ContextMetadata, in file order
    collections: dict = field(default_factory=dict)  # name -> tuple of filenames
    schema: int = SCHEMA_VERSION

    def __contains__(self, filename):
        return filename in self.entries

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, filename) -> ContextMetadata:
        return self.entries[filename]


@dataclass(frozen=True, order=True)
class Finding:
    level: str  # "error" or "warning"
    file: str
    message: str

    def __str__(self):
        return f"{self.file}: {self.message}"

    def as_line(self) -> str:
        return f"{self.level.upper()}\t{self.file}\t{self.message}"

    def as_dict(self) -> dict:
        return {"file": self.file, "level": self.level, "message": self.message}


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple = ()

    @property
    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.level == "error"]

    @property
    def warnings(self) -> list[Finding]:
        return [f for f in self.findings if f.level == "warning"]

    @property
    def ok(self) -> bool:
        return not self.errors

    def __len__(self):
        return len(self.findings)

    def __iter__(self):
        return iter(self.findings)

    def to_text(self) -> str:
        return "".join(f.as_line() + "\n" for f in self.findings)

    def to_json(self) -> str:
        return json.dumps([f.as_dict() for f in self.findings], ensure_ascii=False, indent=2, sort_keys=True)


# -- parsing ----------------------------------------------------------------


class _DuplicateKey(Exception):
    def __init__(self, key, line):
        self.key, self.line = key, line


class _StrictLoader(yaml.SafeLoader):
    """SafeLoader that refuses duplicate mapping keys."""

    def construct_mapping(self, node, deep=False):
        seen = set()
        for key_node, _ in node.value:
            key = self.construct_object(key_node, deep=deep)
            if key in seen:
                raise _DuplicateKey(key, key_node.start_mark.line + 1)
            seen.add(key)
        return super().construct_mapping(node, deep=deep)


def _text(value) -> Optional[str]:
    if value is None:
        return None
    if isinstance(value, (dict, list)):
        return None
    return str(value).strip()


def _entry_fields(fname, raw, out):
    if isinstance(raw, dict):
        return dict(raw)
    if isinstance(raw, list):
        fields = {}
        for item in raw:
            if not isinstance(item, dict) or len(item) != 1:
                out.append(Finding("error", fname, f"list items must be single-key mappings, got {item!r}"))
                continue
            (key, value), = item.items()
            if key in fields:
                out.append(Finding("error", fname, f"duplicate field {key}"))
                continue
            fields[key] = value
        return fields
    out.append(Finding("error", fname, "metadata must be a mapping or a list of single-key mappings"))
    return None


def _relations(fname, raw, out):
    if raw is None:
        return ()
    if not isinstance(raw, list):
        out.append(Finding("error", fname, "relations must be a list"))
        return ()
    rels = []
    for item in raw:
        if isinstance(item, dict) and set(item) == {"kind", "target"}:
            kind, target = item["kind"], item["target"]
        elif isinstance(item, dict) and len(item) == 1:
            (kind, target), = item.items()
        else:
            out.append(Finding("error", fname, f"malformed relation {item!r}"))
            continue
        if kind not in RELATION_KINDS:
            out.append(Finding("error", fname, f"unknown relation kind {kind!r}"))
            continue
        target = str(target)
        bad = validate_filename(target)
        if bad:
            out.append(Finding("error", fname, f"relation {kind} target invalid: {bad[0]}"))
            continue
        rels.append(Relation(kind, target))
    return tuple(rels)


def check_index(text) -> tuple[Optional[RepositoryIndex], list[Finding]]:
    """Parse and check an index document, collecting every finding.

    The index is returned even when findings contain errors, so callers can
    keep cross-checking; it is ``None`` only when the document is unusable.
    """
    index, findings, _ = _check(text)
    return index, findings


def _check(text):
    """As :func:`check_index`, plus every filename key the document declares."""
    if isinstance(text, bytes):
        text = text.decode("utf-8-sig")
    out: list[Finding] = []
    try:
        doc = yaml.load(text, Loader=_StrictLoader)
    except _DuplicateKey as exc:
        return None, [Finding("error", str(exc.key), f"duplicate filename key (line {exc.line})")], []
    except yaml.YAMLError as exc:
        return None, [Finding("error", INDEX_FILENAME, f"malformed YAML: {exc}")], []
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        return None, [Finding("error", INDEX_FILENAME, "top level must be a mapping")], []

    schema = doc.get("_schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        out.append(Finding("error", INDEX_FILENAME, f"unsupported _schema {schema!r}"))

    entries: dict[str, ContextMetadata] = {}
    for fname, raw in doc.items():
        fname = str(fname)
        if fname.startswith("_"):
            if fname not in ("_schema", "_collections"):
                out.append(Finding("warning", INDEX_FILENAME, f"unknown reserved key {fname}"))
            continue
        for v in validate_filename(fname):
            out.append(Finding("error", fname, v.split(": ", 1)[1]))
        fields = _entry_fields(fname, raw, out)
        if fields is None:
            continue
        values = {}
        complete = True
        for key in MANDATORY_FIELDS:
            value = _text(fields.get(key))
            if key not in fields:
                out.append(Finding("error", fname, f"missing mandatory field {key}"))
                complete = False
            elif not value:
                out.append(Finding("error", fname, f"empty mandatory field {key}"))
                complete = False
            values[key] = value
        language = None
        if fields.get("language") is not None:
            raw_lang = fields["language"]
            # YAML 1.1 reads a bare `no` (Norwegian) as false
            raw_lang = "no" if raw_lang is False else _text(raw_lang) or ""
            language = normalize_language(raw_lang)
            if language is None:
                out.append(Finding("error", fname, f"invalid language {raw_lang!r}"))
        relations = _relations(fname, fields.get("relations"), out)
        extra = {k: v for k, v in fields.items() if k not in MANDATORY_FIELDS + OPTIONAL_FIELDS}
        for key in extra:
            out.append(Finding("warning", fname, f"unknown field {key}"))
        if complete:
            entries[fname] = ContextMetadata(
                values["title"], values["source"], values["description"], language, relations, extra
            )

    collections: dict[str, tuple] = {}
    raw_coll = doc.get("_collections") or {}
    if not isinstance(raw_coll, dict):
        out.append(Finding("error", INDEX_FILENAME, "_collections must be a mapping"))
        raw_coll = {}
    for cname, members in raw_coll.items():
        if not isinstance(members, list):
            out.append(Finding("error", INDEX_FILENAME, f"collection {cname} must be a list"))
            continue
        members = tuple(str(m) for m in members)
        for m in members:
            if m not in doc:
                out.append(Finding("error", m, f"collection {cname} references a context without index entry"))
        collections[str(cname)] = members

    for fname, meta in entries.items():
        for rel in meta.relations:
            if rel.target not in doc:
                out.append(
                    Finding("error", fname, f"dangling relation: {rel.kind} {rel.target} has no index entry")
                )

    index = RepositoryIndex(entries, collections, schema if isinstance(schema, int) else SCHEMA_VERSION)
    keys = [str(k) for k in doc if not str(k).startswith("_")]
    return index, out, keys


def parse_index(text, diagnostics: Optional[list] = None) -> RepositoryIndex:
    """Parse ``contexts.yaml``; raise :class:`MetadataError` on any error.

    Warnings (unknown fields and the like) go to ``diagnostics`` when given.
    """
    index, findings = check_index(text)
    errors = [str(f) for f in findings if f.level == "error"]
    if errors or index is None:
        raise MetadataError(errors)
    if diagnostics is not None:
        diagnostics.extend(f for f in findings if f.level == "warning")
    return index


def serialize_index(index: RepositoryIndex) -> str:
    doc: dict = {}
    if index.schema != SCHEMA_VERSION:
        doc["_schema"] = index.schema
    for fname, meta in index.entries.items():
        entry = {"title": meta.title, "source": meta.source, "description": meta.description}
        if meta.language is not None:
            entry["language"] = meta.language
        if meta.relations:
            entry["relations"] = [{r.kind: r.target} for r in meta.relations]
        entry.update(meta.extra)
        doc[fname] = entry
    if index.collections:
        doc["_collections"] = {k: list(v) for k, v in index.collections.items()}
    return yaml.safe_dump(doc, sort_keys=False, allow_unicode=True, width=1000)


# -- repository check -------------------------------------------------------


def validate_repository(root_dir) -> ValidationReport:
    """Cross-check ``contexts.yaml`` against the files under ``contexts/``.

    Raises ``OSError`` when ``root_dir`` cannot be read; every data problem
    becomes a finding instead.
    """
    root = os.fspath(root_dir)
    if not os.path.isdir(root):
        raise NotADirectoryError(root)
    os.listdir(root)  # surfaces permission errors

    findings: list[Finding] = []
    index_path = os.path.join(root, INDEX_FILENAME)
    ctx_dir = os.path.join(root, CONTEXTS_DIR)
    # entries rejected for missing fields still count as declared
    entries: list = []
    if os.path.isfile(index_path):
        with open(index_path, "rb") as fh:
            _, index_findings, entries = _check(fh.read())
        findings.extend(index_findings)
    else:
        findings.append(Finding("error", INDEX_FILENAME, "index file missing"))

    files = []
    if os.path.isdir(ctx_dir):
        files = sorted(
            f for f in os.listdir(ctx_dir) if os.path.isfile(os.path.join(ctx_dir, f))
        )
    else:
        findings.append(Finding("error", CONTEXTS_DIR, "contexts directory missing"))

    for fname in files:
        if fname not in entries:
            findings.append(Finding("error", fname, "file without index entry"))
            for v in validate_filename(fname):
                findings.append(Finding("error", fname, v.split(": ", 1)[1]))
        with open(os.path.join(ctx_dir, fname), "rb") as fh:
            data = fh.read()
        warnings: list = []
        try:
            parse_burmeister(data, warnings)
        except ParseError as exc:
            findings.append(Finding("error", fname, f"malformed context: {exc.diagnostics[0]}"))
        except UnicodeDecodeError as exc:
            findings.append(Finding("error", fname, f"malformed context: not UTF-8 ({exc.reason})"))
        for w in warnings:
            findings.append(Finding("warning", fname, f"non-strict Burmeister form: {w}"))

    present = set(files)
    for fname in entries:
        if fname not in present:
            findings.append(Finding("error", fname, "index entry without file"))

    return ValidationReport(tuple(sorted(set(findings), key=lambda f: (f.file, f.level, f.message))))
