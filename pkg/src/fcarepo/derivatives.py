"""Derived artifacts for each indexed context: statistics, concepts, basis, diagram, page.

Everything written here depends only on repository content. JSON is emitted
with sorted keys and arrays in enumeration order so that CI diffs stay small.
"""
from __future__ import annotations

import json
import logging
import os
import tempfile
from dataclasses import dataclass, field, replace
from typing import Optional

from .algorithms import DEFAULT_BUDGET, FormalConcept, Implication, canonical_basis, enumerate_concepts
from .context import ContextStatistics, FormalContext, compute_statistics
from .errors import BudgetExceeded
from .formats import read_context
from .index import CONTEXTS_DIR, INDEX_FILENAME, ContextMetadata, parse_index
from .lattice import build_lattice, layout_layered, reduced_labels, render_svg

__all__ = [
    "DERIVATIVE_FILES",
    "dump_json",
    "statistics_json",
    "concepts_json",
    "basis_json",
    "lattice_svg",
    "context_page",
    "summary_page",
    "DerivativesResult",
    "generate_derivatives",
]

log = logging.getLogger(__name__)

DERIVATIVE_FILES = ("stats.json", "concepts.json", "basis.json", "lattice.svg", "index.md")


def dump_json(value) -> str:
    return json.dumps(value, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def _names(labels, indices):
    return [labels[i] for i in sorted(indices)]


def statistics_json(stats: ContextStatistics) -> str:
    return dump_json(stats.as_dict())


def concepts_json(ctx: FormalContext, concepts: list[FormalConcept]) -> str:
    return dump_json(
        [
            {"extent": _names(ctx.objects, c.extent), "intent": _names(ctx.attributes, c.intent)}
            for c in concepts
        ]
    )


def basis_json(ctx: FormalContext, basis: list[Implication]) -> str:
    out = []
    for imp in basis:
        premise, conclusion = imp.names(ctx)
        out.append({"conclusion": conclusion, "premise": premise})
    return dump_json(out)


def lattice_svg(ctx: FormalContext, concepts: list[FormalConcept]) -> str:
    lattice = build_lattice(concepts)
    return render_svg(lattice, layout_layered(lattice), reduced_labels(lattice, ctx))


def _md(text: str) -> str:
    return text.replace("|", "\\|").replace("\n", " ")


def context_page(
    filename: str,
    meta: ContextMetadata,
    stats: ContextStatistics,
    implications: Optional[int],
    has_diagram: bool,
) -> str:
    lines = [
        f"# {meta.title}",
        "",
        f"- File: `{filename}`",
        f"- Source: {meta.source}",
        f"- Language: {meta.language_name} (`{meta.language_code}`)",
    ]
    for rel in meta.relations:
        lines.append(f"- {rel.kind.replace('_', ' ').capitalize()}: `{rel.target}`")
    lines += ["", meta.description, "", "## Statistics", "", "| Measure | Value |", "|---|---|"]
    d = stats.density
    rows = [
        ("Objects", stats.object_count),
        ("Attributes", stats.attribute_count),
        ("Incidences", stats.incidence_count),
        ("Density", f"{d.numerator}/{d.denominator} ({float(d):.4f})"),
        ("Concepts", "n/a" if stats.concept_count is None else stats.concept_count),
        ("Implications in canonical basis", "n/a" if implications is None else implications),
    ]
    lines += [f"| {k} | {v} |" for k, v in rows]
    if stats.object_count * stats.attribute_count == 0:
        lines += ["", "Density is 0 by convention when the context has no objects or no attributes."]
    lines += ["", "## Concept lattice", ""]
    lines.append("![Concept lattice](lattice.svg)" if has_diagram else "Diagram not generated (budget exceeded).")
    return "\n".join(lines) + "\n"


def summary_page(rows: list[tuple]) -> str:
    lines = [
        "# Contexts",
        "",
        "| File | Title | Objects | Attributes | Incidences | Density | Concepts | Implications |",
        "|---|---|---|---|---|---|---|---|",
    ]
    for filename, meta, stats, n_imps in rows:
        stem = filename[: -len(".cxt")]
        concepts = "n/a" if stats.concept_count is None else stats.concept_count
        imps = "n/a" if n_imps is None else n_imps
        lines.append(
            f"| [{filename}]({stem}/index.md) | {_md(meta.title)} | {stats.object_count} | "
            f"{stats.attribute_count} | {stats.incidence_count} | {float(stats.density):.4f} | "
            f"{concepts} | {imps} |"
        )
    return "\n".join(lines) + "\n"


def _write(path: str, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), prefix=".tmp-")
    with os.fdopen(fd, "wb") as fh:
        fh.write(text.encode("utf-8"))
    os.chmod(tmp, 0o644)
    os.replace(tmp, path)


@dataclass
class DerivativesResult:
    written: list = field(default_factory=list)
    warnings: list = field(default_factory=list)


def generate_derivatives(
    root_dir, out_dir, budget: int = DEFAULT_BUDGET, strict: bool = False
) -> DerivativesResult:
    """Write ``<out_dir>/<stem>/{stats.json,concepts.json,basis.json,lattice.svg,index.md}``
    for every indexed context, then ``<out_dir>/summary.md``.

    The repository is assumed to have passed validation. A context whose
    concepts or basis exceed ``budget`` loses those derivatives and gets a
    warning; with ``strict=True`` the :class:`BudgetExceeded` propagates.
    """
    root, out = os.fspath(root_dir), os.fspath(out_dir)
    with open(os.path.join(root, INDEX_FILENAME), "rb") as fh:
        index = parse_index(fh.read())
    result = DerivativesResult()
    rows = []
    os.makedirs(out, exist_ok=True)
    for filename, meta in index.entries.items():
        ctx = read_context(os.path.join(root, CONTEXTS_DIR, filename), "burmeister")
        stem = filename[: -len(".cxt")]
        target = os.path.join(out, stem)
        os.makedirs(target, exist_ok=True)
        files: dict[str, str] = {}

        stats = compute_statistics(ctx)
        concepts = basis = None
        try:
            concepts = enumerate_concepts(ctx, budget)
            stats = replace(stats, concept_count=len(concepts))
        except BudgetExceeded as exc:
            if strict:
                raise
            result.warnings.append(f"{filename}: concepts skipped: {exc}")
        try:
            basis = canonical_basis(ctx, budget)
        except BudgetExceeded as exc:
            if strict:
                raise
            result.warnings.append(f"{filename}: basis skipped: {exc}")

        files["stats.json"] = statistics_json(stats)
        if concepts is not None:
            files["concepts.json"] = concepts_json(ctx, concepts)
            files["lattice.svg"] = lattice_svg(ctx, concepts)
        if basis is not None:
            files["basis.json"] = basis_json(ctx, basis)
        n_imps = None if basis is None else len(basis)
        files["index.md"] = context_page(filename, meta, stats, n_imps, concepts is not None)

        for name in DERIVATIVE_FILES:
            path = os.path.join(target, name)
            if name in files:
                _write(path, files[name])
                result.written.append(path)
            elif os.path.exists(path):
                os.remove(path)  # stale from an earlier, larger budget
        rows.append((filename, meta, stats, n_imps))

    summary = os.path.join(out, "summary.md")
    _write(summary, summary_page(rows))
    result.written.append(summary)
    for w in result.warnings:
        log.warning(w)
    return result
