"""Concept lattices: cover relation, layered layout, SVG and DOT rendering."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence
from xml.sax.saxutils import escape

from .algorithms import FormalConcept
from .context import FormalContext, indices_of, mask_of

__all__ = [
    "ConceptLattice",
    "DiagramLayout",
    "DiagramLabels",
    "build_lattice",
    "layout_layered",
    "reduced_labels",
    "render_svg",
    "render_dot",
]


@dataclass(frozen=True)
class ConceptLattice:
    """Concepts plus their Hasse diagram.

    ``covers`` holds ``(lower, upper)`` index pairs: the extent of ``lower``
    is a maximal proper subset of the extent of ``upper``.
    """

    concepts: tuple
    covers: frozenset
    top_index: int
    bottom_index: int
    _up: tuple = field(repr=False, compare=False, default=())
    _down: tuple = field(repr=False, compare=False, default=())

    def __len__(self):
        return len(self.concepts)

    def upper_covers(self, i: int) -> tuple[int, ...]:
        return self._up[i]

    def lower_covers(self, i: int) -> tuple[int, ...]:
        return self._down[i]

    def leq(self, i: int, j: int) -> bool:
        """Concept ``i`` lies below (or equals) concept ``j``."""
        return self.concepts[i].extent <= self.concepts[j].extent


def build_lattice(concepts: Sequence[FormalConcept]) -> ConceptLattice:
    """Compute covers by keeping, for each concept, the minimal strict supersets."""
    concepts = tuple(concepts)
    if not concepts:
        raise ValueError("cannot build a lattice from an empty concept list")
    if len(set(concepts)) != len(concepts):
        raise ValueError("duplicate concepts")
    extents = [mask_of(c.extent) for c in concepts]
    if len(set(extents)) != len(extents):
        raise ValueError("two concepts share an extent")
    sizes = [len(c.extent) for c in concepts]
    by_size = sorted(range(len(concepts)), key=lambda i: (sizes[i], i))

    up: list[list[int]] = [[] for _ in concepts]
    down: list[list[int]] = [[] for _ in concepts]
    covers = set()
    for i in range(len(concepts)):
        ei = extents[i]
        minimal: list[int] = []
        for j in by_size:
            ej = extents[j]
            if sizes[j] <= sizes[i] or ej & ei != ei:
                continue
            if any(extents[k] & ej == extents[k] for k in minimal):
                continue
            minimal.append(j)
        for j in sorted(minimal):
            up[i].append(j)
            down[j].append(i)
            covers.add((i, j))

    top = by_size[-1]
    bottom = max(range(len(concepts)), key=lambda i: (len(concepts[i].intent), -i))
    if any(e & extents[top] != e for e in extents):
        raise ValueError("concept set has no greatest element")
    if any(not concepts[bottom].intent >= c.intent for c in concepts):
        raise ValueError("concept set has no least element")
    return ConceptLattice(
        concepts,
        frozenset(covers),
        top,
        bottom,
        tuple(tuple(u) for u in up),
        tuple(tuple(sorted(d)) for d in down),
    )


@dataclass(frozen=True)
class DiagramLayout:
    """Per-concept ``(x, y)``; ``y`` is the rank (0 at the top, growing downward)."""

    positions: tuple
    ranks: tuple


def layout_layered(lattice: ConceptLattice) -> DiagramLayout:
    n = len(lattice)
    order = sorted(range(n), key=lambda i: (-len(lattice.concepts[i].extent), i))
    rank = [0] * n
    for i in order:
        ups = lattice.upper_covers(i)
        if ups:
            rank[i] = max(rank[u] for u in ups) + 1

    layers: dict[int, list[int]] = {}
    for i in range(n):
        layers.setdefault(rank[i], []).append(i)

    x = [0.0] * n
    for r in sorted(layers):
        members = layers[r]
        if r > 0:

            def bary(i):
                ups = lattice.upper_covers(i)
                return sum(x[u] for u in ups) / len(ups)

            members = sorted(members, key=lambda i: (bary(i), i))
        offset = (len(members) - 1) / 2
        for pos, i in enumerate(members):
            x[i] = pos - offset
    return DiagramLayout(tuple((x[i], float(rank[i])) for i in range(n)), tuple(rank))


@dataclass(frozen=True)
class DiagramLabels:
    """Reduced labelling: names attached to attribute and object concepts."""

    attributes: dict
    objects: dict


def reduced_labels(lattice: ConceptLattice, ctx: FormalContext) -> DiagramLabels:
    """Label each attribute at its maximal and each object at its minimal concept."""
    by_intent = {c.intent: i for i, c in enumerate(lattice.concepts)}
    by_extent = {c.extent: i for i, c in enumerate(lattice.concepts)}
    attrs: dict[int, list[str]] = {}
    objs: dict[int, list[str]] = {}
    for m, name in enumerate(ctx.attributes):
        intent = indices_of(ctx.closure_mask(1 << m))
        attrs.setdefault(by_intent[intent], []).append(name)
    for g, name in enumerate(ctx.objects):
        extent = indices_of(ctx.extent_mask(ctx.row_masks[g]))
        objs.setdefault(by_extent[extent], []).append(name)
    return DiagramLabels(attrs, objs)


_DX, _DY, _MARGIN, _R = 80.0, 90.0, 60.0, 8.0


def _fmt(v: float) -> str:
    return f"{v:.1f}"


def render_svg(
    lattice: ConceptLattice,
    layout: DiagramLayout,
    labels: Optional[DiagramLabels] = None,
) -> str:
    """Render the diagram as an SVG 1.1 document (circles, lines, text only)."""
    if len(layout.positions) != len(lattice):
        raise ValueError("layout does not match lattice")
    xs = [p[0] for p in layout.positions]
    ys = [p[1] for p in layout.positions]
    min_x = min(xs)
    px = [(x - min_x) * _DX + _MARGIN for x in xs]
    py = [y * _DY + _MARGIN for y in ys]
    width = (max(xs) - min_x) * _DX + 2 * _MARGIN
    height = max(ys) * _DY + 2 * _MARGIN

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_fmt(width)}" height="{_fmt(height)}" '
        f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
        '<g stroke="#000000" stroke-width="1">',
    ]
    for lo, hi in sorted(lattice.covers):
        out.append(
            f'<line x1="{_fmt(px[lo])}" y1="{_fmt(py[lo])}" '
            f'x2="{_fmt(px[hi])}" y2="{_fmt(py[hi])}"/>'
        )
    out.append("</g>")
    out.append('<g fill="#ffffff" stroke="#000000" stroke-width="1">')
    for i in range(len(lattice)):
        out.append(f'<circle id="c{i}" cx="{_fmt(px[i])}" cy="{_fmt(py[i])}" r="{_fmt(_R)}"/>')
    out.append("</g>")
    if labels is not None:
        out.append('<g font-family="sans-serif" font-size="10" text-anchor="middle">')
        for i in sorted(labels.attributes):
            text = escape(", ".join(labels.attributes[i]))
            out.append(f'<text x="{_fmt(px[i])}" y="{_fmt(py[i] - _R - 4)}">{text}</text>')
        for i in sorted(labels.objects):
            text = escape(", ".join(labels.objects[i]))
            out.append(f'<text x="{_fmt(px[i])}" y="{_fmt(py[i] + _R + 12)}">{text}</text>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def render_dot(lattice: ConceptLattice, labels: Optional[DiagramLabels] = None) -> str:
    """Graphviz digraph, one node ``c<index>`` per concept, edges lower -> upper."""
    out = ["digraph lattice {", "  rankdir=BT;", "  node [shape=circle];"]
    for i in range(len(lattice)):
        attrs = ""
        if labels is not None:
            parts = []
            if i in labels.attributes:
                parts.append(", ".join(labels.attributes[i]))
            if i in labels.objects:
                parts.append(", ".join(labels.objects[i]))
            label = "\\n".join(_dot_escape(p) for p in parts)
            attrs = f' [label="{label}"]'
        out.append(f"  c{i}{attrs};")
    for lo, hi in sorted(lattice.covers):
        out.append(f"  c{lo} -> c{hi};")
    out.append("}")
    return "\n".join(out) + "\n"
