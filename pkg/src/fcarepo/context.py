"""Formal context data model and the derivation/closure operators.

Objects and attributes are identified by position; names are labels only.
Internally every row and column is kept as an ``int`` bitmask (bit ``i`` set
means index ``i`` is present), which is what the enumeration algorithms work
on. The public operators take and return ``frozenset`` of indices.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import ContextError

__all__ = [
    "FormalContext",
    "ContextStatistics",
    "object_derivation",
    "attribute_derivation",
    "attribute_closure",
    "subcontext",
    "compute_statistics",
    "mask_of",
    "indices_of",
]


def mask_of(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def indices_of(mask: int) -> frozenset[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return frozenset(out)


def _clean_names(names: Iterable[str], kind: str) -> tuple[str, ...]:
    cleaned = []
    seen = set()
    for raw in names:
        if not isinstance(raw, str):
            raise ContextError(f"{kind} name {raw!r} is not a string")
        name = raw.rstrip()
        if not name:
            raise ContextError(f"empty {kind} name")
        if "\n" in name or "\r" in name:
            raise ContextError(f"{kind} name {name!r} contains a line break")
        if name in seen:
            raise ContextError(f"duplicate {kind} name {name!r}")
        seen.add(name)
        cleaned.append(name)
    return tuple(cleaned)


class FormalContext:
    """An immutable formal context (objects, attributes, incidence).

    Parameters
    ----------
    objects, attributes : sequence of str
        Names in file order. Trailing whitespace is stripped; duplicates,
        empty names and names containing line breaks are rejected.
    incidence : array_like of bool, shape (len(objects), len(attributes))
    name : str, optional
        Short label, e.g. the comment line of a Burmeister file.
    """

    __slots__ = ("_name", "_objects", "_attributes", "_incidence", "_rows", "_cols")

    def __init__(
        self,
        objects: Sequence[str],
        attributes: Sequence[str],
        incidence,
        name: str = "",
    ):
        if name is None:
            name = ""
        name = name.rstrip()
        if "\n" in name or "\r" in name:
            raise ContextError("context name contains a line break")
        self._name = name
        self._objects = _clean_names(objects, "object")
        self._attributes = _clean_names(attributes, "attribute")
        shape = (len(self._objects), len(self._attributes))
        arr = np.asarray(incidence, dtype=bool)
        if arr.size == 0 and 0 in shape:
            arr = np.zeros(shape, dtype=bool)
        if arr.shape != shape:
            raise ContextError(f"incidence has shape {arr.shape}, expected {shape}")
        arr = arr.copy()
        arr.setflags(write=False)
        self._incidence = arr
        self._rows = tuple(mask_of(np.flatnonzero(row).tolist()) for row in arr)
        self._cols = tuple(mask_of(np.flatnonzero(col).tolist()) for col in arr.T)

    @classmethod
    def from_pairs(cls, objects, attributes, pairs: Iterable[tuple[int, int]], name: str = ""):
        """Build a context from ``(object_index, attribute_index)`` pairs."""
        arr = np.zeros((len(objects), len(attributes)), dtype=bool)
        for g, m in pairs:
            arr[g, m] = True
        return cls(objects, attributes, arr, name=name)

    @property
    def name(self) -> str:
        return self._name

    @property
    def objects(self) -> tuple[str, ...]:
        return self._objects

    @property
    def attributes(self) -> tuple[str, ...]:
        return self._attributes

    @property
    def incidence(self) -> np.ndarray:
        """Read-only boolean matrix, rows are objects."""
        return self._incidence

    @property
    def shape(self) -> tuple[int, int]:
        return self._incidence.shape

    @property
    def row_masks(self) -> tuple[int, ...]:
        return self._rows

    @property
    def column_masks(self) -> tuple[int, ...]:
        return self._cols

    @property
    def all_objects_mask(self) -> int:
        return (1 << len(self._objects)) - 1

    @property
    def all_attributes_mask(self) -> int:
        return (1 << len(self._attributes)) - 1

    def pairs(self) -> list[tuple[int, int]]:
        """Incident ``(object, attribute)`` index pairs, sorted."""
        return [(int(g), int(m)) for g, m in np.argwhere(self._incidence)]

    # bitmask-level operators used by the algorithms

    def intent_mask(self, objs: int) -> int:
        """Attributes shared by all objects in ``objs``."""
        out = self.all_attributes_mask
        rows = self._rows
        g = 0
        while objs:
            if objs & 1:
                out &= rows[g]
            objs >>= 1
            g += 1
        return out

    def extent_mask(self, attrs: int) -> int:
        """Objects having every attribute in ``attrs``."""
        out = self.all_objects_mask
        cols = self._cols
        m = 0
        while attrs:
            if attrs & 1:
                out &= cols[m]
            attrs >>= 1
            m += 1
        return out

    def closure_mask(self, attrs: int) -> int:
        return self.intent_mask(self.extent_mask(attrs))

    def __eq__(self, other):
        if not isinstance(other, FormalContext):
            return NotImplemented
        return (
            self._name == other._name
            and self._objects == other._objects
            and self._attributes == other._attributes
            and self._rows == other._rows
        )

    def __hash__(self):
        return hash((self._name, self._objects, self._attributes, self._rows))

    def __repr__(self):
        g, m = self.shape
        label = f" {self._name!r}" if self._name else ""
        return f"<FormalContext{label} {g}x{m}>"

    def __str__(self):
        width = max((len(o) for o in self._objects), default=0)
        lines = [" " * width + " |" + "|".join(self._attributes) + "|"]
        for obj, row in zip(self._objects, self._incidence):
            cells = "|".join(
                ("X" if x else ".").ljust(len(a)) for a, x in zip(self._attributes, row)
            )
            lines.append(obj.ljust(width) + " |" + cells + "|")
        return "\n".join(lines)


def _check(indices: Iterable[int], bound: int, kind: str) -> int:
    mask = 0
    for i in indices:
        if not 0 <= i < bound:
            raise IndexError(f"{kind} index {i} out of range (0..{bound - 1})")
        mask |= 1 << i
    return mask


def object_derivation(ctx: FormalContext, objs: Iterable[int]) -> frozenset[int]:
    """Attributes common to all given objects (all attributes for no objects)."""
    return indices_of(ctx.intent_mask(_check(objs, len(ctx.objects), "object")))


def attribute_derivation(ctx: FormalContext, attrs: Iterable[int]) -> frozenset[int]:
    """Objects having all given attributes (all objects for no attributes)."""
    return indices_of(ctx.extent_mask(_check(attrs, len(ctx.attributes), "attribute")))


def attribute_closure(ctx: FormalContext, attrs: Iterable[int]) -> frozenset[int]:
    return indices_of(ctx.closure_mask(_check(attrs, len(ctx.attributes), "attribute")))


def subcontext(
    ctx: FormalContext, objs: Iterable[int], attrs: Iterable[int]
) -> FormalContext:
    """Restrict ``ctx`` to the given objects and attributes, keeping file order."""
    gs = sorted(indices_of(_check(objs, len(ctx.objects), "object")))
    ms = sorted(indices_of(_check(attrs, len(ctx.attributes), "attribute")))
    arr = ctx.incidence[np.ix_(gs, ms)] if gs and ms else np.zeros((len(gs), len(ms)), bool)
    return FormalContext(
        [ctx.objects[g] for g in gs], [ctx.attributes[m] for m in ms], arr, name=ctx.name
    )


@dataclass(frozen=True)
class ContextStatistics:
    object_count: int
    attribute_count: int
    incidence_count: int
    density: Fraction
    concept_count: Optional[int] = None

    def as_dict(self) -> dict:
        """JSON-friendly form; density given exactly and as a float."""
        return {
            "objects": self.object_count,
            "attributes": self.attribute_count,
            "incidences": self.incidence_count,
            "density": f"{self.density.numerator}/{self.density.denominator}",
            "density_float": round(float(self.density), 6),
            "concepts": self.concept_count,
        }


def compute_statistics(ctx: FormalContext) -> ContextStatistics:
    g, m = ctx.shape
    incidences = int(ctx.incidence.sum())
    density = Fraction(incidences, g * m) if g * m else Fraction(0)
    return ContextStatistics(g, m, incidences, density)
