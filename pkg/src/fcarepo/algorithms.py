"""Concept enumeration (NextClosure), a brute-force oracle and the canonical basis.

Attribute sets are handled as int bitmasks internally; attribute ``i`` of the
context is bit ``i``. The lectic order used throughout is the usual one with
the declared attribute order: ``A < B`` iff the first attribute in which the
two sets differ belongs to ``B``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .context import FormalContext, indices_of, mask_of
from .errors import BudgetExceeded

__all__ = [
    "DEFAULT_BUDGET",
    "BRUTEFORCE_MAX_ATTRIBUTES",
    "FormalConcept",
    "Implication",
    "next_closure",
    "iter_intents",
    "enumerate_concepts",
    "enumerate_concepts_bruteforce",
    "canonical_basis",
    "implication_holds",
    "close_under_implications",
    "lectic_less",
]

DEFAULT_BUDGET = 1_000_000
BRUTEFORCE_MAX_ATTRIBUTES = 20


@dataclass(frozen=True)
class FormalConcept:
    extent: frozenset
    intent: frozenset


@dataclass(frozen=True)
class Implication:
    premise: frozenset
    conclusion: frozenset

    def canonical(self) -> "Implication":
        """Same implication with the premise removed from the conclusion."""
        return Implication(self.premise, self.conclusion - self.premise)

    def names(self, ctx: FormalContext) -> tuple[list[str], list[str]]:
        names = ctx.attributes
        imp = self.canonical()
        return [names[i] for i in sorted(imp.premise)], [names[i] for i in sorted(imp.conclusion)]


def lectic_less(a: Iterable[int], b: Iterable[int]) -> bool:
    diff = set(a) ^ set(b)
    return bool(diff) and min(diff) in set(b)


def _next_closed(current: int, n: int, close: Callable[[int], int]) -> Optional[int]:
    """Lectically next ``close``-closed set after ``current`` over ``n`` attributes."""
    a = current
    for i in range(n - 1, -1, -1):
        bit = 1 << i
        if a & bit:
            a &= ~bit
            continue
        b = close(a | bit)
        # a now holds only elements below i
        if not (b & ~a) & (bit - 1):
            return b
    return None


def next_closure(ctx: FormalContext, current: Optional[Iterable[int]] = None):
    """Return the closed attribute set lectically after ``current``.

    ``None`` starts the enumeration (result: closure of the empty set); after
    the full attribute set the result is ``None``.
    """
    if current is None:
        return indices_of(ctx.closure_mask(0))
    n = len(ctx.attributes)
    a = mask_of(current)
    if a >> n:
        raise IndexError("attribute index out of range")
    if ctx.closure_mask(a) != a:
        raise ValueError(f"{sorted(current)} is not a closed attribute set")
    nxt = _next_closed(a, n, ctx.closure_mask)
    return None if nxt is None else indices_of(nxt)


def iter_intents(ctx: FormalContext, budget: int = DEFAULT_BUDGET) -> Iterator[int]:
    """Yield all intents as bitmasks in lectic order."""
    n = len(ctx.attributes)
    close = ctx.closure_mask
    a: Optional[int] = close(0)
    count = 0
    while a is not None:
        count += 1
        if count > budget:
            raise BudgetExceeded(budget, "concepts")
        yield a
        a = _next_closed(a, n, close)


def enumerate_concepts(ctx: FormalContext, budget: int = DEFAULT_BUDGET) -> list[FormalConcept]:
    """All formal concepts of ``ctx``, intents in lectic order.

    Raises :class:`BudgetExceeded` instead of truncating when the number of
    concepts passes ``budget``.
    """
    return [
        FormalConcept(indices_of(ctx.extent_mask(a)), indices_of(a))
        for a in iter_intents(ctx, budget)
    ]


def enumerate_concepts_bruteforce(ctx: FormalContext) -> set[FormalConcept]:
    """Test every attribute subset for closedness. Exponential; small contexts only."""
    n = len(ctx.attributes)
    if n > BRUTEFORCE_MAX_ATTRIBUTES:
        raise ValueError(
            f"brute force limited to {BRUTEFORCE_MAX_ATTRIBUTES} attributes, context has {n}"
        )
    found = set()
    for a in range(1 << n):
        ext = ctx.extent_mask(a)
        if ctx.intent_mask(ext) == a:
            found.add(FormalConcept(indices_of(ext), indices_of(a)))
    return found


def _close_masks(imps: Sequence[tuple[int, int]], a: int, proper: bool = False) -> int:
    changed = True
    while changed:
        changed = False
        for p, c in imps:
            if p & a == p and (c & a) != c and (not proper or p != a):
                a |= c
                changed = True
    return a


def canonical_basis(ctx: FormalContext, budget: int = DEFAULT_BUDGET) -> list[Implication]:
    """Duquenne-Guigues basis, premises (pseudo-intents) in lectic order.

    Intents and pseudo-intents are enumerated together by NextClosure over
    the closure operator "saturate with every known implication whose premise
    is a proper subset". ``budget`` bounds the number of sets visited.
    """
    n = len(ctx.attributes)
    full = ctx.all_attributes_mask
    imps: list[tuple[int, int]] = []

    def pseudo_close(a: int) -> int:
        return _close_masks(imps, a, proper=True)

    a: Optional[int] = 0
    visited = 0
    while a is not None:
        visited += 1
        if visited > budget:
            raise BudgetExceeded(budget, "closed sets while computing the basis")
        closed = ctx.closure_mask(a)
        if closed != a:
            imps.append((a, closed))
        if a == full:
            break
        a = _next_closed(a, n, pseudo_close)
    return [Implication(indices_of(p), indices_of(c & ~p)) for p, c in imps]


def implication_holds(ctx: FormalContext, imp: Implication) -> bool:
    n = len(ctx.attributes)
    p, c = mask_of(imp.premise), mask_of(imp.conclusion)
    if (p | c) >> n:
        raise IndexError("attribute index out of range")
    return ctx.closure_mask(p) & c == c


def close_under_implications(
    implications: Iterable[Implication], attrs: Iterable[int]
) -> frozenset[int]:
    """Smallest superset of ``attrs`` respecting every implication."""
    imps = [(mask_of(i.premise), mask_of(i.conclusion)) for i in implications]
    return indices_of(_close_masks(imps, mask_of(attrs)))
