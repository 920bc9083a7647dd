"""A walk through the FCA tools comparison table: derivations, concepts, implications."""
import os

import fcarepo
from fcarepo.context import compute_statistics

HERE = os.path.dirname(os.path.abspath(__file__))
FIXTURES = os.path.join(HERE, "..", "tests", "fixtures")

# %% load the context from its Burmeister file
ctx = fcarepo.read_context(os.path.join(FIXTURES, "tools_en.cxt"))
print(ctx.shape)                 # (objects, attributes)
print(ctx.attributes[:4])
print(ctx.incidence[:3, :6].astype(int))  # a read-only numpy bool matrix

# %% statistics; density is an exact fraction
stats = compute_statistics(ctx)
print(stats.incidence_count, stats.density, float(stats.density))

# %% derivation operators take index sets and return frozensets of indices
attr = {name: i for i, name in enumerate(ctx.attributes)}
online = fcarepo.attribute_derivation(ctx, {attr["Online"]})
print("tools that run online:", [ctx.objects[g] for g in sorted(online)])
closed = fcarepo.attribute_closure(ctx, {attr["Online"]})
print("closure of {Online}:", [ctx.attributes[m] for m in sorted(closed)])

# %% all formal concepts in lectic order of their intents
concepts = fcarepo.enumerate_concepts(ctx)
print(len(concepts), "concepts")
for c in concepts[:5]:
    print(sorted(ctx.objects[g] for g in c.extent), "|", sorted(ctx.attributes[m] for m in c.intent))

# the brute-force enumerator is only a cross-check, but it agrees
assert set(concepts) == fcarepo.enumerate_concepts_bruteforce(ctx)

# %% the canonical (Duquenne-Guigues) basis
basis = fcarepo.canonical_basis(ctx)
print(len(basis), "implications, e.g.")
for imp in basis[:5]:
    premise, conclusion = imp.names(ctx)
    print("  ", premise, "=>", conclusion)

# every attribute set closes the same way under the basis as in the context
s = frozenset({attr["GUI"], attr["Scaling"]})
print(fcarepo.close_under_implications(basis, s) == fcarepo.attribute_closure(ctx, s))

# %% budgets stop runaway enumerations loudly
try:
    fcarepo.enumerate_concepts(ctx, budget=10)
except fcarepo.BudgetExceeded as exc:
    print("stopped:", exc)
