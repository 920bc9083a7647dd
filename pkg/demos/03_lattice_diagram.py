"""Concept lattice of the living beings context: covers, layout, SVG and DOT."""
import os
import tempfile

import fcarepo

HERE = os.path.dirname(os.path.abspath(__file__))
ctx = fcarepo.read_context(os.path.join(HERE, "..", "tests", "fixtures", "livingbeings_en.cxt"))

lattice = fcarepo.build_lattice(fcarepo.enumerate_concepts(ctx))
print(len(lattice), "concepts,", len(lattice.covers), "cover edges")

top = lattice.concepts[lattice.top_index]
print("top extent size:", len(top.extent), " bottom intent size:", len(lattice.concepts[lattice.bottom_index].intent))

# %% reduced labelling puts each name on exactly one node
labels = fcarepo.reduced_labels(lattice, ctx)
for i in sorted(labels.attributes):
    print(f"c{i}: {', '.join(labels.attributes[i])}")

# %% layered layout: y is the rank counted from the top
layout = fcarepo.layout_layered(lattice)
print("ranks:", layout.ranks)

# %% render and write
out = tempfile.mkdtemp(prefix="lattice-")
with open(os.path.join(out, "livingbeings.svg"), "w", encoding="utf-8") as fh:
    fh.write(fcarepo.render_svg(lattice, layout, labels))
with open(os.path.join(out, "livingbeings.dot"), "w", encoding="utf-8") as fh:
    fh.write(fcarepo.render_dot(lattice, labels))
print("written to", out)
