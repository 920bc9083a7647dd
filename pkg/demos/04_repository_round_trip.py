"""A tiny repository end to end: index, validation, derivatives, HTTP access.

Everything happens in a temporary directory; the HTTP part serves that
directory from localhost, so no external network is needed.
"""
import functools
import os
import shutil
import tempfile
import threading
from http.server import SimpleHTTPRequestHandler, ThreadingHTTPServer

import fcarepo
from fcarepo.cli import main
from fcarepo.client import RepoConfig

HERE = os.path.dirname(os.path.abspath(__file__))
FIXTURES = os.path.join(HERE, "..", "tests", "fixtures")

root = tempfile.mkdtemp(prefix="fca-repo-")
os.makedirs(os.path.join(root, "contexts"))
shutil.copy(os.path.join(FIXTURES, "livingbeings_en.cxt"), os.path.join(root, "contexts"))

# %% the index, in the list-of-single-key-maps shape
index_text = """\
livingbeings_en.cxt:
- title: Living Beings and Water
- source: Ganter and Wille, Formal Concept Analysis (1999)
- description: conditions different living beings need
- language: English
"""
with open(os.path.join(root, "contexts.yaml"), "w", encoding="utf-8") as fh:
    fh.write(index_text)

index = fcarepo.parse_index(index_text)
print(index["livingbeings_en.cxt"].language_code)   # names are normalised to ISO 639-1

# %% naming rules and repository validation
print(fcarepo.validate_filename("LivingBeings.cxt"))
report = fcarepo.validate_repository(root)
print("valid" if report.ok else report.to_text())

# %% derivatives, as a CI job would produce them
site = os.path.join(root, "_site")
main(["gen-derivatives", root, site])
for dirpath, _, files in sorted(os.walk(site)):
    for f in sorted(files):
        print(os.path.relpath(os.path.join(dirpath, f), site))

# %% serve the tree over HTTP and load the context in one line
handler = functools.partial(SimpleHTTPRequestHandler, directory=root)
handler.log_message = lambda *a: None
httpd = ThreadingHTTPServer(("127.0.0.1", 0), handler)
threading.Thread(target=httpd.serve_forever, daemon=True).start()

cfg = RepoConfig(base_url=f"http://127.0.0.1:{httpd.server_port}", cache_dir=os.path.join(root, "_cache"))
ctx = fcarepo.load_dataset("livingbeings_en", cfg)
print(ctx.shape)

# a second load works offline from the cache
offline = RepoConfig(cfg.base_url, cfg.cache_dir, offline=True)
print(fcarepo.load_dataset("livingbeings_en", offline) == ctx)

try:
    fcarepo.load_dataset("livingbeing_en", cfg)
except fcarepo.ContextNotFound as exc:
    print(exc)

httpd.shutdown()
shutil.rmtree(root)
