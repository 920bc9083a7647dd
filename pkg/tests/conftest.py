import hashlib
import os
import random
import shutil
import textwrap
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np
import pytest

from fcarepo import FormalContext

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")

# Comparison table of FCA tools as row strings; x marks a feature.
TOOLS_ATTRIBUTES = [
    "Implications", "Lattice Drawing", "Free Software", "CbO Algorithms",
    "Burmeister Format", "Scaling", "NextClosure", "Library", "Recent",
    "Exploration", "BMF", "Scale Measures", "Binary CSV", "Online", "GUI",
]
TOOLS_ROWS = [
    ("xflr6 / concepts", ".xx.x.xxx...x.."),
    ("fcaR", "xxx.xxxxx...x.."),
    ("FCApy", ".xxxxx.xx...x.."),
    ("FCA Tools Bundle", ".xx.xxx.x...xxx"),
    ("FcaKit", "..xx..xxx.x.x.."),
    ("conexp-clj", "xxxxxxxxxxxxx.x"),
    ("LatViz", ".x....x......xx"),
    ("ConExp", "xx..x.x..x..x.x"),
]


def fixture_path(name):
    return os.path.join(FIXTURES, name)


def read_fixture(name, mode="r"):
    with open(fixture_path(name), mode, **({} if "b" in mode else {"encoding": "utf-8"})) as fh:
        return fh.read()


def tools_context():
    return FormalContext(
        [name for name, _ in TOOLS_ROWS],
        TOOLS_ATTRIBUTES,
        [[c == "x" for c in row] for _, row in TOOLS_ROWS],
    )


def contranominal(n):
    return FormalContext(
        [f"g{i + 1}" for i in range(n)],
        [f"a{i + 1}" for i in range(n)],
        ~np.eye(n, dtype=bool),
    )


def random_context(rng, max_objects, max_attributes, p=None):
    g = rng.randint(0, max_objects)
    m = rng.randint(0, max_attributes)
    p = rng.uniform(0.1, 0.9) if p is None else p
    arr = [[rng.random() < p for _ in range(m)] for _ in range(g)]
    return FormalContext([f"g{i}" for i in range(g)], [f"m{j}" for j in range(m)], arr)


def random_contexts(seed, count, max_objects, max_attributes):
    rng = random.Random(seed)
    return [random_context(rng, max_objects, max_attributes) for _ in range(count)]


@pytest.fixture
def tools():
    return tools_context()


@pytest.fixture
def attr():
    """Map attribute names of the tools table to indices."""
    return {name: i for i, name in enumerate(TOOLS_ATTRIBUTES)}


@pytest.fixture
def obj():
    return {name: i for i, (name, _) in enumerate(TOOLS_ROWS)}


class MockRepoServer:
    """Raw-file HTTP server on localhost; honours ``If-None-Match``."""

    def __init__(self, files):
        self.files = dict(files)
        self.requests = []
        server = self

        class Handler(BaseHTTPRequestHandler):
            def do_GET(self):
                server.requests.append((self.path, dict(self.headers)))
                status = server.status_override.get(self.path)
                if status is not None:
                    self._reply(status, b"boom")
                    return
                body = server.files.get(self.path)
                if body is None:
                    self._reply(404, b"not found")
                    return
                etag = '"%s"' % hashlib.sha1(body).hexdigest()
                if self.headers.get("If-None-Match") == etag:
                    self._reply(304, b"", etag)
                else:
                    self._reply(200, body, etag)

            def _reply(self, status, body, etag=None):
                self.send_response(status)
                if etag:
                    self.send_header("ETag", etag)
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def log_message(self, *args):
                pass

        self.status_override = {}
        self.httpd = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.url = "http://127.0.0.1:%d" % self.httpd.server_address[1]
        self.thread = threading.Thread(target=self.httpd.serve_forever, args=(0.02,), daemon=True)
        self.thread.start()

    def close(self):
        self.httpd.shutdown()
        self.httpd.server_close()


def repo_files():
    return {
        "/contexts.yaml": textwrap.dedent(read_fixture("livingbeings_index.yaml")).encode("utf-8"),
        "/contexts/livingbeings_en.cxt": read_fixture("livingbeings_en.cxt", "rb"),
    }


@pytest.fixture
def server():
    srv = MockRepoServer(repo_files())
    yield srv
    srv.close()


TOOLS_ENTRY = """\
tools_en.cxt:
  title: Comparison of recent FCA tools
  source: tool survey table
  description: software packages and the features they offer
  language: en
"""


def seed_repo(root):
    """A consistent two-context repository tree."""
    os.makedirs(os.path.join(root, "contexts"))
    index = textwrap.dedent(read_fixture("livingbeings_index.yaml")) + TOOLS_ENTRY
    with open(os.path.join(root, "contexts.yaml"), "w", encoding="utf-8") as fh:
        fh.write(index)
    for name in ("livingbeings_en.cxt", "tools_en.cxt"):
        shutil.copy(fixture_path(name), os.path.join(root, "contexts", name))
    return root
