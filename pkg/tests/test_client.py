import json
import os

import pytest

from fcarepo import ContextNotFound, HTTPStatusError, OfflineError, load_dataset, parse_burmeister
from fcarepo.client import (
    DEFAULT_BASE_URL,
    InvalidRemoteContent,
    RepoClient,
    RepoConfig,
    Response,
    UrllibTransport,
    fetch_raw,
    list_contexts,
)
from fcarepo.errors import NetworkError
from conftest import read_fixture

LIVING = read_fixture("livingbeings_en.cxt", "rb")


class CountingTransport:
    def __init__(self, inner=None):
        self.inner = inner or UrllibTransport()
        self.urls = []

    def get(self, url, headers, timeout):
        self.urls.append(url)
        return self.inner.get(url, headers, timeout)


class CannedTransport:
    """Serves fixed responses without sockets."""

    def __init__(self, responses):
        self.responses = responses
        self.calls = []

    def get(self, url, headers, timeout):
        self.calls.append((url, dict(headers)))
        return self.responses[url]


@pytest.fixture
def cfg(server, tmp_path):
    return RepoConfig(base_url=server.url, cache_dir=str(tmp_path / "cache"))


def offline(cfg):
    return RepoConfig(cfg.base_url, cfg.cache_dir, offline=True)


def test_load_dataset_matches_fixture(cfg):
    ctx = load_dataset("livingbeings_en", cfg)
    assert ctx == parse_burmeister(LIVING)
    assert ctx.shape == (8, 9)


def test_offline_second_call_no_requests(cfg):
    first = load_dataset("livingbeings_en", cfg)
    transport = CountingTransport()
    again = load_dataset("livingbeings_en", offline(cfg), transport)
    assert transport.urls == []
    assert again == first


def test_extension_optional(cfg, server):
    transport = CountingTransport()
    assert fetch_raw("livingbeings_en.cxt", cfg, transport) == LIVING
    assert transport.urls == [server.url + "/contexts/livingbeings_en.cxt"]


def test_not_found_has_suggestions(cfg):
    with pytest.raises(ContextNotFound) as info:
        load_dataset("livingbeing_en", cfg)
    assert info.value.suggestions == ["livingbeings_en"]
    assert "livingbeings_en" in str(info.value)
    assert not os.path.exists(os.path.join(cfg.cache_dir, "livingbeing_en.cxt"))


def test_not_found_without_close_match(cfg):
    with pytest.raises(ContextNotFound) as info:
        load_dataset("does_not_exist_en", cfg)
    assert info.value.name == "does_not_exist_en"


def test_server_error_carries_status_and_url(cfg, server):
    server.status_override["/contexts.yaml"] = 500
    with pytest.raises(HTTPStatusError) as info:
        list_contexts(cfg)
    assert info.value.status == 500
    assert info.value.url == server.url + "/contexts.yaml"


def test_list_contexts(cfg):
    index = list_contexts(cfg)
    assert list(index.entries) == ["livingbeings_en.cxt"]
    assert os.path.exists(os.path.join(cfg.cache_dir, "contexts.yaml"))


def test_list_contexts_offline_warm(cfg):
    first = list_contexts(cfg)
    transport = CountingTransport()
    assert list_contexts(offline(cfg), transport) == first
    assert transport.urls == []


def test_offline_cold_cache(cfg):
    with pytest.raises(OfflineError):
        load_dataset("livingbeings_en", offline(cfg))


def test_cache_layout(cfg):
    fetch_raw("livingbeings_en", cfg)
    assert sorted(os.listdir(cfg.cache_dir)) == ["livingbeings_en.cxt", "livingbeings_en.meta.json"]
    with open(os.path.join(cfg.cache_dir, "livingbeings_en.cxt"), "rb") as fh:
        assert fh.read() == LIVING
    with open(os.path.join(cfg.cache_dir, "livingbeings_en.meta.json")) as fh:
        meta = json.load(fh)
    assert meta["etag"].startswith('"') and meta["fetched_at"] > 0


def test_conditional_revalidation(cfg, server):
    fetch_raw("livingbeings_en", cfg)
    assert fetch_raw("livingbeings_en", cfg) == LIVING
    path, headers = server.requests[-1]
    assert path == "/contexts/livingbeings_en.cxt"
    assert "If-None-Match" in headers


def test_changed_remote_replaces_cache(cfg, server):
    fetch_raw("livingbeings_en", cfg)
    changed = LIVING.replace(b"Living Beings", b"Living Things", 1)
    server.files["/contexts/livingbeings_en.cxt"] = changed
    assert fetch_raw("livingbeings_en", cfg) == changed
    assert fetch_raw("livingbeings_en", offline(cfg)) == changed


def test_corrupted_content_not_cached(cfg, server):
    server.files["/contexts/livingbeings_en.cxt"] = LIVING[: len(LIVING) // 2]
    with pytest.raises(InvalidRemoteContent) as info:
        fetch_raw("livingbeings_en", cfg)
    assert "livingbeings_en.cxt" in str(info.value)
    assert not os.path.exists(os.path.join(cfg.cache_dir, "livingbeings_en.cxt"))


def test_corrupted_update_keeps_old_cache(cfg, server):
    fetch_raw("livingbeings_en", cfg)
    server.files["/contexts/livingbeings_en.cxt"] = b"garbage"
    with pytest.raises(InvalidRemoteContent):
        fetch_raw("livingbeings_en", cfg)
    assert fetch_raw("livingbeings_en", offline(cfg)) == LIVING


def test_max_age_without_validator(tmp_path):
    url = "https://example.org/repo/contexts/livingbeings_en.cxt"
    transport = CannedTransport({url: Response(200, {}, LIVING, url)})
    now = [1000.0]
    cfg = RepoConfig("https://example.org/repo", str(tmp_path), max_age=60)
    client = RepoClient(cfg, transport, clock=lambda: now[0])
    client.fetch_raw("livingbeings_en")
    now[0] += 30
    client.fetch_raw("livingbeings_en")
    assert len(transport.calls) == 1
    now[0] += 60
    client.fetch_raw("livingbeings_en")
    assert len(transport.calls) == 2
    assert transport.calls[-1][1] == {}


def test_last_modified_validator(tmp_path):
    url = "https://example.org/r/contexts/livingbeings_en.cxt"
    stamp = "Wed, 01 Jan 2025 00:00:00 GMT"
    transport = CannedTransport({url: Response(200, {"last-modified": stamp}, LIVING, url)})
    client = RepoClient(RepoConfig("https://example.org/r", str(tmp_path)), transport)
    client.fetch_raw("livingbeings_en")
    transport.responses[url] = Response(304, {}, b"", url)
    assert client.fetch_raw("livingbeings_en") == LIVING
    assert transport.calls[-1][1] == {"If-Modified-Since": stamp}


def test_unreachable_server(tmp_path):
    cfg = RepoConfig("http://127.0.0.1:9", str(tmp_path), timeout=2)
    with pytest.raises(NetworkError):
        fetch_raw("livingbeings_en", cfg)


def test_bad_name_rejected_before_network(tmp_path):
    transport = CountingTransport()
    with pytest.raises(ValueError):
        fetch_raw("Living Beings", RepoConfig(cache_dir=str(tmp_path)), transport)
    assert transport.urls == []


def test_config_validation():
    with pytest.raises(ValueError):
        RepoConfig(base_url="ftp://x")
    with pytest.raises(ValueError):
        RepoConfig(timeout=0)
    assert RepoConfig(base_url="https://h/x/").base_url == "https://h/x"


def test_env_overrides(monkeypatch, tmp_path):
    monkeypatch.delenv("FCAREPO_BASE_URL", raising=False)
    assert RepoConfig().base_url == DEFAULT_BASE_URL
    monkeypatch.setenv("FCAREPO_BASE_URL", "http://mirror.test/fca")
    monkeypatch.setenv("FCAREPO_CACHE_DIR", str(tmp_path))
    cfg = RepoConfig()
    assert cfg.base_url == "http://mirror.test/fca" and cfg.cache_dir == str(tmp_path)


def test_xdg_cache_default(monkeypatch, tmp_path):
    monkeypatch.delenv("FCAREPO_CACHE_DIR", raising=False)
    monkeypatch.setenv("XDG_CACHE_HOME", str(tmp_path))
    assert RepoConfig().cache_dir == os.path.join(str(tmp_path), "fcarepo")
