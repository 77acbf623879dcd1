"""Test basic functionality of hsurf."""

import pytest

import hsurf


def test_version():
    """Test that version is defined."""
    assert hasattr(hsurf, "__version__")
    assert isinstance(hsurf.__version__, str)


def test_author():
    assert isinstance(hsurf.__author__, str)


def test_email():
    assert isinstance(hsurf.__email__, str)


class TestGetCacheDir:
    def test_reads_env(self, monkeypatch, tmp_path):
        monkeypatch.setenv("HSURF_CACHE_DIR", str(tmp_path))
        assert hsurf.get_cache_dir() == tmp_path

    def test_unset_raises(self, monkeypatch):
        monkeypatch.delenv("HSURF_CACHE_DIR", raising=False)
        with pytest.raises(OSError, match="HSURF_CACHE_DIR"):
            hsurf.get_cache_dir()
