"""Tests for hsurf."""
