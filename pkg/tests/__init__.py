"""Test package for pindex."""
