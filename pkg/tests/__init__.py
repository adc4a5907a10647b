"""Test suite for dflregret."""
