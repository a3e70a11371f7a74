"""Test suite for the dialectica package."""
