"""Test suite package for splitcircle."""
