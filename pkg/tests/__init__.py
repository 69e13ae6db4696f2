"""Test suite for the arrangement homology utilities.

Unit tests for every arr_utils module and the arrh CLI. Slow runs are
marked ``integration``.

Requires Python 3.10+
"""
