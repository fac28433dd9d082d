"""Test suite for the framelab package

Each test module follows the pattern:
  test_<module_name>.py

Run all tests with:
  pytest tests/

Or run specific test file:
  pytest tests/test_sip.py
"""

__all__ = []
