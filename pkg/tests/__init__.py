"""
Test initialization file to make the tests directory a proper Python package.
"""
