"""
Test suite for the jetlaw package.
"""
