"""
Tests Package
Unit tests for coopsolve.
"""
