"""
Pipeline Package
Command drivers and artifact writers for the coopsolve CLI.
"""
