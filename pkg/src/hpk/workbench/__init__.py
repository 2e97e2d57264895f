"""Workbench: object browsing, the service API, and the command line."""
