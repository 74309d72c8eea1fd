"""qsp: a workbench for quantum symmetric pair data and its operator identities."""

__version__ = "0.1.0"
