"""Sentence-embedding sidecar for the CVE-to-CWE ranking toolkit."""

__version__ = "0.1.0"
