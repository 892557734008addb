"""Toolkit for documenting spreadsheet operations.

Parses and executes an atomic spreadsheet-action language, transpiles
recorded macro code into it, generates natural-language step descriptions
through pluggable summarization backends, and scores that documentation
with n-gram similarity metrics and a confidence-interval/t-test report.
"""

__version__ = "0.1.0"
