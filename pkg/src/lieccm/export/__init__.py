"""Export utilities for certificates, reports, traces and curves."""

from .export_service import ExportService, dumps, from_json, to_csv, to_df, to_json

__all__ = [
    "ExportService",
    "dumps",
    "from_json",
    "to_csv",
    "to_df",
    "to_json",
]
