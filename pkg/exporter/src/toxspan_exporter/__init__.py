"""One-shot exporter from transformer checkpoints to the toxspan
interchange format (per-word attention, sentence probability, embeddings)."""

from .export import ExportOptions, ExportStats, export, load_checkpoint
from .validate import ValidationReport, validate

__version__ = "0.1.0"

__all__ = [
    "ExportOptions",
    "ExportStats",
    "export",
    "load_checkpoint",
    "ValidationReport",
    "validate",
    "__version__",
]
