"""Export transformer embeddings for review corpora.

Reads the tab-separated corpus format (one review per comment block, one
token per line), embeds each review's text with a Hugging Face encoder, and
writes one JSON object per line: {"review_id": ..., "vector": [...]}.
"""

__version__ = "0.1.0"

from .export import ExportConfig, ExportReport, export_embeddings
from .reader import ReviewText, read_review_texts

__all__ = [
    "__version__",
    "ExportConfig",
    "ExportReport",
    "ReviewText",
    "export_embeddings",
    "read_review_texts",
]
