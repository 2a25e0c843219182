"""Archive fetching and CSV conversion for swarmvqc datasets."""

from .convert import fetch_and_convert
from .sources import SUPPORTED_DATASETS, SourceSpec

__version__ = "0.1.0"

__all__ = ["SUPPORTED_DATASETS", "SourceSpec", "fetch_and_convert"]
