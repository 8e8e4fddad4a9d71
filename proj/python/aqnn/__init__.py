"""Aggregation queries over nearest neighbors with cheap proxy and costly oracle embeddings."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
