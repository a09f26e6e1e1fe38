"""humrank: humour-aware multilingual retrieval toolkit.

Dense cosine retrieval over precomputed embeddings, an Okapi BM25 baseline,
external-scorer re-ranking, reciprocal rank fusion, TREC run exchange, and a
trec_eval-style metric suite, all wired together by the ``humrank`` CLI.
"""

__version__ = "0.1.0"

from humrank.errors import BridgeError, DataError, HumrankError

__all__ = ["BridgeError", "DataError", "HumrankError", "__version__"]
