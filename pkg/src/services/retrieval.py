"""Feature-hashing embeddings and an exact-scan in-memory vector index."""

import hashlib
import logging
import re
from functools import lru_cache
from types import MappingProxyType
from typing import List, Optional, Sequence

import httpx
import numpy as np

from src.core.exceptions import DataError, IndexBuildError, ProviderError, ProviderTransportError
from src.schemas.corpus import Chunk
from src.schemas.retrieval import SearchHit

logger = logging.getLogger(__name__)

DEFAULT_DIMENSION = 256
DEFAULT_TOP_N = 5

# Similarities are compared at this precision so float noise cannot reorder ties.
RANKING_DECIMALS = 12

_NON_ALNUM = re.compile(r"[\W_]+")


def tokenize(text: str, stopwords: Sequence[str] = ()) -> List[str]:
    """Lowercase, split on non-alphanumeric runs, drop 1-char tokens and stopwords."""
    stop = set(stopwords)
    return [
        token for token in _NON_ALNUM.split(text.lower())
        if len(token) >= 2 and token not in stop
    ]


@lru_cache(maxsize=65536)
def _hash64(token: str) -> int:
    """Seedless, platform-independent 64-bit token hash."""
    return int.from_bytes(hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest(), "big")


def _normalized(vector: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(vector))
    if norm > 0.0:
        vector = vector / norm
    vector.setflags(write=False)
    return vector


def embed(tokens: Sequence[str], d: int = DEFAULT_DIMENSION) -> np.ndarray:
    """
    Signed feature hashing into ``d`` buckets, L2-normalized.

    bucket = hash mod d; sign is -1 when bit 63 of the hash is set.
    No tokens gives the all-zero vector.
    """
    if d < 2:
        raise IndexBuildError(f"dimension must be ≥ 2, got {d}")

    vector = np.zeros(d, dtype=np.float64)
    for token in tokens:
        h = _hash64(token)
        vector[h % d] += -1.0 if h >> 63 else 1.0
    return _normalized(vector)


class Index:
    """Immutable exact-scan index over chunk embeddings."""

    def __init__(
        self,
        chunks: Sequence[Chunk],
        matrix: np.ndarray,
        dimension: int,
        stopwords: Sequence[str] = (),
    ):
        positions = {}
        for position, chunk in enumerate(chunks):
            if chunk.chunk_id in positions:
                raise IndexBuildError(f"duplicate chunk_id {chunk.chunk_id!r}")
            positions[chunk.chunk_id] = position

        if matrix.shape != (len(chunks), dimension):
            raise IndexBuildError(
                f"embedding matrix shape {matrix.shape} does not match "
                f"{len(chunks)} chunks of dimension {dimension}"
            )

        matrix = np.array(matrix, dtype=np.float64, copy=True)
        matrix.setflags(write=False)

        self._chunks = tuple(chunks)
        self._matrix = matrix
        self._positions = MappingProxyType(positions)
        self._dimension = dimension
        self._stopwords = tuple(stopwords)

    @classmethod
    def from_vectors(
        cls,
        chunks: Sequence[Chunk],
        vectors: Sequence[Sequence[float]],
        stopwords: Sequence[str] = (),
    ) -> "Index":
        """Build from externally computed embeddings (normalized here)."""
        if len(vectors) != len(chunks):
            raise IndexBuildError(f"{len(vectors)} vectors for {len(chunks)} chunks")
        if not chunks:
            raise IndexBuildError("cannot infer dimension from zero vectors")
        rows = [_normalized(np.asarray(vector, dtype=np.float64)) for vector in vectors]
        return cls(chunks, np.vstack(rows), dimension=rows[0].shape[0], stopwords=stopwords)

    @property
    def dimension(self) -> int:
        return self._dimension

    @property
    def size(self) -> int:
        return len(self._chunks)

    @property
    def chunks(self) -> tuple:
        return self._chunks

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def stopwords(self) -> tuple:
        return self._stopwords

    def __len__(self) -> int:
        return self.size

    def __contains__(self, chunk_id: str) -> bool:
        return chunk_id in self._positions

    def get(self, chunk_id: str) -> Chunk:
        """Chunk by id."""
        return self._chunks[self._positions[chunk_id]]

    def embedding(self, chunk_id: str) -> np.ndarray:
        """Stored embedding by id (read-only)."""
        return self._matrix[self._positions[chunk_id]]

    def embed_query(self, query: str) -> np.ndarray:
        """Embed a query the same way chunks were embedded."""
        return embed(tokenize(query, self._stopwords), self._dimension)


def build_index(
    chunks: Sequence[Chunk],
    d: int = DEFAULT_DIMENSION,
    stopwords: Sequence[str] = (),
) -> Index:
    """Embed every chunk with feature hashing and freeze the result."""
    if d < 2:
        raise IndexBuildError(f"dimension must be ≥ 2, got {d}")
    if chunks:
        matrix = np.vstack([embed(tokenize(chunk.text, stopwords), d) for chunk in chunks])
    else:
        matrix = np.zeros((0, d), dtype=np.float64)
    index = Index(chunks, matrix, dimension=d, stopwords=stopwords)
    logger.debug(f"Built index with {index.size} chunks (d={d})")
    return index


def search_vector(index: Index, query_vector: np.ndarray, n: int = DEFAULT_TOP_N) -> List[SearchHit]:
    """Rank all chunks against a precomputed query embedding."""
    if n < 1:
        raise DataError(f"n must be ≥ 1, got {n}")
    if query_vector.shape != (index.dimension,):
        raise DataError(
            f"query dimension {query_vector.shape[0]} does not match index dimension {index.dimension}"
        )
    if index.size == 0:
        return []

    # Rows and query are unit length (or zero), so the dot product is the cosine.
    similarities = np.clip(index.matrix @ query_vector, -1.0, 1.0)
    chunks = index.chunks
    order = sorted(
        range(index.size),
        key=lambda i: (-round(float(similarities[i]), RANKING_DECIMALS), chunks[i].chunk_id),
    )
    return [
        SearchHit(chunk_id=chunks[i].chunk_id, similarity=float(similarities[i]))
        for i in order[:n]
    ]


def search(index: Index, query: str, n: int = DEFAULT_TOP_N) -> List[SearchHit]:
    """Top-n chunks by cosine similarity, ties broken by chunk_id ascending."""
    return search_vector(index, index.embed_query(query), n)


class RemoteEmbeddingClient:
    """Embedding service client: POST a JSON list of strings, receive a list of vectors."""

    def __init__(
        self,
        endpoint: str,
        dimension: int,
        timeout: float = 30.0,
        transport: Optional[httpx.AsyncBaseTransport] = None,
    ):
        self.endpoint = endpoint
        self.dimension = dimension
        self.timeout = timeout
        self._transport = transport

    async def embed_texts(self, texts: Sequence[str]) -> List[np.ndarray]:
        """Embed texts remotely; vectors come back L2-normalized."""
        if not texts:
            return []

        try:
            async with httpx.AsyncClient(timeout=self.timeout, transport=self._transport) as client:
                response = await client.post(self.endpoint, json=list(texts))
                response.raise_for_status()
                payload = response.json()
        except httpx.HTTPStatusError as e:
            raise ProviderError(f"embedding service returned HTTP {e.response.status_code}") from e
        except httpx.HTTPError as e:
            logger.error(f"Embedding request failed: {e}")
            raise ProviderTransportError(f"embedding request failed: {e}") from e
        except ValueError as e:
            raise ProviderError("embedding service returned invalid JSON") from e

        if not isinstance(payload, list) or len(payload) != len(texts):
            raise ProviderError(f"expected {len(texts)} embeddings from the embedding service")

        vectors = []
        for vector in payload:
            if not isinstance(vector, list) or len(vector) != self.dimension:
                raise ProviderError(f"embedding dimension mismatch, expected {self.dimension}")
            try:
                vectors.append(_normalized(np.asarray(vector, dtype=np.float64)))
            except (TypeError, ValueError) as e:
                raise ProviderError("embedding contains non-numeric values") from e
        return vectors
