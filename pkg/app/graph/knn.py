"""Exact k-nearest-neighbor search between patch sets."""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..config import settings
from ..errors import ContractError, DimensionError
from .patches import PatchSet

logger = logging.getLogger(__name__)

DIFFERENCE_BUDGET = 1 << 22


@dataclass(frozen=True)
class KnnGraph:
    """Neighbor table: ``neighbors[q]`` are key indices sorted by distance."""

    k: int
    neighbors: np.ndarray
    distances: np.ndarray

    @property
    def query_count(self) -> int:
        return self.neighbors.shape[0]

    @property
    def edge_count(self) -> int:
        return int(self.neighbors.size)


def knn_search(query: PatchSet, key: PatchSet, k: int, chunk: Optional[int] = None) -> KnnGraph:
    """Find the ``k`` closest key patches for every query patch.

    Distances are Euclidean over the flattened patch vectors, computed from
    exact differences in float64. Equal distances rank by ascending key
    index, so a patch searched against its own set finds itself first.

    Args:
        query (PatchSet): Patches looking for neighbors.
        key (PatchSet): Candidate neighbors.
        k (int): Neighbors per query, ``1 <= k <= key.count``.
        chunk (Optional[int]): Query rows per distance block; defaults to
            ``settings.knn_chunk``.

    Returns:
        KnnGraph: ``query.count`` x ``k`` indices and distances.

    Raises:
        ContractError: ``k`` is not in ``[1, key.count]``.
        DimensionError: Query and key patch lengths differ.
    """
    if query.length != key.length:
        raise DimensionError(f"knn_search: query patches have length {query.length}, key patches {key.length}")
    if not 1 <= k <= key.count:
        raise ContractError(f"knn_search: k={k} must be between 1 and the key patch count {key.count}")

    queries = query.patches.data.astype(np.float64)
    keys = key.patches.data.astype(np.float64)
    # Each block materializes rows x keys x length differences.
    block = max(1, min(chunk or settings.knn_chunk, DIFFERENCE_BUDGET // max(1, keys.size)))

    neighbors = np.empty((queries.shape[0], k), dtype=np.int64)
    distances = np.empty((queries.shape[0], k), dtype=np.float64)
    for start in range(0, queries.shape[0], block):
        rows = queries[start:start + block]
        squared = np.sum((rows[:, None, :] - keys[None, :, :]) ** 2, axis=2)
        order = np.argsort(squared, axis=1, kind="stable")[:, :k]
        neighbors[start:start + block] = order
        distances[start:start + block] = np.sqrt(np.take_along_axis(squared, order, axis=1))

    logger.debug(f"k-NN over {queries.shape[0]} queries and {keys.shape[0]} keys with k={k}")
    return KnnGraph(k=k, neighbors=neighbors, distances=distances)
