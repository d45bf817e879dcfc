"""Structural virality of a cascade: the Wiener index of its tree.

The Wiener index is the mean hop distance over all unordered node pairs.
Values near 1 mean a star-like broadcast; larger values mean long viral
chains. Two implementations are provided: an exact one-pass O(n) algorithm
and a quadratic brute force kept as an independent oracle for it.
"""

from __future__ import annotations

from collections import deque

from .cascade import CascadeTree
from .errors import TooSmallError


def wiener_index_exact(tree: CascadeTree) -> float:
    """Mean pairwise distance via edge subtree counts, in O(n).

    Each edge e with s_e nodes below it lies on s_e * (n - s_e) paths, so the
    total distance is the sum of those products; dividing by C(n, 2) gives the
    mean. Subtree sizes accumulate in one sweep over the canonical event
    order reversed (children always come after parents, so no recursion).
    """
    n = tree.n_nodes
    if n < 2:
        raise TooSmallError(f"need >= 2 nodes, got {n}")
    subtree = {e.node_id: 1 for e in tree.events}
    total = 0
    for e in reversed(tree.events[1:]):
        s = subtree[e.node_id]
        total += s * (n - s)
        subtree[e.parent_id] += s
    return total / (n * (n - 1) / 2)


def wiener_index_bruteforce(tree: CascadeTree) -> float:
    """Mean pairwise distance by BFS from every node. O(n^2), oracle use only."""
    n = tree.n_nodes
    if n < 2:
        raise TooSmallError(f"need >= 2 nodes, got {n}")
    adjacency: dict[str, list[str]] = {e.node_id: [] for e in tree.events}
    for child, par in tree.parent.items():
        adjacency[child].append(par)
        adjacency[par].append(child)

    total = 0
    for start in adjacency:
        dist = {start: 0}
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in adjacency[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        total += sum(dist.values())
    # Every unordered pair was counted from both endpoints.
    return total / (n * (n - 1))
