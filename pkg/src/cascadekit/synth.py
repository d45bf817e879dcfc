"""Synthetic social graphs and reshare cascades for desk-scale experiments.

The generator is openly artificial: final sizes are drawn first from a
heavy-tailed distribution so the tail exponent is controlled, and the tree
is then grown over a preferential-attachment graph to match. Cascades
destined to pass twice the size cutoff spread with a boosted reshare hazard,
planting a recoverable temporal signal: with the boost on, pacing features
separate future-large from future-small cascades; with it off, nothing does.

Everything is deterministic given the seed; each cascade derives its own
generator from (seed, index), so generation order and parallelism cannot
change the output.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .cascade import ReshareEvent, SocialGraph
from .errors import AlphaOutOfRangeError, BadParamsError
from .features import ContentRecord

CATEGORY_LABELS = ("animals", "food", "music", "news", "sports")


@dataclass(frozen=True)
class SynthParams:
    n_nodes: int = 20_000
    attachment_m: int = 2
    page_fraction: float = 0.05
    page_degree_boost: float = 3.0
    reshare_prob: float = 0.5
    rate_boost: float = 3.0
    target_alpha: float = 2.0
    x_min: float = 1.0
    n_cascades: int = 1000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_nodes <= self.attachment_m or self.attachment_m < 1:
            raise BadParamsError(
                f"need n_nodes > attachment_m >= 1, got {self.n_nodes}, {self.attachment_m}"
            )
        if not 0.0 <= self.page_fraction <= 1.0:
            raise BadParamsError(f"page_fraction in [0,1], got {self.page_fraction}")
        if self.page_degree_boost < 1.0:
            raise BadParamsError(f"page_degree_boost >= 1, got {self.page_degree_boost}")
        if not 0.0 < self.reshare_prob < 1.0:
            raise BadParamsError(f"reshare_prob in (0,1), got {self.reshare_prob}")
        if self.rate_boost < 1.0:
            raise BadParamsError(f"rate_boost >= 1, got {self.rate_boost}")
        if self.target_alpha <= 1.0:
            raise BadParamsError(f"target_alpha > 1, got {self.target_alpha}")
        if self.x_min <= 0.0:
            raise BadParamsError(f"x_min > 0, got {self.x_min}")
        if self.n_cascades < 1:
            raise BadParamsError(f"n_cascades >= 1, got {self.n_cascades}")

    @classmethod
    def from_config(cls, cfg: Mapping[str, str]) -> "SynthParams":
        kwargs = {}
        for f, caster in (
            ("n_nodes", int),
            ("attachment_m", int),
            ("page_fraction", float),
            ("page_degree_boost", float),
            ("reshare_prob", float),
            ("rate_boost", float),
            ("target_alpha", float),
            ("x_min", float),
            ("n_cascades", int),
            ("seed", int),
        ):
            if f in cfg:
                kwargs[f] = caster(cfg[f])
        return cls(**kwargs)


def powerlaw_inverse_cdf(u: float, alpha: float, x_min: float) -> float:
    """Quantile function of the continuous power law: x_min * u^(-1/(alpha-1)).

    ``u`` is the upper-tail probability, so u = 1 gives x_min and u = 0.5
    gives the median.
    """
    if alpha <= 1.0:
        raise AlphaOutOfRangeError(f"alpha must be > 1, got {alpha}")
    return x_min * u ** (-1.0 / (alpha - 1.0))


def sample_powerlaw_sizes(
    alpha: float, x_min: float, n: int, seed: int
) -> np.ndarray:
    """n inverse-CDF draws from the continuous power law, fixed by seed."""
    if alpha <= 1.0:
        raise AlphaOutOfRangeError(f"alpha must be > 1, got {alpha}")
    if n < 1:
        raise BadParamsError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    u = 1.0 - rng.random(n)  # uniform on (0, 1]
    return x_min * u ** (-1.0 / (alpha - 1.0))


def _page_mask(params: SynthParams, seed: int) -> np.ndarray:
    """Which node indices are pages; shared by graph and cascade generation."""
    rng = np.random.default_rng([seed, 1])
    return rng.random(params.n_nodes) < params.page_fraction


def generate_social_graph(params: SynthParams, seed: int) -> SocialGraph:
    """Preferential-attachment graph with degree-boosted page nodes.

    Each new node attaches to ``attachment_m`` distinct earlier nodes chosen
    proportionally to accumulated attachment stubs; page endpoints deposit
    ``page_degree_boost`` times as many stubs per edge, tilting the degree
    distribution in their favor.
    """
    rng = np.random.default_rng([seed, 0])
    pages = _page_mask(params, seed)
    n = params.n_nodes
    m = params.attachment_m
    extra_int = int(params.page_degree_boost) - 1
    extra_frac = params.page_degree_boost - int(params.page_degree_boost)

    def stub_copies(node: int) -> int:
        if not pages[node]:
            return 1
        return 1 + extra_int + (1 if rng.random() < extra_frac else 0)

    graph = SocialGraph(directed=False)
    stubs: list[int] = []
    for v in range(1, n):
        limit = min(m, v)
        targets: set[int] = set()
        attempts = 0
        while len(targets) < limit:
            if stubs and attempts < 20 * limit:
                t = stubs[int(rng.integers(len(stubs)))]
                attempts += 1
            else:
                t = int(rng.integers(v))
            if t != v:
                targets.add(t)
        for t in sorted(targets):
            graph.add_edge(str(v), str(t))
            stubs.extend([v] * stub_copies(v))
            stubs.extend([t] * stub_copies(t))
    return graph


def _node_profiles(params: SynthParams, seed: int) -> dict[str, np.ndarray]:
    """Stable per-node demographics so a node looks the same in every cascade."""
    rng = np.random.default_rng([seed, 3])
    n = params.n_nodes
    return {
        "age": rng.integers(13, 80, size=n).astype(np.float64),
        "fb_age": rng.integers(30, 4000, size=n).astype(np.float64),
        "activity": rng.integers(0, 31, size=n).astype(np.float64),
        "female": rng.random(n) < 0.5,
        "subscribers": rng.poisson(5, size=n).astype(np.int64),
    }


def simulate_cascades(
    graph: SocialGraph, params: SynthParams, seed: int
) -> tuple[list[list[ReshareEvent]], dict[str, ContentRecord]]:
    """Generate event logs for ``n_cascades`` cascades over ``graph``.

    Per cascade: draw a target size from the power law, pick a root (a page
    with probability ``page_fraction``), then spread breadth-first, each
    exposed neighbor resharing with ``reshare_prob``. Inter-reshare delays
    are exponential, with the hazard multiplied by ``rate_boost`` exactly
    when the drawn size reaches 2 * x_min. If exposure dies out before the
    target, a random outside node reshares from a random member, so the
    realized size matches the draw whenever the graph is large enough.

    View counters follow the stated simplification: the original post is
    seen by the root's neighbors, reshares by the resharers' neighbors.
    """
    pages = _page_mask(params, seed)
    profiles = _node_profiles(params, seed)
    node_ids = sorted(graph.adjacency)
    page_nodes = [nid for nid in node_ids if pages[int(nid)]]
    user_nodes = [nid for nid in node_ids if not pages[int(nid)]]
    neighbor_lists = {nid: sorted(graph.adjacency[nid]) for nid in node_ids}
    degree = {nid: len(graph.adjacency[nid]) for nid in node_ids}

    width = len(str(params.n_cascades - 1))
    all_events: list[list[ReshareEvent]] = []
    contents: dict[str, ContentRecord] = {}
    for idx in range(params.n_cascades):
        rng = np.random.default_rng([seed, 2, idx])
        cascade_id = f"c{idx:0{width}d}"
        drawn = powerlaw_inverse_cdf(
            1.0 - rng.random(), params.target_alpha, params.x_min
        )
        target = max(1, int(drawn))
        boosted = drawn >= 2.0 * params.x_min
        hazard = params.rate_boost if boosted else 1.0

        if page_nodes and rng.random() < params.page_fraction:
            root = page_nodes[int(rng.integers(len(page_nodes)))]
        else:
            pool = user_nodes if user_nodes else node_ids
            root = pool[int(rng.integers(len(pool)))]

        epoch = float(idx)
        events = [_event(cascade_id, root, None, epoch, pages, profiles, degree, None, None)]
        members = {root}
        order: list[str] = []
        queue: list[tuple[str, str]] = [(nbr, root) for nbr in neighbor_lists[root]]
        head = 0
        t = 0.0
        reshare_views = 0
        while len(order) < target:
            parent = None
            while head < len(queue):
                cand, par = queue[head]
                head += 1
                if cand in members:
                    continue
                if rng.random() < params.reshare_prob:
                    node, parent = cand, par
                    break
            if parent is None:
                # Exposure died out; attach an outside node to keep the
                # realized size on target.
                if len(members) >= len(node_ids):
                    break
                while True:
                    node = node_ids[int(rng.integers(len(node_ids)))]
                    if node not in members:
                        break
                parent = events[int(rng.integers(len(events)))].node_id
            t += rng.exponential(1.0 / hazard)
            events.append(
                _event(
                    cascade_id,
                    node,
                    parent,
                    epoch + t,
                    pages,
                    profiles,
                    degree,
                    degree[root],
                    reshare_views,
                )
            )
            members.add(node)
            order.append(node)
            reshare_views += degree[node]
            for nbr in neighbor_lists[node]:
                if nbr not in members:
                    queue.append((nbr, node))

        all_events.append(events)
        contents[cascade_id] = ContentRecord(
            **{name: float(rng.random()) for name in _SCORE_FIELDS},
            is_en=bool(rng.random() < 0.7),
            has_caption=bool(rng.random() < 0.5),
            liwc_pos=float(rng.random()),
            liwc_neg=float(rng.random()),
            liwc_soc=float(rng.random()),
            category=CATEGORY_LABELS[int(rng.integers(len(CATEGORY_LABELS)))],
        )
    return all_events, contents


_SCORE_FIELDS = (
    "score_closeup",
    "score_indoor",
    "score_outdoor",
    "score_synthetic",
    "score_food",
    "score_landmark",
    "score_person",
    "score_nature",
    "score_water",
    "score_overlaid_text",
)


def _event(
    cascade_id: str,
    node: str,
    parent: str | None,
    timestamp: float,
    pages: np.ndarray,
    profiles: dict[str, np.ndarray],
    degree: dict[str, int],
    views_orig: int | None,
    views_reshares: int | None,
) -> ReshareEvent:
    i = int(node)
    is_page = bool(pages[i])
    deg = degree[node]
    if is_page:
        return ReshareEvent(
            cascade_id=cascade_id,
            node_id=node,
            parent_id=parent,
            timestamp=timestamp,
            node_type="page",
            outdeg=deg,
            fan_count=deg,
            views_orig_cum=views_orig,
            views_reshares_cum=views_reshares,
        )
    return ReshareEvent(
        cascade_id=cascade_id,
        node_id=node,
        parent_id=parent,
        timestamp=timestamp,
        node_type="user",
        outdeg=deg + int(profiles["subscribers"][i]),
        friend_count=deg,
        subscriber_count=int(profiles["subscribers"][i]),
        age_years=float(profiles["age"][i]),
        fb_age_days=float(profiles["fb_age"][i]),
        activity_days=float(profiles["activity"][i]),
        gender="female" if profiles["female"][i] else "male",
        views_orig_cum=views_orig,
        views_reshares_cum=views_reshares,
    )
