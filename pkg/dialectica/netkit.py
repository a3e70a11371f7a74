"""Actor networks: centrality, stochastic block models and block correlations."""

import heapq
import itertools
from collections import deque
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Optional, Union

import networkx as nx
import numpy as np
import pandas as pd
from scipy.special import gammaln, xlogy

from ._common import (
    BadRange,
    BadWeight,
    DuplicateId,
    EmptySamples,
    EntropyDrift,
    PartialPartition,
    UnknownNode,
    spawn_rng,
    standardize_colnames,
)
from ._config import SETTINGS, logger

TYPOLOGIES = ("Academic", "Conservation", "Institutional", "Productive", "Social")
NODE_COLUMNS = ["id", "name", "municipality", "typology", "lat", "lon"]
EDGE_COLUMNS = ["src", "dst", "weight", "relation"]
DRIFT_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class SocialGraph:
    """An undirected, weighted actor network.

    Parameters
    ----------
    nodes : pd.DataFrame
        Actors indexed by id with columns ``name``, ``municipality``,
        ``typology``, ``lat`` and ``lon``.
    edges : pd.DataFrame
        Links with columns ``src``, ``dst``, ``weight`` and ``relation``.
    """

    nodes: pd.DataFrame
    edges: pd.DataFrame

    @property
    def ids(self) -> list[str]:
        """Node ids in input order."""
        return list(self.nodes.index)

    @property
    def n_edges(self) -> int:
        """Number of distinct links."""
        return len(self.edges)

    @cached_property
    def graph(self) -> nx.Graph:
        """The network as a ``networkx`` graph."""
        g = nx.Graph()
        for node_id, row in self.nodes.iterrows():
            g.add_node(node_id, **row.to_dict())
        for row in self.edges.itertuples(index=False):
            g.add_edge(row.src, row.dst, weight=row.weight, relation=row.relation)
        return g


def graph_from_frames(nodes: pd.DataFrame, edges: pd.DataFrame) -> SocialGraph:
    """Validate node and edge tables and build a graph.

    Repeated links between the same pair of actors are merged: weights are
    summed and relation tags joined.

    Raises
    ------
    DuplicateId
        If a node id is declared twice.
    UnknownNode
        If an edge references an undeclared node.
    BadWeight
        If a weight is not a finite positive number.
    ValueError
        If a column is missing, a typology is unknown or an edge is a self-loop.
    """
    nodes = standardize_colnames(nodes.copy())
    edges = standardize_colnames(edges.copy())
    for df, required in ((nodes, NODE_COLUMNS[:4]), (edges, EDGE_COLUMNS[:2])):
        missing = [c for c in required if c not in df.columns]
        if missing:
            raise ValueError(f"Missing columns: {missing}")
    nodes["id"] = nodes["id"].astype(str).str.strip()
    duplicated = nodes.loc[nodes["id"].duplicated(), "id"].tolist()
    if duplicated:
        raise DuplicateId(f"Node ids declared more than once: {duplicated}")
    unknown = sorted(set(nodes["typology"]) - set(TYPOLOGIES))
    if unknown:
        raise ValueError(f"Unknown typologies {unknown}; expected one of {list(TYPOLOGIES)}")
    for col in ("lat", "lon"):
        nodes[col] = pd.to_numeric(nodes[col], errors="coerce") if col in nodes else np.nan
    nodes = nodes.set_index("id")[NODE_COLUMNS[1:]]

    edges["src"] = edges["src"].astype(str).str.strip()
    edges["dst"] = edges["dst"].astype(str).str.strip()
    if "weight" not in edges:
        edges["weight"] = 1.0
    if "relation" not in edges:
        edges["relation"] = ""
    edges["relation"] = edges["relation"].fillna("").astype(str)
    for col in ("src", "dst"):
        missing_ids = sorted(set(edges[col]) - set(nodes.index))
        if missing_ids:
            raise UnknownNode(f"Edges reference undeclared nodes {missing_ids}")
    weights = pd.to_numeric(edges["weight"], errors="coerce")
    bad = edges.loc[~(np.isfinite(weights) & (weights > 0)), ["src", "dst"]]
    if len(bad):
        src, dst = bad.iloc[0]
        raise BadWeight(f"Edge {src}-{dst} has weight {edges.loc[bad.index[0], 'weight']!r}")
    edges["weight"] = weights.astype(float)
    loops = edges.loc[edges["src"] == edges["dst"], "src"].tolist()
    if loops:
        raise ValueError(f"Self-loops are not allowed: {loops}")

    # undirected: one row per unordered pair
    pair = np.sort(edges[["src", "dst"]].to_numpy(), axis=1)
    edges["src"], edges["dst"] = pair[:, 0], pair[:, 1]
    merged = edges.groupby(["src", "dst"], sort=False, as_index=False).agg(
        weight=("weight", "sum"), relation=("relation", lambda r: ";".join(dict.fromkeys(r)))
    )
    if len(merged) < len(edges):
        logger.info("Merged %d repeated links", len(edges) - len(merged))
    return SocialGraph(nodes, merged[EDGE_COLUMNS].reset_index(drop=True))


def load_graph(nodes_file: Union[str, Path], edges_file: Union[str, Path]) -> SocialGraph:
    """Read an actor network from a node CSV and an edge CSV.

    Parameters
    ----------
    nodes_file : str or Path
        CSV with header ``id,name,municipality,typology,lat,lon``.
    edges_file : str or Path
        CSV with header ``src,dst,weight,relation``.

    Returns
    -------
    SocialGraph
    """
    nodes = pd.read_csv(nodes_file, dtype={"id": str})
    edges = pd.read_csv(edges_file, dtype={"src": str, "dst": str, "relation": str})
    g = graph_from_frames(nodes, edges)
    logger.info("Loaded %d actors and %d links from %s", len(g.ids), g.n_edges, edges_file)
    return g


def load_actor_tags(path: Union[str, Path]) -> dict[str, set[str]]:
    """Read the action tags put forward by each actor from a CSV ``actor,tag``."""
    df = standardize_colnames(pd.read_csv(path, dtype=str))
    result: dict[str, set[str]] = {}
    for actor, tag in df[["actor", "tag"]].itertuples(index=False):
        result.setdefault(actor.strip(), set()).add(tag.strip())
    return result


# Centrality


def _single_source(
    g: SocialGraph, adj: Mapping[str, Mapping[str, float]], s: str, weighted: bool
) -> tuple[list[str], dict[str, list[str]], dict[str, float]]:
    order: list[str] = []
    preds: dict[str, list[str]] = {v: [] for v in g.ids}
    sigma = dict.fromkeys(g.ids, 0.0)
    sigma[s] = 1.0
    if not weighted:
        dist = {s: 0}
        queue = deque([s])
        while queue:
            v = queue.popleft()
            order.append(v)
            for w in adj[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        return order, preds, sigma

    seen = {s: 0.0}
    final: dict[str, float] = {}
    heap = [(0.0, 0, s, s)]
    counter = itertools.count(1)
    while heap:
        d, _, pred, v = heapq.heappop(heap)
        if v in final:
            continue
        if pred != v:
            sigma[v] += sigma[pred]
        order.append(v)
        final[v] = d
        for w, weight in adj[v].items():
            vw = d + weight
            if w in final:
                continue
            if w not in seen or vw < seen[w]:
                seen[w] = vw
                heapq.heappush(heap, (vw, next(counter), v, w))
                sigma[w] = 0.0
                preds[w] = [v]
            elif vw == seen[w]:
                sigma[w] += sigma[v]
                preds[w].append(v)
    return order, preds, sigma


def betweenness(g: SocialGraph, weighted: bool = False) -> pd.Series:
    """Return the betweenness centrality of every node.

    Counts, for every unordered pair of other nodes, the fraction of shortest
    paths that pass through a node (unnormalised, endpoints excluded).
    Unreachable pairs contribute nothing.

    Parameters
    ----------
    g : SocialGraph
        The network.
    weighted : bool
        Use edge weights as distances instead of hop counts.

    Returns
    -------
    pd.Series
        Betweenness indexed by node id.
    """
    adj = {v: {w: float(d["weight"]) for w, d in g.graph[v].items()} for v in g.ids}
    score = dict.fromkeys(g.ids, 0.0)
    for s in g.ids:
        order, preds, sigma = _single_source(g, adj, s, weighted)
        delta = dict.fromkeys(g.ids, 0.0)
        for w in reversed(order):
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                score[w] += delta[w]
    # every unordered pair was counted from both ends
    return pd.Series({v: score[v] / 2.0 for v in g.ids}, name="betweenness", dtype=float)


# Stochastic block model


def _block_matrix(g: SocialGraph, labels: np.ndarray, n_blocks: int) -> np.ndarray:
    index = {v: i for i, v in enumerate(g.ids)}
    e = np.zeros((n_blocks, n_blocks), dtype=float)
    for src, dst in g.edges[["src", "dst"]].itertuples(index=False):
        r, s = labels[index[src]], labels[index[dst]]
        e[r, s] += 1
        e[s, r] += 1
    return e


def _entropy(e: np.ndarray, sizes: np.ndarray, n_edges: float) -> float:
    degrees = e.sum(axis=1)
    return float(n_edges - 0.5 * xlogy(e, e).sum() + xlogy(degrees, sizes).sum())


def _lbinom(n: float, k: float) -> float:
    return float(gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1))


def _description_length(sizes: np.ndarray, n_edges: float) -> float:
    n_blocks = len(sizes)
    n = float(sizes.sum())
    pairs = n_blocks * (n_blocks + 1) / 2
    return (
        _lbinom(pairs + n_edges - 1, n_edges)
        + float(gammaln(n + 1) - gammaln(sizes + 1).sum())
        + _lbinom(n - 1, n_blocks - 1)
        + float(np.log(n))
    )


@dataclass(frozen=True, eq=False)
class Partition:
    """A block assignment of the nodes of a graph.

    Parameters
    ----------
    blocks : dict
        Block id (0-based, contiguous) of every node.
    entropy : float
        Microcanonical entropy in nats.
    matrix : np.ndarray
        Edge counts between blocks; within-block links count twice.
    description_length : float
        Entropy plus the description length of the model.
    """

    blocks: dict[str, int]
    entropy: float
    matrix: np.ndarray = field(repr=False)
    description_length: float = field(default=float("nan"), repr=False)

    @property
    def B(self) -> int:  # noqa: N802
        """Number of blocks."""
        return int(self.matrix.shape[0])

    def to_json(self) -> dict[str, Any]:
        """Return ``{"blocks": {...}, "entropy": x, "B": k}``."""
        return {"blocks": dict(self.blocks), "entropy": self.entropy, "B": self.B}


def _labels(g: SocialGraph, partition: Mapping[str, int]) -> np.ndarray:
    missing = [v for v in g.ids if v not in partition]
    if missing:
        raise PartialPartition(f"Partition does not cover nodes {missing}")
    raw = [partition[v] for v in g.ids]
    relabel = {b: i for i, b in enumerate(dict.fromkeys(raw))}
    return np.array([relabel[b] for b in raw], dtype=int)


def _partition(g: SocialGraph, labels: np.ndarray) -> Partition:
    n_blocks = int(labels.max()) + 1 if len(labels) else 0
    e = _block_matrix(g, labels, n_blocks)
    sizes = np.bincount(labels, minlength=n_blocks).astype(float)
    s = _entropy(e, sizes, g.n_edges)
    dl = s + _description_length(sizes, g.n_edges) if n_blocks else s
    return Partition(dict(zip(g.ids, (int(b) for b in labels))), s, e, dl)


def make_partition(g: SocialGraph, partition: Mapping[str, int]) -> Partition:
    """Build a partition from a node to block map, renumbering blocks contiguously.

    Raises
    ------
    PartialPartition
        If a node has no block.
    """
    return _partition(g, _labels(g, partition))


def sbm_entropy(
    g: SocialGraph,
    partition: Union[Partition, Mapping[str, int]],
    description_length: bool = False,
) -> float:
    """Return the microcanonical entropy of a partition in nats.

    ``S = E - 1/2 sum_rs e_rs ln(e_rs / (n_r n_s))`` where ``e_rs`` counts the
    links between blocks ``r`` and ``s`` (twice within a block), ``n_r`` is
    the size of block ``r`` and ``E`` the number of links.

    Parameters
    ----------
    g : SocialGraph
        The network.
    partition : Partition or dict
        Block of every node.
    description_length : bool
        Add the description length of the block sizes and edge counts, so
        partitions with different block counts become comparable.

    Raises
    ------
    PartialPartition
        If a node has no block.

    Returns
    -------
    float
    """
    blocks = partition.blocks if isinstance(partition, Partition) else partition
    p = make_partition(g, blocks)
    return p.description_length if description_length else p.entropy


class _Chain:
    """Mutable block state of a Markov chain with incremental entropy."""

    def __init__(self, g: SocialGraph, description_length: bool):
        self.g = g
        self.dl = description_length
        self.index = {v: i for i, v in enumerate(g.ids)}
        n = len(g.ids)
        self.neighbours: list[list[int]] = [[] for _ in range(n)]
        for src, dst in g.edges[["src", "dst"]].itertuples(index=False):
            self.neighbours[self.index[src]].append(self.index[dst])
            self.neighbours[self.index[dst]].append(self.index[src])
        self.labels = np.arange(n)
        self.sizes = np.ones(n)
        self.e = _block_matrix(g, self.labels, n)
        self.value = self.objective()

    @property
    def n_blocks(self) -> int:
        return len(self.sizes)

    def objective(
        self, e: Optional[np.ndarray] = None, sizes: Optional[np.ndarray] = None
    ) -> float:
        e = self.e if e is None else e
        sizes = self.sizes if sizes is None else sizes
        s = _entropy(e, sizes, self.g.n_edges)
        if self.dl and len(sizes):
            s += _description_length(sizes, self.g.n_edges)
        return s

    def _local(self, r: int, s: int) -> float:
        rows = self.e[[r, s], :]
        others = np.delete(self.e[:, [r, s]], [r, s], axis=0)
        degrees = self.e[[r, s], :].sum(axis=1)
        value = -0.5 * (xlogy(rows, rows).sum() + xlogy(others, others).sum())
        value += xlogy(degrees, self.sizes[[r, s]]).sum()
        if self.dl:
            value -= gammaln(self.sizes[[r, s]] + 1).sum()
        return float(value)

    def move(self, v: int, s: int) -> float:
        """Move node ``v`` to block ``s`` and return the change of the objective."""
        r = self.labels[v]
        k = np.bincount(self.labels[self.neighbours[v]], minlength=self.n_blocks).astype(float)
        before = self._local(r, s)
        self.e[r, :] -= k
        self.e[:, r] -= k
        self.e[s, :] += k
        self.e[:, s] += k
        self.sizes[r] -= 1
        self.sizes[s] += 1
        self.labels[v] = s
        return self._local(r, s) - before

    def merged(self, r: int, s: int) -> tuple[np.ndarray, np.ndarray]:
        e = self.e.copy()
        e[r, :] += e[s, :]
        e[:, r] += e[:, s]
        e = np.delete(np.delete(e, s, axis=0), s, axis=1)
        sizes = self.sizes.copy()
        sizes[r] += sizes[s]
        return e, np.delete(sizes, s)

    def merge(self, r: int, s: int) -> None:
        self.e, self.sizes = self.merged(r, s)
        self.labels[self.labels == s] = r
        self.labels[self.labels > s] -= 1
        self.value = self.objective()

    def check(self) -> None:
        full = self.objective(_block_matrix(self.g, self.labels, self.n_blocks))
        if not np.isclose(self.value, full, rtol=1e-12, atol=DRIFT_TOLERANCE):
            raise EntropyDrift(f"tracked entropy {self.value!r} differs from {full!r}")
        self.value = full


def partition_search(
    g: SocialGraph,
    B_min: int,  # noqa: N803
    B_max: int,  # noqa: N803
    sweeps: Optional[int] = None,
    seed: int = 0,
    description_length: bool = False,
) -> tuple[Partition, list[Partition]]:
    """Search a low-entropy block partition by agglomerative MCMC.

    The chain starts with every node in its own block. At each block count
    it runs Metropolis sweeps over the nodes (a node moves to a uniformly
    drawn other block with probability ``min(1, exp(-dS))``; the last member
    of a block never leaves), then greedily merges the pair of blocks whose
    merge raises the entropy least, until ``B_min`` blocks remain.

    Parameters
    ----------
    g : SocialGraph
        The network.
    B_min, B_max : int
        Range of block counts to report.
    sweeps : int, optional
        Metropolis sweeps per block count.
    seed : int
        Seed of the chain.
    description_length : bool
        Minimise entropy plus model description length.

    Raises
    ------
    BadRange
        If ``B_min < 1``, ``B_min > B_max``, ``sweeps < 1`` or the graph has
        fewer than ``B_min`` nodes.
    EntropyDrift
        If the incrementally tracked entropy diverges from a recomputation.

    Returns
    -------
    best : Partition
        The visited partition with minimal objective within the range.
    samples : list of Partition
        The partitions after every sweep within the range.
    """
    sweeps = SETTINGS["sweeps"] if sweeps is None else sweeps
    n = len(g.ids)
    if B_min < 1 or B_max < B_min:
        raise BadRange(f"Invalid block range [{B_min}, {B_max}]")
    if sweeps < 1:
        raise BadRange(f"sweeps must be at least 1, got {sweeps}")
    if n < B_min:
        raise BadRange(f"{n} nodes cannot form {B_min} blocks")

    def score(p: Partition) -> float:
        return p.description_length if description_length else p.entropy

    rng = spawn_rng(seed)
    chain = _Chain(g, description_length)
    samples: list[Partition] = []
    best: Optional[Partition] = None
    while True:
        in_range = B_min <= chain.n_blocks <= B_max
        for sweep in range(sweeps):
            accepted = 0
            for v in rng.permutation(n):
                r = chain.labels[v]
                if chain.n_blocks < 2 or chain.sizes[r] <= 1:
                    continue
                s = int(rng.integers(chain.n_blocks - 1))
                if s >= r:
                    s += 1
                delta = chain.move(v, s)
                if delta <= 0 or rng.random() < np.exp(-delta):
                    chain.value += delta
                    accepted += 1
                else:
                    chain.move(v, r)
            chain.check()
            logger.debug(
                "B=%d sweep %d: %d moves accepted, S=%.6f",
                chain.n_blocks,
                sweep,
                accepted,
                chain.value,
            )
            if in_range:
                sample = _partition(g, chain.labels.copy())
                samples.append(sample)
                if best is None or score(sample) < score(best):
                    best = sample
        if chain.n_blocks <= B_min:
            break
        candidates = []
        for r, s in itertools.combinations(range(chain.n_blocks), 2):
            candidates.append((chain.objective(*chain.merged(r, s)) - chain.value, r, s))
        delta, r, s = min(candidates)
        chain.merge(r, s)
        logger.debug("Merged blocks %d and %d: dS=%.6f", r, s, delta)
        if B_min <= chain.n_blocks <= B_max:
            merged = _partition(g, chain.labels.copy())
            if best is None or score(merged) < score(best):
                best = merged
    assert best is not None
    logger.info("Best partition has %d blocks, S=%.4f", best.B, best.entropy)
    return best, samples


def _align(sample: Partition, reference: Partition) -> np.ndarray:
    """Map every block of ``sample`` to a block of ``reference`` by greedy max overlap."""
    ids = list(reference.blocks)
    overlap = pd.crosstab(
        pd.Series([sample.blocks[v] for v in ids], name="sample"),
        pd.Series([reference.blocks[v] for v in ids], name="reference"),
    )
    mapping = np.full(sample.B, -1)
    taken: set[int] = set()
    pairs = sorted(
        (-int(overlap.loc[r, s]), int(r), int(s))
        for r in overlap.index
        for s in overlap.columns
    )
    for neg, r, s in pairs:
        if mapping[r] >= 0 or s in taken or neg == 0:
            continue
        mapping[r] = s
        taken.add(s)
    for r in range(sample.B):
        if mapping[r] < 0:
            mapping[r] = int(overlap.loc[r].idxmax())
    return mapping


def block_correlation(
    samples: Sequence[Partition], reference: Optional[Partition] = None
) -> pd.DataFrame:
    """Return the mean number of links between blocks over a set of samples.

    Samples are re-indexed onto the blocks of ``reference`` (by default the
    last sample) by greedy maximum-overlap matching. The diagonal holds the
    links within a block.

    Raises
    ------
    EmptySamples
        If ``samples`` is empty.

    Returns
    -------
    pd.DataFrame
        A symmetric ``B x B`` matrix indexed by the reference blocks.
    """
    if not samples:
        raise EmptySamples("block correlation needs at least one sample")
    reference = samples[-1] if reference is None else reference
    total = np.zeros((reference.B, reference.B))
    for sample in samples:
        mapping = _align(sample, reference)
        projection = np.zeros((sample.B, reference.B))
        projection[np.arange(sample.B), mapping] = 1
        e = projection.T @ sample.matrix @ projection
        e[np.diag_indices_from(e)] /= 2
        total += e
    mean = total / len(samples)
    return pd.DataFrame(mean, index=range(reference.B), columns=range(reference.B))


def block_composition(g: SocialGraph, partition: Partition, by: str = "typology") -> pd.DataFrame:
    """Count the actors of every block by typology or municipality."""
    blocks = pd.Series(partition.blocks, name="block").reindex(g.ids)
    return pd.crosstab(blocks, g.nodes[by])


def reweight_edges(
    g: SocialGraph,
    accepted_tags: Iterable[str],
    actor_tags: Mapping[str, Iterable[str]],
    bonus: Optional[float] = None,
) -> SocialGraph:
    """Raise the weight of links incident to actors backing accepted actions.

    Every link with at least one endpoint whose tags intersect
    ``accepted_tags`` gains ``bonus`` weight.

    Parameters
    ----------
    g : SocialGraph
        The baseline network.
    accepted_tags : iterable of str
        Tags of the accepted actions, e.g. a grounded extension.
    actor_tags : dict
        Tags put forward by each actor.
    bonus : float, optional
        Weight added per link.

    Returns
    -------
    SocialGraph
        A new graph; ``g`` is left unchanged.
    """
    bonus = SETTINGS["reweight_bonus"] if bonus is None else bonus
    accepted = set(accepted_tags)
    backers = {a for a, tags in actor_tags.items() if accepted & set(tags)}
    edges = g.edges.copy()
    hit = edges["src"].isin(backers) | edges["dst"].isin(backers)
    edges.loc[hit, "weight"] += bonus
    logger.info("Reweighted %d of %d links", int(hit.sum()), len(edges))
    return SocialGraph(g.nodes, edges)


_PALETTE = [
    "#1f77b4",
    "#ff7f0e",
    "#2ca02c",
    "#d62728",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#7f7f7f",
    "#bcbd22",
    "#17becf",
]


def to_dot(g: SocialGraph, partition: Optional[Partition] = None) -> str:
    """Return the network in Graphviz DOT format, nodes coloured by block."""
    lines = ["graph actors {", "  node [style=filled];"]
    for v, row in g.nodes.iterrows():
        attrs = [f'label="{row["name"]}"']
        if partition is not None:
            b = partition.blocks[v]
            attrs.append(f'fillcolor="{_PALETTE[b % len(_PALETTE)]}"')
            attrs.append(f"block={b}")
        lines.append(f'  "{v}" [{", ".join(attrs)}];')
    for row in g.edges.itertuples(index=False):
        lines.append(f'  "{row.src}" -- "{row.dst}" [weight={row.weight:g}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def partition_to_json(partition: Partition) -> dict[str, Any]:
    """Return the JSON document of a partition."""
    return partition.to_json()
