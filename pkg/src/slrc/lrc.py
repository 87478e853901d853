"""Locally repairable codes from rank-metric precoding.

The construction encodes the file with an [N, M] Gabidulin code, splits
the codeword into local groups and applies a small MDS array code (or a
zigzag code, for bandwidth-efficient in-group repair) over F_q inside
each group. Because the inner coefficients live in the base field, every
stored symbol remains a single evaluation of the outer linearized
polynomial at a tracked point; decodability of any node subset is exactly
a rank condition on its tracked points.

Two group layouts exist. When (r + delta - 1) divides n there are
g = n / (r + delta - 1) equal groups of r data blocks plus delta - 1
parities. Otherwise n mod (r + delta - 1) must exceed delta - 1 and the
remainder beta0 = n mod (r+delta-1) - (delta-1) forms one short trailing
group of beta0 data blocks plus delta - 1 parities; everything else is
unsupported (no construction is known there).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .arraycodes import (
    MdsArraySpec,
    RepairEntry,
    RepairTranscript,
    ZigzagSpec,
)
from .errors import (
    FieldTooSmall,
    InsufficientSurvivors,
    LengthMismatch,
    ModeUnsupported,
    TooLarge,
    UnsupportedShape,
)
from .fields import get_tower
from .linearized import GabidulinCode

__all__ = [
    "LrcSpec",
    "ShardSet",
    "build_lrc",
    "lrc_encode",
    "local_repair",
    "global_decode",
    "decode_from_nodes",
    "measure_dmin",
]


@dataclass
class GroupLayout:
    index: int
    nodes: list[int]  # global node ids, data blocks first
    data_count: int  # r, or beta0 for the short group
    cw_start: int  # first outer-codeword symbol of this group
    inner: object  # MdsArraySpec or ZigzagSpec

    @property
    def size(self):
        return len(self.nodes)


@dataclass
class ShardSet:
    """Per-node stored blocks with tracked evaluation points."""

    values: np.ndarray  # (n, alpha, m)
    points: np.ndarray  # (n, alpha, m)
    alive: np.ndarray  # (n,) bool
    group: np.ndarray  # (n,) int, group index per node

    @property
    def n(self):
        return self.values.shape[0]

    def copy(self):
        return ShardSet(
            self.values.copy(), self.points.copy(), self.alive.copy(), self.group.copy()
        )

    def erase(self, nodes):
        for i in nodes:
            self.alive[i] = False
            self.values[i] = 0

    def live_nodes(self):
        return [i for i in range(self.n) if self.alive[i]]


class LrcSpec:
    """A built locally repairable code instance (see :func:`build_lrc`)."""

    def __init__(self, n, r, delta, alpha, m_file, q, inner_kind, groups, tower, warnings):
        self.n = n
        self.r = r
        self.delta = delta
        self.alpha = alpha
        self.m_file = m_file
        self.q = q
        self.inner_kind = inner_kind
        self.groups = groups
        self.tower = tower
        self.warnings = warnings
        self.N = sum(g.data_count for g in groups) * alpha
        self.case = "divides" if groups[-1].data_count == r else "remainder"
        self.beta0 = 0 if self.case == "divides" else groups[-1].data_count
        self.g = len(groups)
        self.gab = GabidulinCode(tower, self.N, m_file)
        self.node_group = np.zeros(n, dtype=np.int64)
        self.node_pos = np.zeros(n, dtype=np.int64)
        for grp in groups:
            for pos, node in enumerate(grp.nodes):
                self.node_group[node] = grp.index
                self.node_pos[node] = pos
        self._points_tensor = self._track_all_points()

    # -- derived layout -------------------------------------------------------
    def group_of(self, node):
        return self.groups[self.node_group[node]]

    def _track_all_points(self):
        t = self.tower
        pts = np.zeros((self.n, self.alpha, t.m), dtype=np.int64)
        base = self.gab.points  # (N, m) canonical units
        for grp in self.groups:
            data = base[
                grp.cw_start : grp.cw_start + grp.data_count * self.alpha
            ].reshape(grp.data_count, self.alpha, t.m)
            encoded = grp.inner.encode(data)
            for pos, node in enumerate(grp.nodes):
                pts[node] = encoded[pos]
        return pts

    def node_points(self, node):
        return self._points_tensor[node]

    @property
    def message_len(self):
        return self.m_file

    # -- coding ------------------------------------------------------------------
    def encode(self, message):
        t = self.tower
        msg = np.asarray(message, dtype=np.int64)
        if msg.shape != (self.m_file, t.m):
            raise LengthMismatch(
                f"message must be ({self.m_file}, {t.m}), got {msg.shape}"
            )
        cw = self.gab.encode(msg)
        values = np.zeros((self.n, self.alpha, t.m), dtype=np.int64)
        for grp in self.groups:
            data = cw[
                grp.cw_start : grp.cw_start + grp.data_count * self.alpha
            ].reshape(grp.data_count, self.alpha, t.m)
            encoded = grp.inner.encode(data)
            for pos, node in enumerate(grp.nodes):
                values[node] = encoded[pos]
        return ShardSet(
            values=values,
            points=self._points_tensor.copy(),
            alive=np.ones(self.n, dtype=bool),
            group=self.node_group.copy(),
        )

    def repair(self, shards, failed, mode="naive"):
        return local_repair(self, shards, failed, mode=mode)

    def decode(self, shards):
        return global_decode(self, shards)


def build_lrc(n, r, delta, alpha, m_file, q, inner="mds"):
    """Construct an (r, delta, alpha) locally repairable code on n nodes
    holding m_file extension symbols.

    inner="mds" applies an interleaved Reed-Solomon array code per group;
    inner="msr" (equal groups only) applies a zigzag code per group so
    in-group repair is bandwidth efficient. For inner="msr", alpha must be
    the zigzag node size: (delta-1)**r, or (delta-1)**(r-1) when
    delta-1 == 2 (the reduced family).
    """
    if delta < 2 or r < 1 or alpha < 1:
        raise ValueError("need delta >= 2, r >= 1, alpha >= 1")
    eta = r + delta - 1
    if eta >= n:
        raise UnsupportedShape(f"need r+delta-1 < n, got {eta} >= {n}")
    warnings = []
    if eta > q and inner == "mds":
        raise FieldTooSmall(f"q={q} < r+delta-1={eta}")

    if n % eta == 0:
        case = "divides"
        g = n // eta
        beta0 = 0
        N = g * r * alpha
    else:
        beta0 = n % eta - (delta - 1)
        if beta0 < 1:
            raise UnsupportedShape(
                f"n mod (r+delta-1) = {n % eta} <= delta-1 = {delta - 1}: "
                "outside both supported layouts"
            )
        case = "remainder"
        g = n // eta + 1
        N = ((g - 1) * r + beta0) * alpha

    if not 1 <= m_file <= N:
        raise LengthMismatch(f"need 1 <= m_file <= N={N}, got {m_file}")

    if inner == "msr":
        if case != "divides":
            raise UnsupportedShape("inner='msr' requires (r+delta-1) | n")
        p = delta - 1
        if p < 2:
            raise UnsupportedShape("inner='msr' needs delta >= 3 (p >= 2)")
        if alpha == p**r:
            family = "standard"
        elif p == 2 and alpha == p ** (r - 1):
            family = "reduced"
        else:
            raise UnsupportedShape(
                f"alpha={alpha} is not a zigzag node size for r={r}, p={p}"
            )
        full_inner = ZigzagSpec(r, p, q, family=family)
    elif inner == "mds":
        full_inner = MdsArraySpec(eta, r, alpha, q)
    else:
        raise ValueError(f"unknown inner kind {inner!r}")

    groups = []
    node = 0
    cw = 0
    for gi in range(g):
        if case == "remainder" and gi == g - 1:
            data = beta0
            inner_spec = MdsArraySpec(beta0 + delta - 1, beta0, alpha, q)
        else:
            data = r
            inner_spec = full_inner
        size = data + delta - 1
        groups.append(
            GroupLayout(
                index=gi,
                nodes=list(range(node, node + size)),
                data_count=data,
                cw_start=cw,
                inner=inner_spec,
            )
        )
        node += size
        cw += data * alpha
    assert node == n and cw == N

    # optimality side condition for the remainder layout: the short width
    # must cover the message's last partial group
    if case == "remainder":
        ceil_k = math.ceil(m_file / alpha)
        if ceil_k % r == 0 or beta0 < ceil_k % r:
            warnings.append(
                "parameters miss the distance-optimality side condition "
                f"(short width {beta0} vs ceil(M/alpha) mod r = {ceil_k % r}); "
                "encoding works but the distance bound may not be met"
            )

    tower = get_tower(q, N)
    return LrcSpec(n, r, delta, alpha, m_file, q, inner, groups, tower, warnings)


def lrc_encode(spec: LrcSpec, message):
    return spec.encode(message)


def local_repair(spec: LrcSpec, shards: ShardSet, failed, mode="naive"):
    """Rebuild one node from its local group.

    naive: download the full blocks of the lowest-index live group mates
    (as many as the group's data count). bandwidth_efficient: zigzag
    in-group repair for systematic positions (needs every other group
    node alive); parity positions fall back to the naive download.

    Returns (values_block, transcript); the caller reinstates the block.
    """
    grp = spec.group_of(failed)
    pos = int(spec.node_pos[failed])
    live = [nd for nd in grp.nodes if nd != failed and shards.alive[nd]]

    if mode == "bandwidth_efficient":
        if not isinstance(grp.inner, ZigzagSpec):
            raise ModeUnsupported("bandwidth-efficient repair needs a zigzag inner code")
        if pos < grp.inner.k:
            if len(live) < grp.size - 1:
                raise InsufficientSurvivors(
                    f"zigzag repair needs all {grp.size - 1} group survivors"
                )
            blocks = np.stack([shards.values[nd] for nd in grp.nodes])
            points = np.stack([shards.points[nd] for nd in grp.nodes])
            rebuilt, tr = grp.inner.repair_systematic(pos, blocks, points=points)
            # transcript sources are in-group positions; translate to node ids
            for e in tr.entries:
                e.src = grp.nodes[e.src]
            tr.failed = failed
            return rebuilt, tr
        # parity node: no bandwidth-efficient rule; fall through to naive
    elif mode != "naive":
        raise ValueError(f"unknown repair mode {mode!r}")

    need = grp.data_count
    if len(live) < need:
        raise InsufficientSurvivors(
            f"group {grp.index} has {len(live)} live nodes, repair needs {need}"
        )
    donors = sorted(live)[:need]
    donor_pos = [int(spec.node_pos[nd]) for nd in donors]
    blocks = np.stack([shards.values[nd] for nd in donors])
    data = grp.inner.decode(donor_pos, blocks, tower=spec.tower)
    rebuilt = grp.inner.encode(data)[pos]
    tr = RepairTranscript(failed=failed)
    for nd in donors:
        for idx in range(spec.alpha):
            tr.entries.append(
                RepairEntry(
                    src=nd,
                    index=idx,
                    value=shards.values[nd][idx].copy(),
                    point=shards.points[nd][idx].copy(),
                )
            )
    return rebuilt, tr


def decode_from_nodes(spec: LrcSpec, shards: ShardSet, nodes):
    """Decode the file from the stated nodes only (they must be alive)."""
    t = spec.tower
    pts, vals = [], []
    for nd in nodes:
        if not shards.alive[nd]:
            raise ValueError(f"node {nd} is not alive")
        pts.append(shards.points[nd])
        vals.append(shards.values[nd])
    pts = np.concatenate(pts).reshape(-1, t.m)
    vals = np.concatenate(vals).reshape(-1, t.m)
    return spec.gab.decode_erasures(pts, vals)


def global_decode(spec: LrcSpec, shards: ShardSet):
    """Decode the file from every live node's symbols."""
    return decode_from_nodes(spec, shards, shards.live_nodes())


def measure_dmin(system, max_patterns=2_000_000):
    """Minimum distance by direct rank measurement.

    n minus the largest node subset whose tracked points have base rank
    below the file size, found by scanning subset sizes downward with
    early exit. ``system`` needs n, message_len, tower and node_points().
    """
    import itertools

    n = system.n
    t = system.tower
    m_file = system.message_len
    per_node = [np.asarray(system.node_points(i)).reshape(-1, t.m) for i in range(n)]
    for size in range(n - 1, 0, -1):
        if math.comb(n, size) > max_patterns:
            raise TooLarge(
                f"C({n},{size}) subsets exceed the enumeration guard {max_patterns}"
            )
        for subset in itertools.combinations(range(n), size):
            stacked = np.concatenate([per_node[i] for i in subset])
            if t.point_rank(stacked) < m_file:
                return n - size
    return n
