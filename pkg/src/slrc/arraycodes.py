"""MDS array codes over F_q: interleaved Reed-Solomon and zigzag codes.

Both codes act on blocks of alpha symbols per node with base-field
coefficients, so encoding commutes with linearized-polynomial evaluation:
feeding blocks of extension elements (or of evaluation-point coordinates)
through the same generator keeps every stored symbol a single evaluation
of the outer polynomial.

The zigzag code arranges k*alpha message symbols in an alpha x k array,
alpha = p^mv where p is the parity count, and builds parities from shift
vectors in Z_p^mv. Two vector families are supported:

* ``standard``: shifts e_1..e_k in Z_p^k, alpha = p^k. Every systematic
  node repairs by downloading the rows Y_j = {t : digit_{j-1}(t) = 0}
  (beta = alpha/p per helper) from all n-1 survivors.
* ``reduced`` (p = 2 only): shifts {0, e_1..e_{k-1}} in Z_2^(k-1),
  alpha = p^(k-1). Columns with a nonzero shift repair exactly as above;
  the zero-shift column downloads even-weight rows from the systematic
  survivors and parity 0 and odd-weight rows from parity 1.

Every instance certifies itself at construction: exhaustive erasure
patterns for the MDS property and alignment/coverage of every repair
plan. The certificate, not the coefficient formula, is the contract.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    FieldTooSmall,
    MissingSurvivor,
    NotMds,
    ShapeMismatch,
)
from .fields import FieldTower, is_prime

__all__ = [
    "MdsArraySpec",
    "make_interleaved_rs",
    "ZigzagSpec",
    "make_zigzag",
    "make_zigzag_auto_q",
    "RepairTranscript",
]


@dataclass
class RepairEntry:
    src: int
    index: int  # symbol index within the source node
    value: np.ndarray
    point: np.ndarray | None = None


@dataclass
class RepairTranscript:
    """Every symbol a newcomer downloaded, with provenance."""

    failed: int
    entries: list[RepairEntry] = field(default_factory=list)

    @property
    def downloaded(self):
        return len(self.entries)

    def per_source(self):
        counts = {}
        for e in self.entries:
            counts[e.src] = counts.get(e.src, 0) + 1
        return counts


# ---------------------------------------------------------------------------
# Interleaved Reed-Solomon MDS array code
# ---------------------------------------------------------------------------


class MdsArraySpec:
    """[n_blocks, k_blocks*alpha, n_blocks-k_blocks+1, alpha] MDS array code.

    One systematic [n_blocks, k_blocks] Reed-Solomon code over F_q applied
    independently to each of the alpha interleaved lanes.
    """

    def __init__(self, n_blocks, k_blocks, alpha, q):
        if min(n_blocks, k_blocks, alpha) < 1 or k_blocks > n_blocks:
            raise ValueError("need 1 <= k_blocks <= n_blocks, alpha >= 1")
        if not is_prime(q):
            raise FieldTooSmall(f"{q} is not a prime")
        if q < n_blocks:
            raise FieldTooSmall(
                f"q={q} < n_blocks={n_blocks}: not enough evaluation points"
            )
        self.n_blocks = n_blocks
        self.k_blocks = k_blocks
        self.alpha = alpha
        self.q = q
        self.scalar_gen = self._systematic_rs_generator()
        self.gen = np.kron(self.scalar_gen, np.eye(alpha, dtype=np.int64))
        self._certify()

    def _systematic_rs_generator(self):
        n, k, q = self.n_blocks, self.k_blocks, self.q
        xs = np.arange(n) % q
        gen = np.zeros((k, n), dtype=np.int64)
        gen[:, :k] = np.eye(k, dtype=np.int64)
        for j in range(k, n):
            for i in range(k):
                # Lagrange basis L_i evaluated at xs[j]
                num, den = 1, 1
                for u in range(k):
                    if u == i:
                        continue
                    num = num * (xs[j] - xs[u]) % q
                    den = den * (xs[i] - xs[u]) % q
                gen[i, j] = num * pow(int(den), q - 2, q) % q
        return gen

    def _certify(self):
        tower = FieldTower(self.q, 1)
        k, a = self.k_blocks, self.alpha
        for subset in itertools.combinations(range(self.n_blocks), k):
            cols = np.concatenate([np.arange(b * a, (b + 1) * a) for b in subset])
            if tower.rank_base(self.gen[:, cols]) != k * a:
                raise NotMds(self.q, subset)

    @property
    def block_min_distance(self):
        return self.n_blocks - self.k_blocks + 1

    def encode(self, blocks):
        """(k_blocks, alpha, ...) -> (n_blocks, alpha, ...).

        Entries may be base scalars or extension coordinates; the base
        generator acts on whatever the trailing axes hold.
        """
        blocks = np.asarray(blocks, dtype=np.int64)
        if blocks.shape[:2] != (self.k_blocks, self.alpha):
            raise ShapeMismatch(
                f"expected ({self.k_blocks}, {self.alpha}, ...), got {blocks.shape}"
            )
        return np.tensordot(self.scalar_gen, blocks, axes=(0, 0)) % self.q

    def decode(self, block_ids, blocks, tower=None):
        """Recover the k_blocks message blocks from any k_blocks outputs."""
        block_ids = list(block_ids)
        blocks = np.asarray(blocks, dtype=np.int64)
        if len(block_ids) < self.k_blocks:
            raise MissingSurvivor(
                f"need {self.k_blocks} blocks, got {len(block_ids)}"
            )
        q = self.q
        A = self.scalar_gen[:, block_ids].T  # (s, k)
        t = tower if tower is not None else FieldTower(q, 1)
        flat = blocks.reshape(len(block_ids), -1)
        X = t.solve_base(A, flat)
        return X.reshape((self.k_blocks,) + blocks.shape[1:])


def make_interleaved_rs(n_blocks, k_blocks, alpha, q):
    return MdsArraySpec(n_blocks, k_blocks, alpha, q)


# ---------------------------------------------------------------------------
# Zigzag codes
# ---------------------------------------------------------------------------


class ZigzagSpec:
    """Systematic (k+p, k) MDS array code with bandwidth-efficient repair.

    Rows are indexed by integers in [0, p^mv) read as little-endian p-ary
    digit vectors (digit d is the coordinate of e_{d+1}). Parity l+1 at
    row t is sum_j coeff(l, j) * x[t - l*v_j, j] over F_q with
    coeff(l, j) = lambda_j^l, lambda_j distinct and nonzero.
    """

    def __init__(self, k, p, q, family="standard"):
        if k < 2 or p < 2:
            raise ValueError("need k >= 2 and p >= 2")
        if not is_prime(q):
            raise FieldTooSmall(f"{q} is not a prime")
        if q <= k:
            raise FieldTooSmall(f"q={q} too small for {k} distinct nonzero coefficients")
        if family not in ("standard", "reduced"):
            raise ValueError(f"unknown zigzag family {family!r}")
        if family == "reduced" and p != 2:
            raise ValueError("reduced family is defined for p = 2 only")
        self.k = k
        self.p = p
        self.q = q
        self.family = family
        self.n = k + p
        self.mv = k if family == "standard" else k - 1
        self.alpha = p**self.mv
        self.beta = self.alpha // p
        if family == "standard":
            self.vectors = [self._unit(j) for j in range(k)]
        else:
            self.vectors = [np.zeros(self.mv, dtype=np.int64)] + [
                self._unit(j) for j in range(k - 1)
            ]
        self.lambdas = np.arange(1, k + 1, dtype=np.int64) % q
        self._digits = self._digit_table()
        self._row_of = {tuple(d): i for i, d in enumerate(self._digits)}
        self.gen = self._generator()
        self._plans = {j: self._repair_plan(j) for j in range(k)}
        self._certify_mds()
        for j in range(k):
            self._verify_plan(j)

    # -- indexing helpers ----------------------------------------------------
    def _unit(self, d):
        v = np.zeros(self.mv, dtype=np.int64)
        v[d] = 1
        return v

    def _digit_table(self):
        rows = np.arange(self.alpha)
        return np.stack(
            [(rows // self.p**d) % self.p for d in range(self.mv)], axis=1
        )

    def row_index(self, digits):
        return self._row_of[tuple(int(x) % self.p for x in digits)]

    def shifted_rows(self, l, j):
        """Row permutation: source row of column j feeding parity l at
        each parity row t, i.e. t - l*v_j."""
        shifted = (self._digits - l * self.vectors[j]) % self.p
        return np.array([self._row_of[tuple(d)] for d in shifted])

    def zigzag_set(self, l, t):
        """Members {(row, column)} of the parity-(l+1) combination at row t."""
        out = []
        tvec = self._digits[t]
        for j in range(self.k):
            src = (tvec - l * self.vectors[j]) % self.p
            out.append((self._row_of[tuple(src)], j))
        return out

    def y_rows(self, j):
        """Repair row set for a nonzero-shift column: {t : t . v_j = 0}."""
        v = self.vectors[j]
        if not v.any():
            raise ValueError("zero-shift column has per-survivor row sets")
        mask = (self._digits @ v) % self.p == 0
        return np.nonzero(mask)[0]

    # -- construction --------------------------------------------------------
    def _generator(self):
        k, a, n, q = self.k, self.alpha, self.n, self.q
        gen = np.zeros((k * a, n * a), dtype=np.int64)
        gen[:, : k * a] = np.eye(k * a, dtype=np.int64)
        for l in range(self.p):
            node = k + l
            for j in range(k):
                coeff = pow(int(self.lambdas[j]), l, q)
                src = self.shifted_rows(l, j)
                for t in range(a):
                    gen[j * a + src[t], node * a + t] = coeff
        return gen

    def _certify_mds(self):
        tower = FieldTower(self.q, 1)
        a, k = self.alpha, self.k
        for erased in itertools.combinations(range(self.n), self.p):
            keep = [b for b in range(self.n) if b not in erased]
            cols = np.concatenate([np.arange(b * a, (b + 1) * a) for b in keep])
            if tower.rank_base(self.gen[:, cols]) != k * a:
                raise NotMds(self.q, erased)

    def _repair_plan(self, j):
        """Rows each survivor ships when systematic column j fails."""
        plan = {}
        if self.vectors[j].any():
            rows = self.y_rows(j)
            for node in range(self.n):
                if node != j:
                    plan[node] = rows
        else:
            # reduced family, zero-shift column, p = 2
            weight = self._digits.sum(axis=1) % 2
            even = np.nonzero(weight == 0)[0]
            odd = np.nonzero(weight == 1)[0]
            for node in range(self.n):
                if node == j:
                    continue
                plan[node] = odd if node == self.k + 1 else even
        return plan

    def _verify_plan(self, j):
        """Alignment + coverage certificate for the repair of column j."""
        plan = self._plans[j]
        covered = set()
        for l in range(self.p):
            parity_node = self.k + l
            rows = plan[parity_node]
            for t in rows:
                for (src_row, col) in self.zigzag_set(l, t):
                    if col == j:
                        assert src_row not in covered, "cell covered twice"
                        covered.add(src_row)
                    else:
                        assert src_row in set(plan[col].tolist()), (
                            f"repair of {j}: interference row {src_row} of column "
                            f"{col} not downloaded"
                        )
        assert covered == set(range(self.alpha)), f"repair of {j} misses cells"

    # -- coding operations --------------------------------------------------
    def encode(self, columns):
        """(k, alpha, ...) systematic columns -> (n, alpha, ...) node blocks."""
        cols = np.asarray(columns, dtype=np.int64)
        if cols.shape[:2] != (self.k, self.alpha):
            raise ShapeMismatch(
                f"expected ({self.k}, {self.alpha}, ...), got {cols.shape}"
            )
        out = np.zeros((self.n,) + cols.shape[1:], dtype=np.int64)
        out[: self.k] = cols % self.q
        for l in range(self.p):
            acc = np.zeros(cols.shape[1:], dtype=np.int64)
            for j in range(self.k):
                coeff = pow(int(self.lambdas[j]), l, self.q)
                acc += coeff * cols[j][self.shifted_rows(l, j)]
            out[self.k + l] = acc % self.q
        return out

    def decode(self, node_ids, blocks, tower=None):
        """Any k node blocks -> the k systematic columns."""
        node_ids = list(node_ids)
        blocks = np.asarray(blocks, dtype=np.int64)
        a = self.alpha
        cols = np.concatenate([np.arange(b * a, (b + 1) * a) for b in node_ids])
        A = self.gen[:, cols].T
        t = tower if tower is not None else FieldTower(self.q, 1)
        flat = blocks.reshape(len(node_ids) * a, -1)
        X = t.solve_base(A, flat)
        return X.reshape((self.k, a) + blocks.shape[2:])

    def repair_systematic(self, failed_j, blocks, points=None):
        """Exact repair of systematic column ``failed_j`` from the other
        n-1 node blocks, downloading beta rows from each.

        Returns the rebuilt (alpha, ...) block and a RepairTranscript. If
        ``points`` (same shape as blocks) is given, downloaded entries
        carry their tracked points.
        """
        if not 0 <= failed_j < self.k:
            raise ValueError(f"column {failed_j} is not systematic")
        blocks = np.asarray(blocks, dtype=np.int64)
        if blocks.shape[0] != self.n:
            raise ShapeMismatch(f"need {self.n} node blocks")
        plan = self._plans[failed_j]
        transcript = RepairTranscript(failed=failed_j)
        for node in sorted(plan):
            if blocks[node] is None:
                raise MissingSurvivor(f"node {node} required for repair")
            for t in plan[node]:
                transcript.entries.append(
                    RepairEntry(
                        src=node,
                        index=int(t),
                        value=blocks[node][t].copy(),
                        point=None if points is None else points[node][t].copy(),
                    )
                )
        rebuilt = np.zeros_like(blocks[0])
        seen = np.zeros(self.alpha, dtype=bool)
        inv = {}  # cached scalar inverses mod q
        for l in range(self.p):
            parity_node = self.k + l
            coeff_j = pow(int(self.lambdas[failed_j]), l, self.q)
            if coeff_j not in inv:
                inv[coeff_j] = pow(coeff_j, self.q - 2, self.q)
            for t in plan[parity_node]:
                residual = blocks[parity_node][t].copy()
                target_row = None
                for (src_row, col) in self.zigzag_set(l, t):
                    if col == failed_j:
                        target_row = src_row
                        continue
                    c = pow(int(self.lambdas[col]), l, self.q)
                    residual = (residual - c * blocks[col][src_row]) % self.q
                rebuilt[target_row] = residual * inv[coeff_j] % self.q
                seen[target_row] = True
        assert seen.all()
        return rebuilt, transcript

    def repair_rows(self, failed_j):
        """The per-survivor row plan for a systematic repair."""
        return {node: rows.copy() for node, rows in self._plans[failed_j].items()}

    def repair_subspace_dims(self, i, repaired):
        """Dimension of the intersection of node i's repair row selections
        across the repairs in ``repaired`` (a set of systematic columns)."""
        repaired = [j for j in repaired if j != i]
        common = set(range(self.alpha))
        for j in repaired:
            common &= set(self._plans[j][i].tolist())
        return len(common)


def make_zigzag(k, p, q, family="standard"):
    """Build and certify a zigzag code at the given field size.

    Raises NotMds when the coefficient family fails the exhaustive
    certificate at this q; the caller must raise q.
    """
    return ZigzagSpec(k, p, q, family=family)


def make_zigzag_auto_q(k, p, q_start=None, family="standard", attempts=8):
    """Deterministically bump q to the next prime until the certificate
    passes; returns the certified spec."""
    q = q_start if q_start is not None else k + 1
    tried = 0
    while tried < attempts:
        while not is_prime(q) or q <= k:
            q += 1
        try:
            return ZigzagSpec(k, p, q, family=family)
        except NotMds:
            q += 1
            tried += 1
    raise NotMds(q, ("gave up after", attempts, "field sizes"))
