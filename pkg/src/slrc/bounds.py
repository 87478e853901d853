"""Closed-form file-size, distance and secrecy bounds, and the
information-flow-graph machinery that the storage bounds come from.

All arithmetic is exact: fractional quantities travel as
``fractions.Fraction`` and collapse to int when integral. Flow values are
computed by scaling every capacity to an integer before running max-flow.

Every bound evaluates to a :class:`BoundItem` carrying the inputs, the
value and a human-readable formula string, so reports are reproducible
from their own content.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx

from .errors import InvalidVariantParams

__all__ = [
    "BoundItem",
    "regen_tradeoff",
    "msr_point",
    "mbr_point",
    "dmin_bound",
    "lrc_file_size_bound",
    "theta_lower",
    "secrecy_bound",
    "secrecy_bounds",
    "zigzag_leak_count",
    "union_y_size",
    "FlowGraph",
    "regen_flow_graph",
    "lrc_flow_graph",
    "flow_mincut",
]


def _simplify(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


@dataclass
class BoundItem:
    name: str
    value: object
    params: dict
    formula: str
    note: str = ""

    def to_dict(self):
        v = _simplify(self.value)
        return {
            "name": self.name,
            "value": str(v) if isinstance(v, Fraction) else v,
            "params": {k: str(_simplify(v2)) if isinstance(_simplify(v2), Fraction) else _simplify(v2) for k, v2 in self.params.items()},
            "formula": self.formula,
            **({"note": self.note} if self.note else {}),
        }


# ---------------------------------------------------------------------------
# storage / repair trade-off
# ---------------------------------------------------------------------------


def regen_tradeoff(k, d, alpha, beta):
    """File-size cap for an (n, k) system repairing from d helpers."""
    alpha, beta = Fraction(alpha), Fraction(beta)
    value = sum(min(max(d - i, 0) * beta, alpha) for i in range(k))
    return BoundItem(
        name="regen_tradeoff",
        value=_simplify(value),
        params={"k": k, "d": d, "alpha": alpha, "beta": beta},
        formula="sum_{i=0}^{k-1} min((d-i)*beta, alpha)",
    )


def msr_point(m_file, k, d):
    """(alpha, beta) at the minimum-storage corner."""
    alpha = Fraction(m_file, k)
    beta = Fraction(m_file, k * (d - k + 1))
    return _simplify(alpha), _simplify(beta)


def mbr_point(m_file, k, d):
    """(alpha, beta) at the minimum-bandwidth corner."""
    denom = k * (2 * d - k + 1)
    return _simplify(Fraction(2 * m_file * d, denom)), _simplify(
        Fraction(2 * m_file, denom)
    )


# ---------------------------------------------------------------------------
# locality bounds
# ---------------------------------------------------------------------------


def dmin_bound(n, m_file, r, delta, alpha=1):
    """Distance cap for an (r, delta, alpha) locally repairable code."""
    value = (
        n
        - math.ceil(m_file / alpha)
        + 1
        - (math.ceil(m_file / (r * alpha)) - 1) * (delta - 1)
    )
    return BoundItem(
        name="dmin_bound",
        value=value,
        params={"n": n, "m_file": m_file, "r": r, "delta": delta, "alpha": alpha},
        formula="n - ceil(M/alpha) + 1 - (ceil(M/(r*alpha)) - 1)*(delta - 1)",
    )


def _mu_h(n, d_min, r, delta):
    contact = n - d_min + 1
    mu, h = divmod(contact, r + delta - 1)
    return mu, h


def lrc_file_size_bound(n, r, delta, alpha, beta, d, d_min):
    """File-size cap for a locally repairable code with per-group repair
    bandwidth d*beta.

    Returns (general, reduced): the cut-based value, and the
    mu*r*alpha + min(h, r)*alpha form that it collapses to when
    beta = alpha/(d - r + 1); reduced is None off that point.
    """
    if not r <= d <= r + delta - 2:
        raise InvalidVariantParams(f"need r <= d <= r+delta-2, got d={d}")
    alpha_f, beta_f = Fraction(alpha), Fraction(beta)
    mu, h = _mu_h(n, d_min, r, delta)

    def group_term(contacted):
        s = sum(
            min(max(d - i, 0) * beta_f, alpha_f) for i in range(contacted)
        )
        return min(Fraction(r) * alpha_f, s)

    general = group_term(h) + mu * group_term(r + delta - 1)
    general_item = BoundItem(
        name="lrc_file_size_bound",
        value=_simplify(general),
        params={
            "n": n, "r": r, "delta": delta, "alpha": alpha, "beta": beta,
            "d": d, "d_min": d_min, "mu": mu, "h": h,
        },
        formula=(
            "min(r*alpha, sum_{i<h} min((d-i)*beta, alpha)) "
            "+ mu * min(r*alpha, sum_{i<r+delta-1} min(max(d-i,0)*beta, alpha))"
        ),
    )
    reduced_item = None
    if beta_f == alpha_f / (d - r + 1):
        reduced_item = BoundItem(
            name="lrc_file_size_bound_msr_point",
            value=(mu * r + min(h, r)) * alpha,
            params=dict(general_item.params),
            formula="(mu*r + min(h, r)) * alpha",
        )
    return general_item, reduced_item


# ---------------------------------------------------------------------------
# secrecy bounds
# ---------------------------------------------------------------------------


def theta_lower(alpha, beta, t, parities):
    """Lower bound on what one intact helper leaks across t observed
    in-group repairs; ``parities`` is the parity count (d - r + 1 at the
    bandwidth-optimal point). Exact only for t <= 2; beyond that only the
    geometric-series form is known, so values are bounds, not capacities.
    """
    if t == 0:
        return Fraction(0)
    alpha, beta = Fraction(alpha), Fraction(beta)
    geometric = alpha * (1 - (1 - Fraction(1, parities)) ** t)
    candidates = [geometric]
    if t == 1:
        candidates.append(beta)
    elif t == 2:
        candidates.append(2 * beta - alpha / parities**2)
    return max(candidates)


def _pawar(l1, l2, k, d, alpha, beta):
    ell = l1 + l2
    alpha, beta = Fraction(alpha), Fraction(beta)
    return sum(min(max(d - i + 1, 0) * beta, alpha) for i in range(ell + 1, k + 1))


def secrecy_bound(variant, l1, l2, **params):
    """One secure-file-size upper bound; see ``secrecy_bounds`` for the
    variant catalogue."""
    if l1 < 0 or l2 < 0:
        raise InvalidVariantParams("eavesdropper counts must be nonnegative")
    p = dict(params)
    if variant == "pawar":
        value = _pawar(l1, l2, p["k"], p["d"], p["alpha"], p["beta"])
        formula = "sum_{i=l1+l2+1}^{k} min((d-i+1)*beta, alpha)"
    elif variant == "msr_generic":
        value = (p["k"] - l1 - l2) * (Fraction(p["alpha"]) - Fraction(p["beta"]))
        formula = "(k - l1 - l2) * (alpha - beta)"
    elif variant == "msr_ia":
        if l2 > 2:
            raise InvalidVariantParams("interference-alignment bound needs l2 <= 2")
        alpha, beta = Fraction(p["alpha"]), Fraction(p["beta"])
        parities = p["n"] - p["k"]
        theta = (
            Fraction(0)
            if l2 == 0
            else (beta if l2 == 1 else 2 * beta - beta / parities)
        )
        value = (p["k"] - l1 - l2) * (alpha - theta)
        formula = "(k - l1 - l2) * (alpha - theta(alpha, beta, l2))"
    elif variant == "goparaju":
        alpha = Fraction(p["alpha"])
        parities = p["n"] - p["k"]
        value = (p["k"] - l1 - l2) * (1 - Fraction(1, parities)) ** l2 * alpha
        formula = "(k - l1 - l2) * (1 - 1/(n-k))^l2 * alpha"
    elif variant == "zigzag_capacity":
        k, zp = p["k"], p["p"]
        value = (k - l1 - l2) * zp ** (k - l2) * (zp - 1) ** l2
        formula = "(k - l1 - l2) * p^k * (1 - 1/p)^l2"
    elif variant == "lrc_delta2":
        mu, h, r, alpha = p["mu"], p["h"], p["r"], p["alpha"]
        value = max(mu * r + h - (l2 * r + l1), 0) * alpha
        formula = "max(mu*r + h - (l2*r + l1), 0) * alpha"
    elif variant == "msr_lrc":
        mu, h, r, alpha, beta = p["mu"], p["h"], p["r"], p["alpha"], p["beta"]
        if l2 * r + l1 > mu * r + min(h, r):
            raise InvalidVariantParams(
                "capacity characterized only for l2*r + l1 <= mu*r + min(h, r)"
            )
        value = (mu * r + min(h, r) - l2 - l1) * Fraction(alpha) - l2 * (r - 1) * Fraction(p["beta"])
        formula = "(mu*r + min(h,r) - l2 - l1) * alpha - l2*(r-1)*beta"
    elif variant == "msr_lrc_general":
        value, decomp = _msr_lrc_general(l1, l2, **p)
        p.update(decomp)
        return BoundItem(
            name=variant,
            value=_simplify(value),
            params={"l1": l1, "l2": l2, **p},
            formula=(
                "min over l2 = mu*xi + rho + nu of (rho*(r-xi-1) - xi_hat)*(alpha - theta(xi+1)) "
                "+ ((mu-rho)*(r-xi) - xi_tld)*(alpha - theta(xi)) "
                "+ (min(r,h) - nu - nu_tld)*(alpha - theta(nu))"
            ),
            note="bound, not capacity (theta known only as a lower bound)",
        )
    else:
        raise InvalidVariantParams(f"unknown variant {variant!r}")
    return BoundItem(
        name=variant,
        value=_simplify(value),
        params={"l1": l1, "l2": l2, **p},
        formula=formula,
    )


def _msr_lrc_general(l1, l2, mu, h, r, delta, alpha, beta):
    parities = delta - 1
    best = None
    best_decomp = None
    for xi in range(0, min(l2, r - 1) + 1):
        for rho in range(0, mu + 1):
            nu = l2 - mu * xi - rho
            # nu <= min(h, xi): with xi = 0 that forces nu = 0
            if not 0 <= nu <= min(h, xi):
                continue
            if rho > 0 and r - xi - 1 < 0:
                continue
            nu_tld = min(min(h, r) - nu, l1)
            xi_tld = min((mu - rho) * (r - xi), max(l1 - nu_tld, 0))
            xi_hat = min(rho * (r - xi - 1), max(l1 - nu_tld - xi_tld, 0))
            val = (
                (rho * (r - xi - 1) - xi_hat)
                * (Fraction(alpha) - theta_lower(alpha, beta, xi + 1, parities))
                + ((mu - rho) * (r - xi) - xi_tld)
                * (Fraction(alpha) - theta_lower(alpha, beta, xi, parities))
                + (min(r, h) - nu - nu_tld)
                * (Fraction(alpha) - theta_lower(alpha, beta, nu, parities))
            )
            if best is None or val < best:
                best = val
                best_decomp = {"xi": xi, "rho": rho, "nu": nu}
    if best is None:
        raise InvalidVariantParams(
            f"no valid (xi, rho, nu) decomposition of l2={l2} with mu={mu}, h={h}"
        )
    return best, best_decomp


def secrecy_bounds(variants, l1, l2, **params):
    """Evaluate several variants on one parameter tuple."""
    return [secrecy_bound(v, l1, l2, **params) for v in variants]


# ---------------------------------------------------------------------------
# zigzag leakage counting
# ---------------------------------------------------------------------------


def union_y_size(k, p, l2):
    """Rows an intact node ships across repairs of l2 distinct systematic
    columns: p^k - p^(k-l2) * (p-1)^l2, by inclusion-exclusion."""
    if l2 > k:
        raise InvalidVariantParams("cannot observe more repairs than columns")
    return p**k - p ** (k - l2) * (p - 1) ** l2


def zigzag_leak_count(k, p, l1_sys=0, l1_par=0, l2=0):
    """Independent symbols a (l1, l2) eavesdropper sees on a (k+p, k)
    zigzag system: k*p^k - p^k (k - l1 - l2)(1 - 1/p)^l2. The split of
    storage-eavesdropped nodes between systematic and parity does not
    change the count."""
    l1 = l1_sys + l1_par
    if l2 > k:
        raise InvalidVariantParams("cannot observe more repairs than columns")
    return k * p**k - (k - l1 - l2) * p ** (k - l2) * (p - 1) ** l2


# ---------------------------------------------------------------------------
# information flow graphs
# ---------------------------------------------------------------------------

INF = "inf"


class FlowGraph:
    """Capacitated digraph with exact rational capacities.

    Max-flow runs on an integer-scaled copy (common denominator of all
    capacities), so values are exact Fractions.
    """

    def __init__(self):
        self.g = nx.DiGraph()

    def add_edge(self, u, v, capacity):
        if capacity != INF:
            capacity = Fraction(capacity)
            if capacity < 0:
                raise ValueError("negative capacity")
        self.g.add_edge(u, v, capacity=capacity)

    def max_flow(self, src="S", dst="DC"):
        denom = 1
        finite_total = Fraction(0)
        for _, _, d in self.g.edges(data=True):
            c = d["capacity"]
            if c != INF:
                denom = math.lcm(denom, Fraction(c).denominator)
                finite_total += Fraction(c)
        big = int(finite_total * denom) + 1
        h = nx.DiGraph()
        for u, v, d in self.g.edges(data=True):
            c = d["capacity"]
            h.add_edge(u, v, capacity=big if c == INF else int(Fraction(c) * denom))
        value, _ = nx.maximum_flow(h, src, dst)
        return _simplify(Fraction(value, denom))


def regen_flow_graph(k, d, alpha, beta, origins=None):
    """k sequential failures repaired from d helpers each; the collector
    reads the k newcomers. Reproduces the storage/repair trade-off cap."""
    fg = FlowGraph()
    n_orig = origins if origins is not None else max(d + 1, k)
    for i in range(n_orig):
        fg.add_edge("S", ("in", i), INF)
        fg.add_edge(("in", i), ("out", i), alpha)
    for w in range(k):
        fresh = max(d - w, 0)
        for i in range(w + 1, w + 1 + fresh):
            fg.add_edge(("out", i), ("win", w), beta)
        for prev in range(w):
            fg.add_edge(("wout", prev), ("win", w), beta)
        fg.add_edge(("win", w), ("wout", w), alpha)
        fg.add_edge(("wout", w), "DC", INF)
    return fg


def lrc_flow_graph(n, r, delta, alpha, beta, d, d_min):
    """Canonical worst-case collector for a grouped system: mu fully
    contacted groups plus h nodes of one more, every contacted node being
    a newcomer repaired in failure order inside its group."""
    eta = r + delta - 1
    mu, h = _mu_h(n, d_min, r, delta)
    fg = FlowGraph()
    contacted = [eta] * mu + ([h] if h else [])
    for gi, k_tilde in enumerate(contacted):
        gate_in, gate_out = ("gin", gi), ("gout", gi)
        fg.add_edge("S", gate_in, INF)
        fg.add_edge(gate_in, gate_out, Fraction(r) * Fraction(alpha))
        for i in range(eta):
            fg.add_edge(gate_out, ("in", gi, i), INF)
            fg.add_edge(("in", gi, i), ("out", gi, i), alpha)
        for w in range(k_tilde):
            fresh = max(d - w, 0)
            # originals w+1 .. eta-1 are still unfailed; take the first `fresh`
            assert fresh <= eta - 1 - w
            for i in range(w + 1, w + 1 + fresh):
                fg.add_edge(("out", gi, i), ("win", gi, w), beta)
            for prev in range(w):
                fg.add_edge(("wout", gi, prev), ("win", gi, w), beta)
            fg.add_edge(("win", gi, w), ("wout", gi, w), alpha)
            fg.add_edge(("wout", gi, w), "DC", INF)
    return fg


def flow_mincut(graph: FlowGraph, src="S", dst="DC"):
    return graph.max_flow(src, dst)
