"""Linearized polynomials, Moore matrices and Gabidulin erasure codes.

A linearized polynomial sum_i a_i y^(q^(i-1)) acts F_q-linearly on
F_{q^m}; evaluating one at N F_q-independent points gives a rank-metric
codeword that survives any N-K point erasures. Evaluation points are
plain field elements and are represented by their coordinate vectors, so
"tracking" the point behind a stored symbol is just carrying an m-vector
alongside the value.

Erasure decoding is interpolation: given evaluations at K independent
points the polynomial is rebuilt by a Newton-style recursion over
annihilator polynomials (each step adjoins one point). The result equals
solving the K x K Moore system directly, which ``FieldTower.solve_ext``
also provides; tests cross-check the two.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    EvaluationMismatch,
    LengthMismatch,
    NonBaseCoefficient,
    RankDeficient,
)
from .fields import ExtElem, FieldTower

__all__ = [
    "LinearizedPoly",
    "moore_matrix",
    "GabidulinCode",
    "track_point",
    "interpolate",
]


def _coords(tower, items):
    """Normalize ExtElem / coordinate input to an (n, m) int array."""
    if isinstance(items, np.ndarray):
        arr = items.astype(np.int64) % tower.q
        if arr.ndim == 1:
            arr = arr[None, :]
        return arr
    rows = []
    for it in items:
        if isinstance(it, ExtElem):
            if it.tower != tower:
                raise ValueError("element from a different tower")
            rows.append(it.coeffs)
        else:
            rows.append(np.asarray(it, dtype=np.int64))
    return np.array(rows, dtype=np.int64) % tower.q


class LinearizedPoly:
    """Coefficients a_1..a_K of f(y) = sum a_i y^(q^(i-1))."""

    def __init__(self, tower: FieldTower, coeffs):
        self.tower = tower
        self.coeffs = _coords(tower, coeffs)
        if self.coeffs.shape[0] < 1:
            raise ValueError("need at least one coefficient")

    @property
    def num_coeffs(self):
        return self.coeffs.shape[0]

    def q_degree(self):
        """Largest i-1 with a_i nonzero, or -1 for the zero polynomial."""
        nz = np.nonzero(self.coeffs.any(axis=1))[0]
        return int(nz[-1]) if nz.size else -1

    def __call__(self, point):
        return self.evaluate(point)

    def evaluate(self, point):
        """Evaluate at one point (ExtElem in, ExtElem out)."""
        e = point if isinstance(point, ExtElem) else self.tower.element(point)
        vals = self.evaluate_many(np.array([e.coeffs], dtype=np.int64))
        return ExtElem(self.tower, vals[0])

    def evaluate_many(self, points):
        """Evaluate at an (n, m) array of points; returns (n, m) values."""
        t = self.tower
        pts = _coords(t, points)
        powers = moore_matrix(t, pts, self.num_coeffs)  # (n, K, m)
        prods = t.mul(powers, self.coeffs[None, :, :])
        return prods.sum(axis=1) % t.q


def moore_matrix(tower, points, K):
    """(n, K, m) tensor with entry [j, i] = points[j]^(q^i), i in [0, K).

    Row j is the linear functional that evaluation at points[j] applies to
    the coefficient vector of a K-term linearized polynomial.
    """
    pts = _coords(tower, points)
    n = pts.shape[0]
    out = np.empty((n, K, m_ := tower.m), dtype=np.int64)
    cur = pts % tower.q
    for i in range(K):
        out[:, i, :] = cur
        if i + 1 < K:
            cur = cur @ tower.frob_matrix(1) % tower.q
    return out


def track_point(tower, combination, points):
    """The single point whose evaluation equals an F_q-combination of
    evaluations at ``points``.

    ``combination`` holds base-field scalars; anything outside [0, q) that
    is not congruent to a base scalar is rejected, because only base-field
    combinations commute with linearized evaluation.
    """
    comb = np.asarray(combination)
    if comb.ndim == 2:
        # coordinate rows for extension scalars: only base-field ones allowed
        if comb.shape[1] != tower.m:
            raise ValueError("bad combination shape")
        if tower.m > 1 and comb[:, 1:].any():
            raise NonBaseCoefficient("combination uses extension-field scalars")
        comb = comb[:, 0]
    if not np.issubdtype(comb.dtype, np.integer):
        raise NonBaseCoefficient("combination coefficients must be integers mod q")
    pts = _coords(tower, points)
    if comb.shape[0] != pts.shape[0]:
        raise ValueError("one coefficient per point required")
    return comb % tower.q @ pts % tower.q


def interpolate(tower, points, values):
    """Coefficients of the unique K-term linearized polynomial through
    K evaluations at F_q-independent points.

    Newton recursion: maintain the annihilator L_j of the first j points
    (monic-free form, q-degree j) and the interpolant F_j; adjoining point
    z with residual w requires F_{j+1} = F_j + c L_j, c = w / L_j(z), and
    L_{j+1}(y) = L_j(y)^q - L_j(z)^(q-1) L_j(y).
    """
    t = tower
    pts = _coords(t, points)
    vals = _coords(t, values)
    K = pts.shape[0]
    if vals.shape[0] != K:
        raise LengthMismatch("points/values count mismatch")
    m = t.m
    f_coeffs = np.zeros((K, m), dtype=np.int64)
    l_coeffs = np.zeros((K + 1, m), dtype=np.int64)
    l_coeffs[0, 0] = 1  # L_0(y) = y
    # running evaluations of L_j and F_j at every input point
    Lv = pts.copy()
    Fv = np.zeros_like(pts)
    frob = t.frob_matrix(1)
    for j in range(K):
        lz = Lv[j]
        if not lz.any():
            # point j lies in the span of the previous ones
            raise RankDeficient(j, K)
        inv_lz = t.scalar_inv(lz)
        c = t.mul(t.sub(vals[j], Fv[j]), inv_lz)
        if c.any():
            f_coeffs[: j + 1] = (f_coeffs[: j + 1] + t.mul(c, l_coeffs[: j + 1])) % t.q
            Fv = (Fv + t.mul(c, Lv)) % t.q
        if j + 1 < K:
            a = t.mul(t.frobenius(lz), inv_lz)  # lz^(q-1)
            new_l = np.zeros_like(l_coeffs)
            new_l[1 : j + 2] = l_coeffs[: j + 1] @ frob % t.q
            new_l[: j + 1] = (new_l[: j + 1] - t.mul(a, l_coeffs[: j + 1])) % t.q
            l_coeffs = new_l
            Lv = (Lv @ frob - t.mul(a, Lv)) % t.q
    return f_coeffs


class GabidulinCode:
    """[N, K] evaluation code of K-term linearized polynomials.

    ``points`` default to the canonical basis 1, x, ..., x^(N-1); any
    F_q-independent set works and m >= N is required so that N independent
    points exist.
    """

    def __init__(self, tower: FieldTower, length, dim, points=None):
        if dim < 1 or length < dim:
            raise ValueError("need 1 <= K <= N")
        if tower.m < length:
            raise ValueError(f"extension degree {tower.m} < code length {length}")
        self.tower = tower
        self.N = int(length)
        self.K = int(dim)
        if points is None:
            points = tower.basis_points(self.N)
        self.points = _coords(tower, points)
        if self.points.shape[0] != self.N:
            raise LengthMismatch("point count != N")
        if tower.point_rank(self.points) != self.N:
            raise ValueError("evaluation points are not F_q-independent")
        self._enc_powers = None

    @property
    def min_rank_distance(self):
        return self.N - self.K + 1

    def _encoder_tensor(self):
        if self._enc_powers is None:
            self._enc_powers = moore_matrix(self.tower, self.points, self.K)
        return self._enc_powers

    def encode(self, message):
        """(K, m) message -> (N, m) codeword of evaluations."""
        t = self.tower
        msg = _coords(t, message)
        if msg.shape[0] != self.K:
            raise LengthMismatch(f"message length {msg.shape[0]} != K={self.K}")
        powers = self._encoder_tensor()  # (N, K, m)
        return t.mul(powers, msg[None, :, :]).sum(axis=1) % t.q

    def decode_erasures(self, points, values):
        """Recover the message from surviving (point, value) pairs.

        The points need not be code points; any pairs that evaluate one
        codeword's polynomial work. Uses the first K F_q-independent
        points in input order, then checks every remaining pair against
        the decoded polynomial (erasure-only: mismatches raise, they are
        not corrected).
        """
        t = self.tower
        pts = _coords(t, points)
        vals = _coords(t, values)
        if pts.shape[0] != vals.shape[0]:
            raise LengthMismatch("points/values count mismatch")
        chosen = t.independent_prefix(pts, need=self.K)
        if len(chosen) < self.K:
            raise RankDeficient(t.point_rank(pts), self.K)
        msg = interpolate(t, pts[chosen], vals[chosen])
        rest = np.setdiff1d(np.arange(pts.shape[0]), chosen)
        if rest.size:
            poly = LinearizedPoly(t, msg)
            re_vals = poly.evaluate_many(pts[rest])
            if (re_vals != vals[rest]).any():
                raise EvaluationMismatch(
                    "redundant evaluations disagree with decoded polynomial"
                )
        return msg
