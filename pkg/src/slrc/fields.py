"""Exact arithmetic over F_q (q prime) and the extension F_{q^m}.

Extension elements are coordinate vectors in the polynomial basis
``1, x, ..., x^{m-1}`` modulo a monic irreducible modulus. Throughout the
package they travel as numpy int64 arrays whose last axis has length m,
so every operation here accepts arbitrary leading batch dimensions. The
scalar wrapper :class:`ExtElem` is a convenience for element-at-a-time
work and tests.

Three rank notions coexist and are deliberately kept distinct:

* ``point_rank(points)``: rank over F_q of the coordinate matrix of a set
  of extension elements ("how many F_q-independent values"). This is the
  rank every code construction and the leakage counter cares about.
* ``rank_ext(mat)``: rank of a matrix with F_{q^m} entries, by Gaussian
  elimination over the extension field.
* ``rank(mat, level="base")``: restriction-of-scalars rank of an
  extension matrix, i.e. rank over F_q after expanding each extension row
  into the m base rows obtained by multiplying it with 1, x, ..., x^{m-1}.
  Equals m times ``rank_ext`` and makes proportional-by-extension-scalar
  rows collapse only at extension level.

No floating point is used anywhere; intermediate int64 products are
bounded because q < 256 is enforced.
"""

from __future__ import annotations

import functools

import numpy as np

from .errors import DivideByZero, NotPrime, Reducible

__all__ = ["FieldTower", "ExtElem", "get_tower", "is_prime"]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


# ---------------------------------------------------------------------------
# Polynomial helpers over F_q. Coefficient vectors are little-endian
# (index i = coefficient of x^i) python lists of ints, trimmed.
# ---------------------------------------------------------------------------


def _trim(p):
    i = len(p)
    while i > 0 and p[i - 1] == 0:
        i -= 1
    return p[:i]


def _poly_mod(a, mod, q):
    a = list(a)
    dm = len(mod) - 1
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i] % q
        if c:
            for j in range(dm + 1):
                a[i - dm + j] = (a[i - dm + j] - c * mod[j]) % q
    return _trim([c % q for c in a[:dm]])


def _poly_mulmod(a, b, mod, q):
    if not a or not b:
        return []
    prod = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                prod[i + j] = (prod[i + j] + ca * cb) % q
    return _poly_mod(prod, mod, q)


def _poly_gcd(a, b, q):
    a, b = _trim([c % q for c in a]), _trim([c % q for c in b])
    while b:
        inv_lead = pow(b[-1], q - 2, q)
        r = list(a)
        while len(r) >= len(b):
            c = r[-1] * inv_lead % q
            if c:
                off = len(r) - len(b)
                for j in range(len(b)):
                    r[off + j] = (r[off + j] - c * b[j]) % q
            r.pop()
            r = _trim(r)
        a, b = b, r
    return a


def _compose_mod(f, s, mod, q):
    """f(s(x)) mod ``mod`` by Horner's rule."""
    acc = []
    for c in reversed(f):
        acc = _poly_mulmod(acc, s, mod, q)
        if c:
            if not acc:
                acc = [c % q]
            else:
                acc[0] = (acc[0] + c) % q
        acc = _trim(acc)
    return acc


def _x_power_q(mod, q):
    """x^q mod ``mod`` by square and multiply."""
    result = [1]
    base = [0, 1]
    e = q
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, mod, q)
        base = _poly_mulmod(base, base, mod, q)
        e >>= 1
    return result


def _gcd_t_minus_x(t, mod, q):
    tm = list(t) + [0] * max(0, 2 - len(t))
    tm[1] = (tm[1] - 1) % q
    return _poly_gcd(tm, mod, q)


def _is_irreducible(mod, q):
    """Degree-m monic ``mod`` has no factor of degree <= m/2.

    Uses gcd(x^{q^i} - x, mod) == 1 for 1 <= i <= m/2; x^{q^i} is computed
    incrementally by composing with x^q mod ``mod``.
    """
    m = len(mod) - 1
    if m == 1:
        return True
    xq = _x_power_q(mod, q)
    t = xq
    for _ in range(m // 2):
        if len(_gcd_t_minus_x(t, mod, q)) > 1:
            return False
        t = _compose_mod(t, xq, mod, q)
    return True


def _default_modulus(q, m):
    """Smallest monic irreducible of degree m, ordering tails as base-q
    integers with the constant term least significant."""
    for tail in range(q**m):
        digits = []
        v = tail
        for _ in range(m):
            digits.append(v % q)
            v //= q
        mod = digits + [1]
        if _is_irreducible(mod, q):
            return tuple(mod)
    raise Reducible(f"no irreducible polynomial of degree {m} over F_{q}")  # pragma: no cover


class ExtElem:
    """A single element of a :class:`FieldTower`, immutable.

    Supports +, -, *, /, unary -, ``inv()`` and ``pow_q()`` (Frobenius).
    """

    __slots__ = ("tower", "coeffs")

    def __init__(self, tower, coeffs):
        coeffs = tuple(int(c) % tower.q for c in coeffs)
        if len(coeffs) != tower.m:
            raise ValueError(f"need {tower.m} coordinates, got {len(coeffs)}")
        object.__setattr__(self, "tower", tower)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, *a):  # immutability guard
        raise AttributeError("ExtElem is immutable")

    # -- helpers -----------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, ExtElem):
            raise TypeError(f"cannot combine ExtElem with {type(other).__name__}")
        if other.tower != self.tower:
            raise ValueError("elements belong to different towers")

    @property
    def array(self):
        return np.array(self.coeffs, dtype=np.int64)

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        self._check(other)
        return ExtElem(self.tower, self.tower.add(self.array, other.array))

    def __sub__(self, other):
        self._check(other)
        return ExtElem(self.tower, self.tower.sub(self.array, other.array))

    def __neg__(self):
        return ExtElem(self.tower, self.tower.neg(self.array))

    def __mul__(self, other):
        self._check(other)
        return ExtElem(self.tower, self.tower.mul(self.array, other.array))

    def __truediv__(self, other):
        self._check(other)
        return self * other.inv()

    def inv(self):
        return ExtElem(self.tower, self.tower.scalar_inv(self.array))

    def pow_q(self, times=1):
        return ExtElem(self.tower, self.tower.frobenius(self.array, times))

    # -- protocol ----------------------------------------------------------
    def __eq__(self, other):
        return (
            isinstance(other, ExtElem)
            and self.tower == other.tower
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.tower, self.coeffs))

    def __repr__(self):
        return f"ExtElem{self.coeffs}"


class FieldTower:
    """F_q inside F_{q^m} with an explicit monic irreducible modulus.

    Immutable after construction and safe to share; all operations are
    pure functions of their inputs.
    """

    def __init__(self, q, m, modulus=None):
        q, m = int(q), int(m)
        if not is_prime(q):
            raise NotPrime(f"base field order {q} is not prime")
        if not 2 <= q < 256:
            # one base-q digit per byte in the wire format
            raise NotPrime(f"base field order must be a prime below 256, got {q}")
        if m < 1:
            raise ValueError("extension degree must be >= 1")
        if modulus is None:
            modulus = _default_modulus(q, m)
        else:
            modulus = tuple(int(c) % q for c in modulus)
            if len(modulus) != m + 1 or modulus[-1] != 1:
                raise ValueError("modulus must be monic of degree m")
            if not _is_irreducible(list(modulus), q):
                raise Reducible(f"modulus {modulus} is reducible over F_{q}")
        self.q = q
        self.m = m
        self.modulus = modulus
        self._inv_q = np.array([0] + [pow(i, q - 2, q) for i in range(1, q)], dtype=np.int64)
        self._red = self._reduction_matrix()
        self._frob_cache = {1: self._frobenius_matrix()}

    # -- construction helpers ----------------------------------------------
    def _reduction_matrix(self):
        """(2m-1) x m matrix: row i = coordinates of x^i mod modulus."""
        q, m = self.q, self.m
        red = np.zeros((2 * m - 1, m), dtype=np.int64)
        cur = [0] * m
        cur[0] = 1
        for i in range(2 * m - 1):
            red[i] = cur
            # multiply by x, reduce
            carry = cur[-1]
            cur = [0] + cur[:-1]
            if carry:
                for j in range(m):
                    cur[j] = (cur[j] - carry * self.modulus[j]) % q
        return red

    def _frobenius_matrix(self):
        """m x m matrix F with coords(a^q) = coords(a) @ F (mod q)."""
        q, m = self.q, self.m
        mod = list(self.modulus)
        xq = _x_power_q(mod, q)
        F = np.zeros((m, m), dtype=np.int64)
        cur = [1]  # x^{0*q}
        for i in range(m):
            row = cur + [0] * (m - len(cur))
            F[i] = row[:m]
            cur = _poly_mulmod(cur, xq, mod, q)
        return F

    def frob_matrix(self, times=1):
        times = times % self.m
        if times == 0:
            return np.eye(self.m, dtype=np.int64)
        if times not in self._frob_cache:
            F = self._frob_cache[1]
            acc = F
            for _ in range(times - 1):
                acc = acc @ F % self.q
            self._frob_cache[times] = acc
        return self._frob_cache[times]

    # -- element constructors ------------------------------------------------
    def element(self, coeffs):
        if isinstance(coeffs, ExtElem):
            if coeffs.tower != self:
                raise ValueError("element belongs to a different tower")
            return coeffs
        if isinstance(coeffs, (int, np.integer)):
            coeffs = [coeffs] + [0] * (self.m - 1)
        return ExtElem(self, coeffs)

    def zero(self):
        return ExtElem(self, [0] * self.m)

    def one(self):
        return ExtElem(self, [1] + [0] * (self.m - 1))

    def gen(self):
        """The basis element x (equals 0 for m = 1 towers)."""
        c = [0] * self.m
        if self.m > 1:
            c[1] = 1
        return ExtElem(self, c)

    def basis_points(self, count):
        """Coordinate rows of 1, x, ..., x^{count-1}; the canonical
        F_q-independent evaluation points."""
        if count > self.m:
            raise ValueError(f"only {self.m} basis elements available, asked {count}")
        pts = np.zeros((count, self.m), dtype=np.int64)
        for i in range(count):
            pts[i, i] = 1
        return pts

    def random_elements(self, rng, shape):
        if isinstance(shape, int):
            shape = (shape,)
        return rng.integers(0, self.q, size=tuple(shape) + (self.m,), dtype=np.int64)

    # -- vectorized arithmetic (coordinate arrays, last axis length m) -------
    def add(self, a, b):
        return (np.asarray(a) + np.asarray(b)) % self.q

    def sub(self, a, b):
        return (np.asarray(a) - np.asarray(b)) % self.q

    def neg(self, a):
        return (-np.asarray(a)) % self.q

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        m = self.m
        if m == 1:
            return a * b % self.q
        shape = np.broadcast_shapes(a.shape, b.shape)
        a = np.broadcast_to(a, shape)
        b = np.broadcast_to(b, shape)
        z = np.zeros(shape[:-1] + (2 * m - 1,), dtype=np.int64)
        for i in range(m):
            z[..., i : i + m] += a[..., i : i + 1] * b
        return z @ self._red % self.q

    def scalar_inv(self, a):
        """Inverse of one element by extended Euclid on polynomials."""
        a = [int(c) % self.q for c in np.asarray(a).reshape(-1)]
        if not any(a):
            raise DivideByZero("zero has no inverse")
        q = self.q
        # extended euclid: r0 = modulus, r1 = a
        r0, r1 = list(self.modulus), _trim(a)
        s0, s1 = [], [1]
        while r1:
            # divmod r0 by r1
            r0 = list(r0)
            quo = [0] * max(1, len(r0) - len(r1) + 1)
            inv_lead = pow(r1[-1], q - 2, q)
            while len(r0) >= len(r1) and any(r0):
                if r0[-1] == 0:
                    r0.pop()
                    continue
                c = r0[-1] * inv_lead % q
                off = len(r0) - len(r1)
                quo[off] = c
                for j in range(len(r1)):
                    r0[off + j] = (r0[off + j] - c * r1[j]) % q
                r0 = _trim(r0)
            rem = _trim(r0)
            # s_new = s0 - quo * s1
            prod = [0] * (len(quo) + len(s1) - 1) if s1 else []
            for i, cq in enumerate(quo):
                if cq:
                    for j, cs in enumerate(s1):
                        prod[i + j] = (prod[i + j] + cq * cs) % q
            s_new = [0] * max(len(s0), len(prod))
            for i, c in enumerate(s0):
                s_new[i] = c
            for i, c in enumerate(prod):
                s_new[i] = (s_new[i] - c) % q
            r0, r1 = r1, rem
            s0, s1 = s1, _trim(s_new)
        # r0 = gcd (a constant, nonzero since modulus irreducible)
        scale = pow(r0[0], q - 2, q)
        out = np.zeros(self.m, dtype=np.int64)
        for i, c in enumerate(s0):
            out[i] = c * scale % q
        return out

    def inv(self, a):
        """Elementwise inverse of a batch of elements."""
        a = np.asarray(a, dtype=np.int64)
        if a.ndim == 1:
            return self.scalar_inv(a)
        flat = a.reshape(-1, self.m)
        out = np.empty_like(flat)
        for i in range(flat.shape[0]):
            out[i] = self.scalar_inv(flat[i])
        return out.reshape(a.shape)

    def frobenius(self, a, times=1):
        """a -> a^(q^times); F_q-linear, fixes F_q pointwise."""
        a = np.asarray(a, dtype=np.int64)
        return a @ self.frob_matrix(times) % self.q

    def pow_q(self, a, times=1):
        return self.frobenius(a, times)

    # -- rank and elimination -------------------------------------------------
    def rank_base(self, mat):
        """Rank over F_q of an integer matrix."""
        A = np.array(mat, dtype=np.int64) % self.q
        if A.ndim != 2:
            raise ValueError("rank_base needs a 2-d matrix")
        rows, cols = A.shape
        r = 0
        for c in range(cols):
            if r == rows:
                break
            piv = np.nonzero(A[r:, c])[0]
            if piv.size == 0:
                continue
            p = r + piv[0]
            if p != r:
                A[[r, p]] = A[[p, r]]
            A[r] = A[r] * self._inv_q[A[r, c]] % self.q
            below = np.nonzero(A[r + 1 :, c])[0] + r + 1
            if below.size:
                A[below] = (A[below] - np.outer(A[below, c], A[r])) % self.q
            r += 1
        return r

    def point_rank(self, points):
        """Rank over F_q of a set of extension elements' coordinates."""
        pts = np.asarray(points, dtype=np.int64)
        if pts.ndim == 1:
            pts = pts[None, :]
        return self.rank_base(pts.reshape(-1, self.m))

    def independent_prefix(self, points, need=None):
        """Indices of the first rows forming an F_q-independent set,
        scanning in input order; stops after ``need`` rows if given."""
        pts = np.asarray(points, dtype=np.int64) % self.q
        basis = np.zeros((0, self.m), dtype=np.int64)
        pivots = []
        chosen = []
        for idx in range(pts.shape[0]):
            v = pts[idx].copy()
            for brow, bp in zip(basis, pivots):
                if v[bp]:
                    v = (v - v[bp] * brow) % self.q
            nz = np.nonzero(v)[0]
            if nz.size == 0:
                continue
            p = nz[0]
            v = v * self._inv_q[v[p]] % self.q
            basis = np.vstack([basis, v])
            pivots.append(p)
            chosen.append(idx)
            if need is not None and len(chosen) == need:
                break
        return chosen

    def rank_ext(self, mat):
        """Rank of a matrix over F_{q^m}; mat has shape (R, C, m)."""
        A = np.array(mat, dtype=np.int64) % self.q
        if A.ndim == 2:  # single column of elements
            A = A[:, None, :]
        rows, cols = A.shape[0], A.shape[1]
        r = 0
        for c in range(cols):
            if r == rows:
                break
            nz = np.nonzero(A[r:, c].any(axis=-1))[0]
            if nz.size == 0:
                continue
            p = r + nz[0]
            if p != r:
                A[[r, p]] = A[[p, r]]
            A[r] = self.mul(A[r], self.scalar_inv(A[r, c]))
            below = np.nonzero(A[r + 1 :, c].any(axis=-1))[0] + r + 1
            if below.size:
                A[below] = (A[below] - self.mul(A[below, c][:, None, :], A[r][None, :, :])) % self.q
            r += 1
        return r

    def rank(self, mat, level="base"):
        """Rank of an extension matrix at either field level.

        level="extension": elimination over F_{q^m}.
        level="base": restriction of scalars; each extension row expands
        into the m base rows x^t * row (entries flattened to coordinates).
        """
        A = np.asarray(mat, dtype=np.int64) % self.q
        if A.ndim == 2:
            A = A[:, None, :]
        if level == "extension":
            return self.rank_ext(A)
        if level != "base":
            raise ValueError(f"unknown level {level!r}")
        rows, cols, m = A.shape
        expanded = np.zeros((rows * m, cols * m), dtype=np.int64)
        for t in range(m):
            if t == 0:
                xt_rows = A
            else:
                xt = np.zeros(m, dtype=np.int64)
                xt[t] = 1
                xt_rows = self.mul(A, xt)
            expanded[t::m] = xt_rows.reshape(rows, cols * m)
        return self.rank_base(expanded)

    def solve_base(self, A, B):
        """Solve A X = B over F_q where A is an integer matrix.

        A: (rows, cols); B: (rows, ...) with matching first axis (trailing
        axes are carried through, e.g. extension coordinates). Requires A
        to have full column rank and the system to be consistent; raises
        RankDeficient / EvaluationMismatch otherwise.
        """
        from .errors import EvaluationMismatch, RankDeficient

        A = np.array(A, dtype=np.int64) % self.q
        B = np.array(B, dtype=np.int64) % self.q
        rows, cols = A.shape
        trailing = B.shape[1:]
        B = B.reshape(rows, -1)
        aug = np.concatenate([A, B], axis=1)
        piv_rows = []
        r = 0
        for c in range(cols):
            nz = np.nonzero(aug[r:, c])[0]
            if nz.size == 0:
                raise RankDeficient(r, cols)
            p = r + nz[0]
            if p != r:
                aug[[r, p]] = aug[[p, r]]
            aug[r] = aug[r] * self._inv_q[aug[r, c]] % self.q
            others = np.nonzero(aug[:, c])[0]
            others = others[others != r]
            if others.size:
                aug[others] = (aug[others] - np.outer(aug[others, c], aug[r])) % self.q
            piv_rows.append(r)
            r += 1
        if r < rows and aug[r:, cols:].any():
            raise EvaluationMismatch("inconsistent linear system")
        X = aug[piv_rows, cols:]
        return X.reshape((cols,) + trailing)

    def solve_ext(self, A, b):
        """Solve the square system A x = b over F_{q^m} by Gauss-Jordan.

        A: (n, n, m), b: (n, m) or (n, w, m). Raises RankDeficient when A
        is singular. This is the direct-elimination reference path; the
        decoder in ``linearized`` uses interpolation and is cross-checked
        against this.
        """
        from .errors import RankDeficient

        A = np.array(A, dtype=np.int64) % self.q
        b = np.array(b, dtype=np.int64) % self.q
        n = A.shape[0]
        squeeze = b.ndim == 2
        if squeeze:
            b = b[:, None, :]
        aug = np.concatenate([A, b], axis=1)
        for c in range(n):
            nz = np.nonzero(aug[c:, c].any(axis=-1))[0]
            if nz.size == 0:
                raise RankDeficient(c, n)
            p = c + nz[0]
            if p != c:
                aug[[c, p]] = aug[[p, c]]
            aug[c] = self.mul(aug[c], self.scalar_inv(aug[c, c]))
            others = np.nonzero(aug[:, c].any(axis=-1))[0]
            others = others[others != c]
            if others.size:
                aug[others] = (aug[others] - self.mul(aug[others, c][:, None, :], aug[c][None, :, :])) % self.q
        x = aug[:, n:]
        return x[:, 0, :] if squeeze else x

    # -- serialization ----------------------------------------------------------
    def elem_to_bytes(self, coeffs):
        """m bytes, little-endian digit order, one base-q digit per byte."""
        a = np.asarray(coeffs, dtype=np.int64).reshape(-1) % self.q
        if a.shape[0] != self.m:
            raise ValueError("wrong coordinate count")
        return bytes(int(c) for c in a)

    def elem_from_bytes(self, raw):
        if len(raw) != self.m:
            raise ValueError(f"need {self.m} bytes, got {len(raw)}")
        a = np.frombuffer(bytes(raw), dtype=np.uint8).astype(np.int64)
        if (a >= self.q).any():
            raise ValueError("digit out of range for base field")
        return a

    # -- protocol ----------------------------------------------------------------
    def __eq__(self, other):
        return (
            isinstance(other, FieldTower)
            and self.q == other.q
            and self.m == other.m
            and self.modulus == other.modulus
        )

    def __hash__(self):
        return hash((self.q, self.m, self.modulus))

    def __repr__(self):
        return f"FieldTower(q={self.q}, m={self.m})"


@functools.lru_cache(maxsize=64)
def get_tower(q, m, modulus=None):
    """Cached tower constructor; modulus as a tuple or None for default."""
    return FieldTower(q, m, modulus)
