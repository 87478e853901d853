import numpy as np
import pytest

from slrc.errors import DivideByZero, NotPrime, Reducible
from slrc.fields import ExtElem, FieldTower, get_tower


def test_tower_q5_m2_explicit_modulus():
    t = FieldTower(5, 2, modulus=[2, 0, 1])  # x^2 + 2, 3 is a non-residue mod 5
    assert t.modulus == (2, 0, 1)


def test_tower_rejects_reducible_modulus():
    with pytest.raises(Reducible):
        FieldTower(5, 2, modulus=[4, 0, 1])  # x^2 - 1 = (x-1)(x+1)


def test_tower_rejects_non_prime():
    with pytest.raises(NotPrime):
        FieldTower(4, 2)


def test_tower_rejects_large_q():
    with pytest.raises(NotPrime):
        FieldTower(257, 1)


def test_default_modulus_is_deterministic_smallest():
    # first irreducible tails in base-q integer order
    assert FieldTower(5, 2).modulus == (2, 0, 1)
    assert FieldTower(2, 2).modulus == (1, 1, 1)
    assert get_tower(5, 2).modulus == (2, 0, 1)
    assert get_tower(5, 2) is get_tower(5, 2)


def test_mul_identity():
    t = get_tower(5, 2)
    rng = np.random.default_rng(0)
    a = t.random_elements(rng, (50,))
    one = np.zeros((1, 2), dtype=np.int64)
    one[0, 0] = 1
    assert (t.mul(a, one) == a).all()


def test_x_squared_in_f25():
    t = FieldTower(5, 2, modulus=[2, 0, 1])
    x = t.element([0, 1])
    assert (x * x).coeffs == (3, 0)


def test_pow_q_fixes_base_field():
    t = get_tower(5, 3)
    for c in range(5):
        e = t.element(c)
        assert e.pow_q() == e


def test_distributivity_seeded():
    t = get_tower(7, 4)
    rng = np.random.default_rng(7)
    a = t.random_elements(rng, (1000,))
    b = t.random_elements(rng, (1000,))
    c = t.random_elements(rng, (1000,))
    lhs = t.mul(t.add(a, b), c)
    rhs = t.add(t.mul(a, c), t.mul(b, c))
    assert (lhs == rhs).all()


@pytest.mark.parametrize("q,m", [(2, 2), (3, 2), (2, 4), (5, 2), (5, 4)])
def test_inverse_exhaustive_small_fields(q, m):
    t = get_tower(q, m)
    elems = np.array(
        [[(v // q**i) % q for i in range(m)] for v in range(1, q**m)], dtype=np.int64
    )
    prod = t.mul(elems, t.inv(elems))
    expect = np.zeros_like(prod)
    expect[:, 0] = 1
    assert (prod == expect).all()


@pytest.mark.parametrize("q,m", [(2, 3), (3, 2), (5, 2)])
def test_frobenius_m_times_is_identity_exhaustive(q, m):
    t = get_tower(q, m)
    elems = np.array(
        [[(v // q**i) % q for i in range(m)] for v in range(q**m)], dtype=np.int64
    )
    cur = elems
    for _ in range(m):
        cur = t.frobenius(cur)
    assert (cur == elems).all()


def test_frobenius_is_additive():
    t = get_tower(5, 6)
    rng = np.random.default_rng(1)
    a = t.random_elements(rng, (200,))
    b = t.random_elements(rng, (200,))
    assert (t.frobenius(t.add(a, b)) == t.add(t.frobenius(a), t.frobenius(b))).all()


def test_rank_identity_extension_level():
    t = get_tower(5, 3)
    ident = np.zeros((3, 3, 3), dtype=np.int64)
    for i in range(3):
        ident[i, i, 0] = 1
    assert t.rank_ext(ident) == 3
    assert t.rank(ident, level="base") == 3 * t.m


def test_rank_proportional_rows():
    t = get_tower(5, 4)
    rng = np.random.default_rng(3)
    y = t.random_elements(rng, (1,))[0]
    two_y = t.mul(y, t.element(2).array)
    mat = np.stack([y, two_y])[:, None, :]  # 2 x 1 extension matrix
    # base level: both rows generate the same m-dimensional F_q space
    assert t.rank(mat, level="base") == t.m
    # extension level: scalar multiples collapse
    lam = t.element([0, 1, 0, 0]).array  # x, not in F_q
    lam_y = t.mul(y, lam)
    mat2 = np.stack([y, lam_y])[:, None, :]
    assert t.rank(mat2, level="extension") == 1


def test_point_rank_units():
    t = get_tower(5, 6)
    pts = t.basis_points(4)
    assert t.point_rank(pts) == 4
    # duplicated rows do not add rank
    assert t.point_rank(np.vstack([pts, pts])) == 4


def test_independent_prefix_order():
    t = get_tower(5, 4)
    pts = np.array(
        [[1, 0, 0, 0], [2, 0, 0, 0], [0, 1, 0, 0], [1, 1, 0, 0], [0, 0, 3, 0]],
        dtype=np.int64,
    )
    assert t.independent_prefix(pts) == [0, 2, 4]
    assert t.independent_prefix(pts, need=2) == [0, 2]


def test_scalar_inverse_of_zero_raises():
    t = get_tower(5, 2)
    with pytest.raises(DivideByZero):
        t.scalar_inv(np.zeros(2, dtype=np.int64))


def test_solve_ext_round_trip():
    t = get_tower(5, 5)
    rng = np.random.default_rng(11)
    while True:
        A = t.random_elements(rng, (4, 4))
        if t.rank_ext(A) == 4:
            break
    x = t.random_elements(rng, (4,))
    b = t.mul(A, x[None, :, :]).sum(axis=1) % t.q
    assert (t.solve_ext(A, b) == x).all()


def test_elem_serialization_round_trip():
    t = get_tower(5, 3)
    rng = np.random.default_rng(5)
    for coeffs in t.random_elements(rng, (20,)):
        raw = t.elem_to_bytes(coeffs)
        assert len(raw) == t.m
        assert (t.elem_from_bytes(raw) == coeffs).all()


def test_ext_elem_operators():
    t = get_tower(5, 2)
    a = t.element([1, 2])
    b = t.element([3, 4])
    assert (a + b).coeffs == (4, 1)
    assert (a - b).coeffs == (3, 3)
    assert (-a).coeffs == (4, 3)
    assert a * a.inv() == t.one()
    assert a / a == t.one()
    with pytest.raises(ValueError):
        a + get_tower(7, 2).element([1, 2])
