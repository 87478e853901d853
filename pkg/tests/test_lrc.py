import itertools

import numpy as np
import pytest

from slrc.errors import (
    InsufficientSurvivors,
    LengthMismatch,
    ModeUnsupported,
    RankDeficient,
    TooLarge,
    UnsupportedShape,
)
from slrc.fields import get_tower
from slrc.linearized import LinearizedPoly
from slrc.lrc import (
    build_lrc,
    decode_from_nodes,
    global_decode,
    local_repair,
    measure_dmin,
)


@pytest.fixture(scope="module")
def fig6_spec():
    # scalar layout: two groups of 4 data + 1 parity, one short group 3 + 1
    return build_lrc(14, 4, 2, 1, 9, 5)


@pytest.fixture(scope="module")
def vector_spec():
    return build_lrc(15, 3, 3, 4, 28, 5)


@pytest.fixture(scope="module")
def fig6_encoded(fig6_spec):
    rng = np.random.default_rng(100)
    msg = fig6_spec.tower.random_elements(rng, 9)
    return msg, fig6_spec.encode(msg)


@pytest.fixture(scope="module")
def vector_encoded(vector_spec):
    rng = np.random.default_rng(200)
    msg = vector_spec.tower.random_elements(rng, 28)
    return msg, vector_spec.encode(msg)


def test_build_scalar_remainder_case(fig6_spec):
    s = fig6_spec
    assert (s.case, s.beta0, s.N, s.g) == ("remainder", 3, 11, 3)
    assert s.tower.m == 11
    assert [g.size for g in s.groups] == [5, 5, 4]
    assert [g.data_count for g in s.groups] == [4, 4, 3]
    assert not s.warnings


def test_build_vector_divides_case(vector_spec):
    s = vector_spec
    assert (s.case, s.N, s.g) == ("divides", 36, 3)
    assert s.tower.m == 36


def test_case_arithmetic_boundaries():
    # 13 mod 5 = 3 -> short width 2, fine; 11 mod 5 = 1 <= delta-1 -> unsupported
    spec = build_lrc(13, 4, 2, 1, 9, 5)
    assert spec.beta0 == 2
    with pytest.raises(UnsupportedShape):
        build_lrc(11, 4, 2, 1, 9, 5)


def test_message_length_validation(fig6_spec):
    with pytest.raises(LengthMismatch):
        fig6_spec.encode(np.zeros((8, 11), dtype=np.int64))
    with pytest.raises(LengthMismatch):
        build_lrc(14, 4, 2, 1, 12, 5)  # M > N


def test_optimality_warning_surfaces():
    # ceil(M/alpha) mod r = 0 misses the side condition in the short layout
    spec = build_lrc(14, 4, 2, 1, 8, 5)
    assert spec.warnings


def test_zero_message_encodes_to_zero(fig6_spec):
    msg = np.zeros((9, 11), dtype=np.int64)
    shards = fig6_spec.encode(msg)
    assert (shards.values == 0).all()


def test_every_symbol_is_a_tracked_evaluation(fig6_encoded, fig6_spec):
    msg, shards = fig6_encoded
    poly = LinearizedPoly(fig6_spec.tower, msg)
    for node in range(fig6_spec.n):
        evals = poly.evaluate_many(shards.points[node])
        assert (evals == shards.values[node]).all()


def test_group_point_rank_law_fig6(fig6_spec):
    # s_i nodes of a group span min(s_i, data_count)*alpha independent points
    t = fig6_spec.tower
    for grp in fig6_spec.groups:
        for s in range(1, grp.size + 1):
            for subset in itertools.combinations(grp.nodes, s):
                pts = np.concatenate([fig6_spec.node_points(i) for i in subset])
                assert t.point_rank(pts) == min(s, grp.data_count) * fig6_spec.alpha


def test_group_point_rank_law_vector_subsets(vector_spec):
    t = vector_spec.tower
    rng = np.random.default_rng(4)
    for s in range(1, 7):
        for _ in range(25):
            subset = rng.permutation(15)[:s]
            per_group = {}
            for i in subset:
                per_group.setdefault(int(vector_spec.node_group[i]), []).append(i)
            expect = sum(min(len(v), 3) * 4 for v in per_group.values())
            pts = np.concatenate([vector_spec.node_points(i) for i in subset])
            assert t.point_rank(pts) == expect


def test_measured_dmin_fig6(fig6_spec):
    assert measure_dmin(fig6_spec) == 4


def test_measured_dmin_vector(vector_spec):
    assert measure_dmin(vector_spec) == 5


def test_measure_dmin_replication_toy():
    class Toy:
        n = 5
        message_len = 1
        tower = get_tower(5, 3)

        def node_points(self, i):
            return self.tower.basis_points(1)

    assert measure_dmin(Toy()) == 5


def test_measure_dmin_guard():
    spec = build_lrc(14, 4, 2, 1, 9, 5)
    with pytest.raises(TooLarge):
        measure_dmin(spec, max_patterns=10)


def test_locality_every_node_repairable_after_delta_minus_1_group_erasures(vector_spec, vector_encoded):
    # delta = 3: any 2 in-group erasures leave every lost block rebuildable
    msg, shards = vector_encoded
    for grp in vector_spec.groups:
        for erased in itertools.combinations(grp.nodes, vector_spec.delta - 1):
            sh = shards.copy()
            sh.erase(erased)
            for node in erased:
                block, _ = local_repair(vector_spec, sh, node)
                assert (block == shards.values[node]).all()


def test_naive_repair_transcript_sizes(vector_spec, vector_encoded, fig6_spec, fig6_encoded):
    _, vshards = vector_encoded
    block, tr = local_repair(vector_spec, vshards, 0)
    assert tr.downloaded == 3 * 4  # r blocks of alpha symbols
    _, fshards = fig6_encoded
    short_node = fig6_spec.groups[-1].nodes[0]
    _, tr2 = local_repair(fig6_spec, fshards, short_node)
    assert tr2.downloaded == 3  # short group downloads beta0 blocks


def test_repair_exact_all_nodes_all_modes(fig6_spec, fig6_encoded):
    msg, shards = fig6_encoded
    for node in range(fig6_spec.n):
        sh = shards.copy()
        sh.erase([node])
        block, _ = local_repair(fig6_spec, sh, node)
        assert (block == shards.values[node]).all()


def test_repair_insufficient_survivors(fig6_spec, fig6_encoded):
    msg, shards = fig6_encoded
    grp = fig6_spec.groups[0]
    sh = shards.copy()
    sh.erase(grp.nodes[:2])
    with pytest.raises(InsufficientSurvivors):
        local_repair(fig6_spec, sh, grp.nodes[0])


def test_bw_mode_rejected_on_mds_inner(vector_spec, vector_encoded):
    _, shards = vector_encoded
    with pytest.raises(ModeUnsupported):
        local_repair(vector_spec, shards, 0, mode="bandwidth_efficient")


def test_global_decode_erasure_budget_fig6(fig6_spec, fig6_encoded):
    msg, shards = fig6_encoded
    rng = np.random.default_rng(8)
    for _ in range(40):
        erased = rng.permutation(14)[:3]
        sh = shards.copy()
        sh.erase(erased)
        assert (global_decode(fig6_spec, sh) == msg).all()


def test_global_decode_witness_failure_beyond_budget(fig6_spec, fig6_encoded):
    # a full group plus another parity exceeds the rank-erasure budget
    msg, shards = fig6_encoded
    sh = shards.copy()
    sh.erase(fig6_spec.groups[0].nodes)  # 5 nodes: 4*alpha rank gone
    with pytest.raises(RankDeficient):
        global_decode(fig6_spec, sh)


def test_decode_from_specific_nodes(fig6_spec, fig6_encoded):
    msg, shards = fig6_encoded
    nodes = [0, 1, 2, 3, 5, 6, 7, 8, 10, 11, 12]
    assert (decode_from_nodes(fig6_spec, shards, nodes) == msg).all()


# ---------------------------------------------------------------------------
# zigzag-inner (bandwidth-efficient) variants
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def msr_lrc_spec():
    return build_lrc(15, 3, 3, 4, 28, 7, inner="msr")


@pytest.fixture(scope="module")
def msr_lrc_encoded(msr_lrc_spec):
    rng = np.random.default_rng(300)
    msg = msr_lrc_spec.tower.random_elements(rng, 28)
    return msg, msr_lrc_spec.encode(msg)


def test_msr_lrc_shape(msr_lrc_spec):
    s = msr_lrc_spec
    assert s.groups[0].inner.family == "reduced"
    assert s.groups[0].inner.beta == 2
    assert measure_dmin(s) == 5


def test_msr_lrc_bw_repair_transcripts(msr_lrc_spec, msr_lrc_encoded):
    msg, shards = msr_lrc_encoded
    for node in range(15):
        sh = shards.copy()
        sh.erase([node])
        block, tr = local_repair(msr_lrc_spec, sh, node, mode="bandwidth_efficient")
        assert (block == shards.values[node]).all()
        if msr_lrc_spec.node_pos[node] < 3:
            assert tr.downloaded == 4 * 2  # d * beta
        else:
            assert tr.downloaded == 3 * 4  # naive parity fallback


def test_msr_lrc_standard_family_alpha8():
    spec = build_lrc(15, 3, 3, 8, 72, 7, inner="msr")
    assert spec.groups[0].inner.family == "standard"
    assert spec.N == 72


def test_msr_lrc_file_size_identity(msr_lrc_spec):
    # M = mu*r*alpha + min(h, r)*alpha with mu, h from the measured distance
    s = msr_lrc_spec
    d = measure_dmin(s)
    contact = s.n - d + 1
    mu, h = divmod(contact, s.r + s.delta - 1)
    assert s.m_file == (mu * s.r + min(h, s.r)) * s.alpha


def test_msr_lrc_alpha_validation():
    with pytest.raises(UnsupportedShape):
        build_lrc(15, 3, 3, 6, 28, 7, inner="msr")
    with pytest.raises(UnsupportedShape):
        build_lrc(14, 4, 2, 1, 9, 5, inner="msr")  # remainder layout
