import gzip
import io
from itertools import combinations

import numpy as np
import pytest

from triest.stream import (
    DELETE,
    INSERT,
    EdgeEvent,
    ParseError,
    SelfLoopError,
    StreamSpec,
    UnsupportedStreamError,
    _index_to_pair,
    apply_mass_deletion,
    apply_sliding_window,
    clique,
    erdos_renyi,
    gen_insertion_stream,
    make_event,
    parse_event,
    read_stream,
    reorder,
    validate_stream,
    write_stream,
)

from .oracles import edge_bag, triangles


def ev(op, u, v, label=None, ts=None):
    return make_event(op, u, v, label, ts)


# -- parsing -----------------------------------------------------------------


def test_parse_plain_insertion():
    assert parse_event("+ 3 7") == EdgeEvent(INSERT, 3, 7)


def test_parse_multigraph_deletion_is_canonicalized():
    e = parse_event("- 9 2 4", mode="multigraph")
    assert (e.op, e.u, e.v, e.label) == (DELETE, 2, 9, 4)


def test_parse_self_loop_rejected():
    with pytest.raises(SelfLoopError):
        parse_event("+ 5 5")


@pytest.mark.parametrize("line", ["* 1 2", "+ 1", "+ a b", "+ 1 2 3 4 5"])
def test_parse_malformed(line):
    with pytest.raises(ParseError):
        parse_event(line, lineno=7)


def test_parse_error_carries_line_number():
    with pytest.raises(ParseError) as info:
        parse_event("+ x 2", lineno=12)
    assert "12" in str(info.value)


def test_multigraph_needs_label():
    with pytest.raises(ParseError):
        parse_event("+ 1 2", mode="multigraph")


def test_graph_mode_extra_field_is_timestamp():
    e = parse_event("+ 4 1 17")
    assert (e.u, e.v, e.label, e.ts) == (1, 4, None, 17)


def test_swapped_endpoints_parse_equal():
    assert parse_event("+ 8 3") == parse_event("+ 3 8")


def test_read_write_roundtrip(tmp_path):
    spec = apply_sliding_window(clique(5), 4)
    buf = io.StringIO()
    write_stream(spec, buf)
    path = tmp_path / "s.txt"
    path.write_text("# header comment\n" + buf.getvalue())
    assert read_stream(path) == spec
    gz = tmp_path / "s.txt.gz"
    with gzip.open(gz, "wt") as fh:
        fh.write(buf.getvalue())
    assert read_stream(gz) == spec


# -- validation ----------------------------------------------------------------


def test_validate_reinsertion():
    rep = validate_stream(StreamSpec.from_events([ev(1, 1, 2), ev(1, 1, 2)]))
    assert not rep.ok and rep.first_violation == 1


def test_validate_insert_delete_insert_ok():
    rep = validate_stream(StreamSpec.from_events([ev(1, 1, 2), ev(-1, 1, 2), ev(1, 1, 2)]))
    assert rep.ok


def test_validate_delete_absent():
    rep = validate_stream(StreamSpec.from_events([ev(-1, 1, 2)]))
    assert not rep.ok and rep.first_violation == 0


def test_skip_invalid_filters():
    spec = StreamSpec.from_events([ev(1, 1, 2), ev(1, 1, 2), ev(-1, 3, 4), ev(1, 2, 3)])
    rep = validate_stream(spec, "skip-invalid")
    assert rep.dropped == 2
    assert [e.key for e in rep.stream] == [(1, 2), (2, 3)]
    assert validate_stream(rep.stream).ok


def test_multigraph_presence_is_per_label():
    spec = StreamSpec.from_events([ev(1, 1, 2, 0), ev(1, 1, 2, 1), ev(-1, 1, 2, 0)], mode="multigraph")
    assert validate_stream(spec).ok
    bad = StreamSpec.from_events([ev(1, 1, 2, 0), ev(1, 2, 1, 0)], mode="multigraph")
    assert validate_stream(bad).first_violation == 1


# -- generators ----------------------------------------------------------------


def test_clique3():
    s = clique(3)
    assert len(s) == 3 and s.insertion_only
    assert sum(triangles(edge_bag(s)).values()) == 1


def test_clique5_has_ten_triangles():
    s = clique(5)
    assert len(s) == 10
    assert sum(triangles(edge_bag(s)).values()) == 10


def test_er_empty_and_full():
    assert len(erdos_renyi(10, 0, seed=1)) == 0
    assert len(erdos_renyi(10, 1, seed=1)) == 45


def test_er_deterministic():
    assert erdos_renyi(30, 0.3, seed=5) == erdos_renyi(30, 0.3, seed=5)
    assert erdos_renyi(30, 0.3, seed=5) != erdos_renyi(30, 0.3, seed=6)


def test_generator_argument_errors():
    with pytest.raises(ValueError):
        gen_insertion_stream("clique", 1)
    with pytest.raises(ValueError):
        gen_insertion_stream("erdos_renyi", 5, 1.5)


def test_index_to_pair_matches_enumeration():
    for n in (2, 3, 7, 20):
        pairs = list(combinations(range(n), 2))
        u, v = _index_to_pair(np.arange(len(pairs)), n)
        assert list(zip(u.tolist(), v.tolist())) == pairs


def test_er_large_path_density():
    # 3000 vertices -> ~4.5M pairs, takes the sampling-without-replacement branch
    s = erdos_renyi(3000, 0.002, seed=3)
    pairs = 3000 * 2999 // 2
    assert abs(len(s) - 0.002 * pairs) < 5 * np.sqrt(pairs * 0.002)
    assert validate_stream(s).ok
    assert np.all(s.u < s.v)


# -- orderings -------------------------------------------------------------------


def test_natural_is_identity():
    s = erdos_renyi(12, 0.5, seed=2)
    assert reorder(s, "natural") == s


def test_uar_deterministic_and_permutation():
    s = clique(8)
    a, b = reorder(s, "uar", seed=4), reorder(s, "uar", seed=4)
    assert a == b
    assert sorted(a.keys()) == sorted(s.keys())
    assert a != s


def _connected(edges):
    if not edges:
        return True
    seen = {edges[0][0]}
    changed = True
    while changed:
        changed = False
        for a, b in edges:
            if (a in seen) != (b in seen):
                seen |= {a, b}
                changed = True
    return all(a in seen and b in seen for a, b in edges)


def test_bfs_on_clique4_prefix_connected():
    for seed in range(50):
        out = reorder(clique(4), "bfs", seed=seed)
        keys = out.keys()
        assert sorted(keys) == sorted(clique(4).keys())
        assert _connected(keys[:3])


def test_reorder_refuses_deletions():
    with pytest.raises(UnsupportedStreamError):
        reorder(apply_sliding_window(clique(4), 2), "uar", seed=0)


# -- deletion models -------------------------------------------------------------


def test_window_by_count_small():
    s = StreamSpec.from_edges([(0, 1), (1, 2), (2, 3)])
    out = apply_sliding_window(s, 2)
    assert [(e.op, e.key) for e in out] == [(1, (0, 1)), (1, (1, 2)), (-1, (0, 1)), (1, (2, 3))]


def test_window_larger_than_stream_is_identity():
    s = clique(3).take([0, 1, 2])
    s2 = StreamSpec.from_edges([(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)])
    assert apply_sliding_window(s2, 10) == s2
    assert apply_sliding_window(s, 10) == s


def test_window_by_time():
    s = StreamSpec.from_edges([(0, 1), (1, 2), (2, 3)], ts=[1, 1, 2])
    out = apply_sliding_window(s, 1, by="time")
    assert [(e.op, e.key) for e in out] == [
        (1, (0, 1)),
        (1, (1, 2)),
        (-1, (0, 1)),
        (-1, (1, 2)),
        (1, (2, 3)),
    ]


def test_window_by_time_needs_ts():
    with pytest.raises(ValueError):
        apply_sliding_window(clique(4), 1, by="time")


def test_window_live_count_bounded():
    out = apply_sliding_window(erdos_renyi(20, 0.4, seed=1), 7)
    live = 0
    for e in out:
        live += e.op
        assert live <= 7
    assert validate_stream(out).ok


def test_mass_deletion_q0_unchanged():
    s = clique(6)
    assert apply_mass_deletion(s, 0, 0.7, seed=1) == s


def test_mass_deletion_q1_d1():
    s = clique(6)
    out = apply_mass_deletion(s, 1, 1, seed=1)
    ops = out.op.tolist()
    assert ops == [1, -1] * len(s)
    assert validate_stream(out).ok


def test_mass_deletion_frequency():
    s = gen_insertion_stream("erdos_renyi", 300, 0.3, seed=0)
    out = apply_mass_deletion(s, 1, 0.5, seed=9)
    # every event: the live edges were each deleted with prob 0.5
    live = 0
    trials = hits = 0
    i = 0
    ops = out.op.tolist()
    while i < len(ops):
        assert ops[i] == 1
        live += 1
        j = i + 1
        while j < len(ops) and ops[j] == -1:
            j += 1
        trials += live
        hits += j - i - 1
        live -= j - i - 1
        i = j
    assert trials > 10_000
    assert abs(hits / trials - 0.5) < 0.02


def test_mass_deletion_deterministic():
    s = clique(10)
    assert apply_mass_deletion(s, 0.3, 0.4, seed=2) == apply_mass_deletion(s, 0.3, 0.4, seed=2)
