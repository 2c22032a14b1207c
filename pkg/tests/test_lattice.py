import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sxpid.errors import IncompleteLatticeError, LatticeMismatchError, UnsupportedOrderError
from sxpid.lattice import (
    Antichain,
    below,
    bivariate_names,
    enumerate_antichains,
    moebius_invert,
    redundancy_lattice,
    resum_atoms,
)


@pytest.mark.parametrize("n, size", [(1, 1), (2, 4), (3, 18), (4, 166)])
def test_lattice_sizes(n, size):
    assert len(enumerate_antichains(n)) == size
    assert len(set(enumerate_antichains(n))) == size


@pytest.mark.parametrize("n", [0, 5, 2.0, "3", True])
def test_unsupported_order(n):
    with pytest.raises(UnsupportedOrderError):
        enumerate_antichains(n)


def test_numpy_integer_order_accepted():
    assert len(redundancy_lattice(np.int64(3))) == 18


@pytest.mark.parametrize("text", ["{1}{2,3}", "{2,3}{1}", " {1} { 3,2 } "])
def test_parse_canonical(text):
    assert str(Antichain.parse(text)) == "{1}{2,3}"


@pytest.mark.parametrize("text", ["", "{}", "{1", "1,2", "{1}{1,2}", "{1}x{2}", "{a}"])
def test_parse_rejects(text):
    with pytest.raises(ValueError):
        Antichain.parse(text)


def test_index_range_checked():
    with pytest.raises(ValueError):
        Antichain([[3]], 2)


def test_round_trip_all_nodes():
    for n in range(1, 5):
        for a in enumerate_antichains(n):
            assert Antichain.parse(str(a), n) == a


def test_order_examples():
    n = 3
    p = lambda s: Antichain.parse(s, n)
    assert below(p("{1}{2}{3}"), p("{1}"))
    assert below(p("{1}"), p("{1,2}"))
    assert below(p("{1}{2}"), p("{1,2}"))
    assert not below(p("{1,2}"), p("{1}"))
    assert not below(p("{1}"), p("{2}"))
    assert below(p("{1}{2,3}"), p("{1}"))
    with pytest.raises(LatticeMismatchError):
        below(Antichain.parse("{1}", 2), p("{1}"))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_partial_order_axioms_and_topological_order(n):
    lat = redundancy_lattice(n)
    nodes = lat.nodes
    for a in nodes:
        assert lat.below(a, a)
    for a, b in itertools.product(nodes, repeat=2):
        if a != b and lat.below(a, b):
            assert not lat.below(b, a)
            assert lat.index[a] < lat.index[b]
    assert lat.bottom.is_bottom and lat.top.is_top
    assert all(lat.below(lat.bottom, a) and lat.below(a, lat.top) for a in nodes)


def test_cover_edges_bivariate():
    edges = {(str(b), str(a)) for b, a in redundancy_lattice(2).cover_edges()}
    assert edges == {("{1}{2}", "{1}"), ("{1}{2}", "{2}"), ("{1}", "{1,2}"), ("{2}", "{1,2}")}


def test_lattice_json():
    data = json.loads(redundancy_lattice(3).to_json())
    assert data["n_sources"] == 3 and len(data["nodes"]) == 18
    assert ["{1}{2}{3}", "{1}{2}"] in data["cover_edges"]


def test_moebius_bivariate_by_hand():
    names = bivariate_names()
    i_cap = {names["red"]: 1.0, names["unq1"]: 3.0, names["unq2"]: 2.0, names["syn"]: 10.0}
    pi = moebius_invert(i_cap)
    assert pi[names["red"]] == 1.0
    assert pi[names["unq1"]] == 2.0 and pi[names["unq2"]] == 1.0
    assert pi[names["syn"]] == 6.0


def test_moebius_requires_complete_function():
    a = Antichain.parse("{1}{2}")
    with pytest.raises(IncompleteLatticeError):
        moebius_invert({a: 1.0})
    with pytest.raises(IncompleteLatticeError):
        moebius_invert({})


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 4), seed=st.integers(0, 2**32 - 1))
def test_moebius_round_trip(n, seed):
    rng = np.random.default_rng(seed)
    nodes = enumerate_antichains(n)
    values = {a: float(v) for a, v in zip(nodes, rng.normal(scale=5, size=len(nodes)))}
    back = resum_atoms(moebius_invert(values))
    assert max(abs(back[a] - values[a]) for a in nodes) < 1e-9
