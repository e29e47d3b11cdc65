import numpy as np
import pytest

from chimera_ising.formats import (FormatError, format_embedding, format_instance, format_maxcut,
                                   format_spins, parse_embedding, parse_instance, parse_maxcut,
                                   parse_real_instance, parse_spins, read_instance, rebin,
                                   write_instance)
from chimera_ising.instances import gen_mgw
from chimera_ising.transforms import IsingInstance, ising_to_maxcut


def test_instance_roundtrip_with_faults(tmp_path):
    inst = gen_mgw(2, 5)
    assert inst.graph.faulty_nodes
    path = tmp_path / "a.ising"
    write_instance(inst, path)
    back = read_instance(path)
    assert back.graph == inst.graph
    assert np.array_equal(back.h, inst.h) and np.array_equal(back.J, inst.J)
    assert (back.name, back.family) == (inst.name, inst.family)
    assert format_instance(back) == path.read_text()


def test_parse_minimal():
    inst = parse_instance("# comment\nising 3 1 10\nh 2 -4\nJ 1 0 7\n")
    assert inst.edges.tolist() == [[0, 1]] and inst.J.tolist() == [7]
    assert inst.h.tolist() == [0, 0, -4]


@pytest.mark.parametrize("text,where", [
    ("", "empty"),
    ("ising 2 1\n", ":1:"),
    ("ising 2 1 10\nJ 0 1 x\n", ":2:"),
    ("ising 2 1 10\nJ 0 5 1\n", ":2:"),
    ("ising 2 2 10\nJ 0 1 1\nJ 1 0 1\n", ":3:"),
    ("ising 2 1 10\nJ 0 1 1\nq 3\n", ":3:"),
    ("ising 2 2 10\nJ 0 1 1\n", "announces"),
    ("ising 8 1 10\nchimera 1\nJ 0 1 1\n", "coupler"),
])
def test_parse_errors_locate_problem(text, where):
    with pytest.raises(FormatError, match=where):
        parse_instance(text, "f.ising")


def test_maxcut_roundtrip():
    inst = IsingInstance.from_dicts(3, {0: 2}, {(0, 1): 4, (1, 2): -3})
    mc = ising_to_maxcut(inst)
    back = parse_maxcut(format_maxcut(mc))
    assert back.field_node == mc.field_node == 3
    assert np.array_equal(back.edges, mc.edges) and np.array_equal(back.c, mc.c)


def test_real_instance_and_rebin():
    n, h, J = parse_real_instance("ising-real 3 2\nh 0 4.0\nJ 0 1 -8.0\nJ 2 1 1.0\n")
    inst = rebin(n, h, J)
    # scale 8: 0.5, -1.0, 0.125 -> 0.1
    assert inst.h[0] == 5 and inst.J.tolist() == [-10, 1]
    assert inst.respects_granularity()


def test_spins_roundtrip():
    s = np.array([1, -1, -1, 1])
    assert np.array_equal(parse_spins(format_spins(s)), s)
    with pytest.raises(FormatError, match=":1:"):
        parse_spins("1 0 -1")


def test_embedding_roundtrip():
    chains = [(0, 4, 12), (1, 5)]
    assert parse_embedding(format_embedding(chains)) == chains
    with pytest.raises(FormatError, match=":2:"):
        parse_embedding("0 1\nfoo\n")
