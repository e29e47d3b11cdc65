import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chimera_ising.chimera import ChimeraCoord, FaultList, build
from chimera_ising.exact import (TooLarge, WidthExceeded, brute_force, build_sweep, condition,
                                 grid_order, solve_dp, solve_exact)
from chimera_ising.selby import SubsetSpec, subset_nodes
from chimera_ising.transforms import IsingInstance

from conftest import naive_min, random_chimera, random_dense


def test_brute_matches_naive_on_c1(rng):
    for t in range(20):
        inst = random_chimera(1, rng, field=t % 2 == 0)
        want = naive_min(inst)
        assert brute_force(inst).energy_num == want
        assert brute_force(inst, exhaustive=True).energy_num == want


def test_brute_dense_graph(rng):
    # non-bipartite: the free set is a greedy independent set
    for _ in range(5):
        inst = random_dense(11, rng)
        assert brute_force(inst).energy_num == naive_min(inst)


def test_brute_spins_attain_energy(rng):
    inst = random_chimera(2, rng)
    rep = brute_force(inst)
    assert inst.energy_num(rep.spins) == rep.energy_num
    assert rep.status == "optimal" and rep.lower_bound_num == rep.energy_num


def test_brute_cap():
    inst = IsingInstance.from_dicts(30, {i: 1 for i in range(30)}, {})
    with pytest.raises(TooLarge):
        brute_force(inst, cap=10, exhaustive=True)
    assert brute_force(inst, cap=10).energy_num == -30  # all spins are free


def test_zero_and_empty_instances():
    assert brute_force(IsingInstance.from_dicts(0)).energy_num == 0
    assert solve_exact(IsingInstance.from_dicts(0)).energy_num == 0
    g = build(2)
    zero = IsingInstance(g.num_qubits, np.zeros(32, int), g.chimera_edges,
                         np.zeros(len(g.chimera_edges), int), graph=g)
    assert solve_exact(zero).energy_num == 0


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_full_grid_width_is_4k(k):
    g = build(k)
    sweep = build_sweep(g.adjacency(), range(g.num_qubits), k)
    assert sweep.width == 4 * k


def test_grid_order_is_a_permutation():
    for o in (0, 1):
        assert sorted(grid_order(3, o)) == list(range(72))


def test_dp_matches_brute_on_c2(rng):
    for t in range(15):
        inst = random_chimera(2, rng, field=t % 3 != 0)
        rep = solve_exact(inst)
        assert rep.energy_num == brute_force(inst).energy_num
        assert inst.energy_num(rep.spins) == rep.energy_num


def test_dp_with_faults(rng):
    faults = FaultList(nodes=(ChimeraCoord(0, 1, 1, 2), ChimeraCoord(1, 0, 0, 0)))
    inst = random_chimera(2, rng, faults=faults)
    assert solve_exact(inst).energy_num == brute_force(inst).energy_num


def test_dp_non_chimera_graph(rng):
    for _ in range(5):
        inst = random_dense(12, rng, p=0.3)
        assert solve_exact(inst).energy_num == naive_min(inst)


def test_dp_disconnected_components():
    inst = IsingInstance.from_dicts(6, {0: 3, 5: -2}, {(0, 1): -4, (2, 3): 5, (3, 4): 5})
    assert solve_exact(inst).energy_num == naive_min(inst)


def test_width_cap_is_enforced():
    inst = random_chimera(6, np.random.default_rng(0))
    with pytest.raises(WidthExceeded):
        solve_exact(inst)


def test_condition_energy_split(rng):
    inst = random_chimera(2, rng)
    s = rng.choice([-1, 1], inst.n)
    nodes = np.array([0, 3, 5, 8, 9, 12, 20, 31])
    prob = condition(inst, s, nodes)
    local = s[nodes]
    inner = int(prob.h @ local)
    if len(prob.edges):
        inner += int((local[prob.edges[:, 0]] * local[prob.edges[:, 1]]) @ prob.J)
    assert inner + prob.offset == inst.energy_num(s)


def test_conditional_optimum_matches_enumeration(rng):
    inst = random_chimera(2, rng)
    s = rng.choice([-1, 1], inst.n).astype(np.int8)
    nodes = subset_nodes(2, SubsetSpec(1, 0, 0, 1))
    prob = condition(inst, s, nodes)
    rep = solve_dp(prob, adjacency=inst.graph.adjacency(), k=2)
    # the free spins as a standalone instance, solved by enumeration
    fold = IsingInstance(len(nodes), prob.h, prob.edges, prob.J)
    assert rep.energy_num == brute_force(fold).energy_num + prob.offset
    full = s.copy()
    full[nodes] = rep.spins
    assert inst.energy_num(full) == rep.energy_num


def test_prefer_breaks_ties_deterministically():
    # zero instance: every configuration ties; prefer picks it outright
    inst = IsingInstance.from_dicts(5, {}, {(0, 1): 0})
    prob = condition(inst, np.ones(5), range(5))
    pref = np.array([1, -1, -1, 1, -1])
    rep = solve_dp(prob, prefer=pref)
    assert np.array_equal(rep.spins, pref)
    assert np.array_equal(solve_dp(prob).spins, np.ones(5))


def test_large_weights_use_wide_integers():
    big = 2 ** 40
    inst = IsingInstance.from_dicts(3, {0: big}, {(0, 1): big, (1, 2): -big})
    assert solve_exact(inst).energy_num == naive_min(inst)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_dp_equals_brute_random_c1_c2(seed):
    r = np.random.default_rng(seed)
    inst = random_chimera(int(r.integers(1, 3)), r, field=bool(r.integers(0, 2)))
    assert solve_exact(inst).energy_num == brute_force(inst).energy_num
