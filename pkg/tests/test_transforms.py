from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chimera_ising.chimera import build
from chimera_ising.transforms import (CutVector, InstanceError, IsingInstance, QuboInstance,
                                      cut_value_num, energy, ising_to_maxcut,
                                      maxcut_solution_to_spins, preprocess_dominated_fields,
                                      qubo_to_ising, spins_to_cut)

from conftest import all_spins, naive_min, random_dense


def test_energy_by_hand():
    inst = IsingInstance.from_dicts(3, {0: 3, 2: -5}, {(0, 1): 10, (1, 2): -2})
    s = np.array([1, -1, 1])
    # 1.0*(1)(-1) + (-0.2)(-1)(1) + 0.3 - 0.5
    assert inst.energy_num(s) == -10 + 2 + 3 - 5
    assert energy(inst, s) == Fraction(-10, 10)


def test_instance_validation():
    with pytest.raises(InstanceError):
        IsingInstance.from_dicts(2, {}, {(0, 0): 1})
    with pytest.raises(InstanceError):
        IsingInstance.from_dicts(2, {}, {(0, 2): 1})
    g = build(1)
    with pytest.raises(InstanceError):
        IsingInstance.from_dicts(8, {}, {(0, 1): 1}, graph=g)  # same side: no coupler
    with pytest.raises(InstanceError):
        IsingInstance.from_dicts(2, {}, {}).energy_num([1, 0])


def test_respects_granularity():
    assert IsingInstance.from_dicts(2, {0: 10}, {(0, 1): -10}).respects_granularity()
    assert not IsingInstance.from_dicts(2, {0: 11}, {}).respects_granularity()


def test_stats_counts_field_node_once():
    inst = IsingInstance.from_dicts(4, {0: 1, 3: 2}, {(0, 1): 1, (1, 2): 0})
    # nodes 0, 1, 3 plus the field node; edges: one coupling, two field edges
    assert inst.stats() == (4, 3)


def test_maxcut_identity_on_every_configuration(rng):
    inst = random_dense(7, rng)
    mc = ising_to_maxcut(inst)
    for s in all_spins(7):
        cut = spins_to_cut(mc, s)
        assert inst.energy_num(s) == mc.total_weight_num - 2 * cut_value_num(mc, cut)


def test_maxcut_without_field_has_no_extra_node():
    inst = IsingInstance.from_dicts(3, {}, {(0, 1): 4, (1, 2): -3})
    mc = ising_to_maxcut(inst)
    assert mc.field_node is None and mc.n == 3


def test_maxcut_roundtrip_spins(rng):
    inst = random_dense(6, rng)
    mc = ising_to_maxcut(inst)
    for s in all_spins(6)[::7]:
        back = maxcut_solution_to_spins(spins_to_cut(mc, s), mc.field_node)
        assert np.array_equal(back, s)


def test_cut_vector_must_match_side():
    inst = IsingInstance.from_dicts(3, {}, {(0, 1): 4, (1, 2): -3})
    mc = ising_to_maxcut(inst)
    good = CutVector.from_side(mc, [True, False, False])
    assert cut_value_num(mc, good) == 4
    with pytest.raises(InstanceError):
        cut_value_num(mc, CutVector(good.side, 1 - good.x))


def qubo_extremes(qubo):
    X = (all_spins(qubo.n) + 1) // 2
    vals = np.einsum("ri,ij,rj->r", X, qubo.Q, X) + X @ qubo.q
    return int(vals.min()), int(vals.max())


@pytest.mark.parametrize("sense", ["max", "min"])
def test_qubo_recovery(rng, sense):
    for _ in range(10):
        n = 6
        Q = np.triu(rng.integers(-10, 11, (n, n)), 1)
        qubo = QuboInstance(Q, rng.integers(-10, 11, n))
        inst, rec = qubo_to_ising(qubo, sense)
        lo, hi = qubo_extremes(qubo)
        opt = naive_min(inst)
        assert rec.value(opt) == Fraction(hi if sense == "max" else lo, 10)


def test_qubo_value_of_every_assignment():
    Q = np.array([[0, 3, -2], [0, 0, 5], [0, 0, 0]])
    qubo = QuboInstance(Q, np.array([1, -4, 2]))
    inst, rec = qubo_to_ising(qubo, "min")
    for s in all_spins(3):
        x = rec.x_from_spins(s)
        assert rec.value(inst.energy_num(s)) == qubo.value(x)


def test_qubo_rejects_lower_triangle():
    with pytest.raises(InstanceError):
        QuboInstance(np.array([[0, 0], [1, 0]]), np.zeros(2))


def test_preprocess_chain_reaction():
    # node 0 is dominated; fixing it makes node 1 dominated as well
    inst = IsingInstance.from_dicts(3, {0: 10, 1: 0, 2: 1}, {(0, 1): 5, (1, 2): 1})
    pre = preprocess_dominated_fields(inst)
    assert pre.fixed[0] == -1 and pre.fixed[1] == 1
    assert naive_min(inst) == naive_min(pre.reduced) + pre.offset_num


def test_preprocess_isolated_zero_field_fixed_up():
    pre = preprocess_dominated_fields(IsingInstance.from_dicts(1, {}, {}))
    assert pre.fixed == {0: 1} and pre.offset_num == 0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 9))
def test_preprocess_preserves_optimum(seed, n):
    r = np.random.default_rng(seed)
    inst = random_dense(n, r, p=0.4, lo=-4, hi=4)
    h = inst.h.copy()
    h[r.integers(0, n)] = 30  # make sure something is dominated
    inst = inst.replace(h=h)
    pre = preprocess_dominated_fields(inst)
    assert pre.fixed
    assert naive_min(inst) == naive_min(pre.reduced) + pre.offset_num
