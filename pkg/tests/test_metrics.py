import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fgmsc.metrics import acc, ari, evaluate, nmi
from oracles import acc_bruteforce, ari_pairs, nmi_entropy

TRUTH = [0, 0, 1, 1]


def test_acc_examples():
    assert acc(TRUTH, TRUTH) == 1.0
    assert acc([1, 1, 0, 0], TRUTH) == 1.0
    assert acc([0, 1, 0, 1], TRUTH) == 0.5


def test_nmi_examples():
    assert nmi(TRUTH, TRUTH) == pytest.approx(1.0)
    assert nmi([0, 0, 0, 0], TRUTH) == 0.0
    assert nmi([0, 1, 0, 1], TRUTH) == pytest.approx(0.0, abs=1e-12)


def test_ari_examples():
    assert ari(TRUTH, TRUTH) == 1.0
    assert ari([0, 0, 0, 0], TRUTH) == 0.0
    assert ari([0, 1, 0, 1], TRUTH) == pytest.approx(ari_pairs([0, 1, 0, 1], TRUTH))
    assert ari([0, 1, 0, 1], TRUTH) == pytest.approx(-0.5)


def test_length_mismatch():
    with pytest.raises(ValueError):
        acc([0, 1], [0, 1, 1])


labelings = st.integers(1, 4).flatmap(
    lambda k: st.lists(st.integers(0, k - 1), min_size=2, max_size=9))


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_against_oracles(data):
    truth = data.draw(labelings)
    pred = data.draw(st.lists(st.integers(0, 3), min_size=len(truth),
                              max_size=len(truth)))
    assert acc(pred, truth) == pytest.approx(acc_bruteforce(pred, truth))
    assert nmi(pred, truth) == pytest.approx(nmi_entropy(pred, truth), abs=1e-12)
    assert ari(pred, truth) == pytest.approx(ari_pairs(pred, truth), abs=1e-12)


@given(st.lists(st.integers(0, 3), min_size=1, max_size=20), st.permutations(range(4)))
def test_relabel_invariance(labels, perm):
    relabelled = [perm[x] for x in labels]
    out = evaluate(relabelled, labels)
    assert out["acc"] == 1.0
    assert out["nmi"] == pytest.approx(1.0)
    assert out["ari"] == pytest.approx(1.0)
