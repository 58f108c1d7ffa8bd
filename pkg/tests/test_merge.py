import pytest
from hypothesis import given
from hypothesis import strategies as st

from mentionlink.assign import HIGH, UNMATCHED, Assignment
from mentionlink.errors import ContractError
from mentionlink.kb import StringDictionary
from mentionlink.merge import KB_CASCADE, NAME_MERGED, NEW_CLUSTER, final_merge

DICT = StringDictionary({"kay": "K", "k1": "K1", "k2": "K2", "k3": "K3"})


def unmatched(*ids):
    return [Assignment(i, UNMATCHED, None, 0.1) for i in ids]


def test_single_hit_relabels_whole_cluster():
    out = final_merge(unmatched("x", "y"), {"x": "n1", "y": "n1"}, DICT, {"x": "kay", "y": "other"})
    assert out.labels == {"x": "kb:K", "y": "kb:K"}
    assert set(out.provenance.values()) == {NAME_MERGED}


def test_no_hit_keeps_label():
    out = final_merge(unmatched("x", "y"), {"x": "n1", "y": "n1"}, DICT, {"x": "a", "y": "b"})
    assert out.labels == {"x": "n1", "y": "n1"}
    assert set(out.provenance.values()) == {NEW_CLUSTER}


def majority_oracle(votes):
    tally = {}
    for v in votes:
        tally[v] = tally.get(v, 0) + 1
    top = max(tally.values())
    return sorted(k for k, c in tally.items() if c == top)[0]


def test_majority_vote():
    canon = {"x": "k1", "y": "k2", "z": "k2"}
    out = final_merge(unmatched("x", "y", "z"), dict.fromkeys("xyz", "n1"), DICT, canon)
    assert majority_oracle(["K1", "K2", "K2"]) == "K2"
    assert set(out.labels.values()) == {"kb:K2"}


def test_majority_tie_goes_to_smallest_id():
    canon = {"x": "k3", "y": "k2"}
    out = final_merge(unmatched("x", "y"), dict.fromkeys("xy", "n1"), DICT, canon)
    assert set(out.labels.values()) == {"kb:K2"}


def test_matched_mentions_keep_kb_cluster():
    a = [Assignment("m", HIGH, "K3", 0.9)] + unmatched("x")
    out = final_merge(a, {"x": "n1"}, DICT, {"m": "k1", "x": "zz"})
    assert out.labels == {"m": "kb:K3", "x": "n1"}
    assert out.provenance["m"] == KB_CASCADE


def test_contract_errors():
    with pytest.raises(ContractError):
        final_merge(unmatched("x"), {}, DICT, {})
    with pytest.raises(ContractError):
        final_merge([Assignment("m", HIGH, "K", 0.9)], {"m": "n1"}, DICT, {})
    with pytest.raises(ContractError):
        final_merge([Assignment("m", HIGH, "K", 0.9)] * 2, {}, DICT, {})


names = st.sampled_from(["kay", "k1", "k2", "k3", "a", "b", ""])


@st.composite
def merge_inputs(draw):
    n = draw(st.integers(0, 15))
    ids = [f"m{i}" for i in range(n)]
    new = {i: f"n{draw(st.integers(0, 4))}" for i in ids}
    canon = {i: draw(names) for i in ids}
    return ids, new, canon


def partition(labels):
    groups = {}
    for m, l in labels.items():
        groups.setdefault(l, set()).add(m)
    return groups


@given(merge_inputs())
def test_merge_properties(data):
    ids, new, canon = data
    out = final_merge(unmatched(*ids), new, DICT, canon)
    assert set(out.labels) == set(ids)
    # never splits: each new cluster maps to one label
    for members in partition(new).values():
        assert len({out.labels[m] for m in members}) == 1
    assert len(set(out.labels.values())) <= len(set(new.values()))
    again = final_merge(unmatched(*ids), out.labels, DICT, canon)
    assert again.labels == out.labels
