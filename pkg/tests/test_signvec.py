import numpy as np
import pytest
from hypothesis import given, strategies as st

from relucomplex.signvec import (
    DegeneracyCounter,
    Sign,
    SignConflictError,
    SignVector,
    append_sign,
    cell_key,
    edge_sign_from_vertices,
    group_rows,
    parse_sign_text,
    perturb_parents,
    perturb_rows,
    sign_of_value,
    sign_text,
    signs_of_values,
    zero_positions,
)

sign_values = st.sampled_from([-1, 0, 1])
sign_vectors = st.lists(sign_values, min_size=1, max_size=24).map(SignVector)


def test_sign_order():
    assert Sign.MINUS < Sign.ZERO < Sign.PLUS
    assert str(Sign.PLUS) == "+" and str(Sign.MINUS) == "-" and str(Sign.ZERO) == "0"


def test_sign_of_value():
    assert sign_of_value(0.5) is Sign.PLUS
    assert sign_of_value(-0.5) is Sign.MINUS
    counter = DegeneracyCounter()
    assert sign_of_value(0.0, counter) is Sign.MINUS
    assert counter.count == 1
    sign_of_value(5e-13, counter)
    assert counter.count == 2
    sign_of_value(1.0, counter)
    assert counter.count == 2


def test_sign_of_value_nonfinite():
    with pytest.raises(ValueError):
        sign_of_value(float("nan"))
    with pytest.raises(ValueError):
        signs_of_values([1.0, float("inf")])


def test_signs_of_values_matches_scalar():
    vals = np.array([0.3, -0.2, 0.0, 1e-13, -4.0])
    rows, ndeg = signs_of_values(vals)
    assert rows.tolist() == [int(sign_of_value(v)) for v in vals]
    assert ndeg == 2


def test_append_sign():
    sv = SignVector.from_text("+-0")
    assert append_sign(sv, Sign.PLUS).text == "+-0+"
    assert append_sign(SignVector([]), Sign.ZERO).text == "0"
    appended = append_sign(sv, Sign.MINUS)
    assert appended[-1] is Sign.MINUS and appended[:3] == sv


def test_zero_positions():
    assert zero_positions(SignVector.from_text("+0-0")) == [1, 3]
    assert zero_positions(SignVector.from_text("++")) == []


def test_text_round_trip():
    row = parse_sign_text("+-0+")
    assert sign_text(row) == "+-0+"
    with pytest.raises(ValueError):
        SignVector.from_text("+x")


def test_perturb_parents_interior_vertex():
    sv = SignVector.from_text("++++00")
    parents = perturb_parents(sv, 4)
    assert [p.text for p in parents] == ["+++++0", "++++-0", "++++0+", "++++0-"]


def test_perturb_parents_boundary():
    # z = 1 facet zero, Z = 2 total: 1 + 2*(2-1) = 3 parents
    sv = SignVector.from_text("0+++0-")
    parents = perturb_parents(sv, 4)
    assert len(parents) == 3
    assert [p.text for p in parents] == ["++++0-", "0++++-", "0+++--"]


def test_perturb_parents_interior_edge_3d():
    # D=3 interior edge: two zeros past m, k=1 -> 2(D-k) = 4 parents
    sv = SignVector.from_text("++++++00")
    assert len(perturb_parents(sv, 6)) == 4


def test_perturb_parents_no_zeros():
    with pytest.raises(ValueError):
        perturb_parents(SignVector.from_text("++-"), 1)


@given(st.lists(sign_values, min_size=1, max_size=20), st.integers(0, 20))
def test_perturb_parents_count_property(vals, m):
    sv = SignVector(vals)
    zs = zero_positions(sv)
    if not zs:
        return
    m = min(m, len(vals))
    parents = perturb_parents(sv, m)
    z = sum(1 for j in zs if j < m)
    big_z = len(zs)
    assert len(parents) == z + 2 * (big_z - z)
    for p in parents:
        assert len(zero_positions(p)) == big_z - 1


@given(st.lists(st.lists(sign_values, min_size=6, max_size=6), min_size=1, max_size=8))
def test_perturb_rows_matches_op(rows):
    rows = np.array(rows, dtype=np.int8)
    m = 3
    cand, src = perturb_rows(rows, m)
    expect = []
    for i, row in enumerate(rows):
        sv = SignVector(row.tolist())
        if zero_positions(sv):
            expect.extend((i, p.text) for p in perturb_parents(sv, m))
    got = [(int(src[j]), sign_text(cand[j])) for j in range(len(cand))]
    assert sorted(got) == sorted(expect)


def test_edge_sign_from_vertices():
    a = SignVector.from_text("0+")
    b = SignVector.from_text("00")
    assert edge_sign_from_vertices(a, b).text == "0+"
    with pytest.raises(SignConflictError):
        edge_sign_from_vertices(SignVector.from_text("+-"), SignVector.from_text("--"))


@given(sign_vectors)
def test_edge_sign_idempotent(sv):
    assert edge_sign_from_vertices(sv, sv) == sv


def test_cell_key_examples():
    a = cell_key(SignVector.from_text("-0+"))
    b = cell_key(SignVector.from_text("-0+"))
    assert a == b
    assert cell_key(SignVector.from_text("-")) < cell_key(SignVector.from_text("0"))
    with pytest.raises(ValueError):
        cell_key(SignVector([1] * (1 << 16)))


@given(
    st.lists(sign_values, min_size=1, max_size=16),
    st.lists(sign_values, min_size=1, max_size=16),
)
def test_cell_key_injective_and_ordered(a_vals, b_vals):
    a, b = SignVector(a_vals), SignVector(b_vals)
    ka, kb = cell_key(a), cell_key(b)
    assert (ka == kb) == (a == b)
    if len(a_vals) == len(b_vals):
        assert (ka < kb) == (tuple(a_vals) < tuple(b_vals))


def test_group_rows():
    rows = np.array(
        [[1, 0, -1], [0, 0, 1], [1, 0, -1], [-1, 1, 0], [0, 0, 1], [-1, 1, 0]],
        dtype=np.int8,
    )
    uniq, inverse, counts = group_rows(rows)
    assert counts.tolist() == [2, 2, 2]
    # canonical order: minus < zero < plus lexicographically
    assert [sign_text(r) for r in uniq] == ["-+0", "00+", "+0-"]
    assert all(sign_text(uniq[inverse[i]]) == sign_text(rows[i]) for i in range(6))
