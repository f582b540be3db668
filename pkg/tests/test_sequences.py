import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ppclab import (DomainError, SequenceFileError, SequenceMatrix, check_spacing, gen_nlog,
                    gen_power, load_sequence, save_sequence)


def test_gen_power_examples():
    np.testing.assert_array_equal(gen_power([2.5], 1, n0=4).values, [[32.0]])
    np.testing.assert_array_equal(gen_power([1, 1], 2).values, [[1, 1], [2, 2]])
    np.testing.assert_array_equal(gen_power([2, 3], 2, n0=2).values, [[4, 8], [9, 27]])


def test_gen_power_meta_and_errors():
    seq = gen_power([2.5, 3.5], 5)
    assert (seq.N, seq.d, seq.family) == (5, 2, "power")
    with pytest.raises(DomainError):
        gen_power([0.0], 3)
    with pytest.raises(DomainError):
        gen_power([2.0], 0)
    with pytest.raises(DomainError):
        gen_power([2.0], 3, n0=0)
    with pytest.raises(DomainError):
        gen_power([400.0], 10)


def test_gen_nlog_examples():
    np.testing.assert_allclose(gen_nlog(1, 1, n0=3).values, [[3, 3 * math.log(3)]])
    np.testing.assert_allclose(gen_nlog(2, 1, n0=8).values, [[8, 8 * math.log(8) ** 2]])
    np.testing.assert_allclose(gen_nlog(1, 2).values, [[2, 2 * math.log(2)], [3, 3 * math.log(3)]])
    with pytest.raises(DomainError):
        gen_nlog(1, 2, n0=1)
    with pytest.raises(DomainError):
        gen_nlog(0.5, 2)


def test_matrix_invariants():
    with pytest.raises(DomainError):
        SequenceMatrix(np.array([[1.0], [1.0]]))
    with pytest.raises(DomainError):
        SequenceMatrix(np.array([[1.0], [np.inf]]))
    m = SequenceMatrix(np.array([[1.0], [2.0]]))
    with pytest.raises(ValueError):
        m.values[0, 0] = 5.0


def test_load_examples(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("1\n2\n3\n")
    np.testing.assert_array_equal(load_sequence(p).values, [[1], [2], [3]])
    p.write_text("1,1\n2,4\n")
    assert load_sequence(p).values.shape == (2, 2)
    assert load_sequence(p).family == "file"


@pytest.mark.parametrize("text, code", [
    ("2\n1\n", "not-increasing"),
    ("1,2\n3\n", "malformed"),
    ("1\nabc\n", "malformed"),
    ("1\nnan\n", "malformed"),
    ("", "malformed"),
])
def test_load_error_codes(tmp_path, text, code):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    with pytest.raises(SequenceFileError) as info:
        load_sequence(p)
    assert info.value.code == code


def test_missing_file(tmp_path):
    with pytest.raises(SequenceFileError) as info:
        load_sequence(tmp_path / "none.csv")
    assert info.value.code == "missing"


@given(st.lists(st.floats(1e-3, 8.0), min_size=1, max_size=3), st.integers(1, 40), st.integers(1, 50))
def test_roundtrip_bit_exact(tmp_path_factory, thetas, N, n0):
    seq = gen_power(thetas, N, n0=n0)
    p = tmp_path_factory.mktemp("rt") / "seq.csv"
    save_sequence(seq, p)
    back = load_sequence(p)
    assert back.values.tobytes() == seq.values.tobytes()
    assert b"\r" not in p.read_bytes()


def test_spacing_examples():
    c = check_spacing(np.array([1.0, 2.0, 3.0]), 1)
    assert c.holds and c.worst_gap == 1
    c = check_spacing(np.array([1.0, 1.5]), 1)
    assert not c.holds and c.worst_gap == 0.5 and c.worst_index == 0
    assert check_spacing(gen_power([2.5], 10), 1).holds
    with pytest.raises(DomainError):
        check_spacing(np.array([1.0]), 1)
    with pytest.raises(DomainError):
        check_spacing(np.array([1.0, 2.0]), 0)


def test_spacing_reports_per_column_minimum():
    x = np.array([[1.0, 1.0], [2.0, 1.2], [4.0, 3.0]])
    c = check_spacing(x, 0.5)
    assert not c.holds
    assert c.worst_gap == pytest.approx(0.2)
    assert c.worst_index == 0
    np.testing.assert_allclose(c.column_gaps, [1.0, 0.2])


@given(st.lists(st.floats(1.0, 4.0), min_size=1, max_size=3), st.integers(2, 200), st.integers(1, 20))
def test_power_family_passes_with_first_gap(thetas, N, n0):
    seq = gen_power(thetas, N, n0=n0)
    first = float(np.min(seq.values[1] - seq.values[0]))
    # gaps are nondecreasing in exact arithmetic; allow rounding of the subtraction
    assert check_spacing(seq, first * (1 - 1e-12)).holds


@given(st.floats(1.0, 4.0), st.integers(2, 200), st.integers(2, 20))
def test_nlog_family_passes_with_first_gap(A, N, n0):
    seq = gen_nlog(A, N, n0=n0)
    first = float(np.min(seq.values[1] - seq.values[0]))
    assert check_spacing(seq, first * (1 - 1e-12)).holds
