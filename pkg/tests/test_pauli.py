from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gmminit.pauli import (
    CZ_MATRIX,
    CZ_TABLE,
    PAULI_LETTERS,
    Observable,
    PauliParseError,
    PauliString,
    build_cz_table,
    cz_conjugate,
    cz_conjugate_layer,
    observable_matrix,
    pair_stats,
    parse_pauli,
    pauli_matrix,
    support,
)

words = st.integers(1, 5).flatmap(lambda n: st.text(alphabet="IXYZ", min_size=n, max_size=n))


class TestParse:
    def test_basic(self):
        p = parse_pauli("XXIZ", 4)
        assert p.word == "XXIZ"
        assert p.sign == 1.0

    def test_identity(self):
        assert parse_pauli("IIII", 4) == PauliString("IIII")

    def test_foreign_character(self):
        with pytest.raises(PauliParseError, match="qubit 2"):
            parse_pauli("XQ", 2)

    def test_wrong_length(self):
        with pytest.raises(PauliParseError):
            parse_pauli("XYZ", 4)

    def test_zero_sign_rejected(self):
        with pytest.raises(ValueError):
            PauliString("X", 0.0)


class TestCZ:
    def test_x_i(self):
        assert cz_conjugate(PauliString("XI"), (0, 1)) == PauliString("XZ")

    def test_x_y(self):
        assert cz_conjugate(PauliString("XY"), (0, 1)) == PauliString("YX", -1.0)

    def test_z_z_is_fixed(self):
        # CZ and Z⊗Z are both diagonal, so they commute
        assert cz_conjugate(PauliString("ZZ"), (0, 1)) == PauliString("ZZ")

    def test_layer_chain(self):
        assert cz_conjugate_layer(PauliString("XII"), [(0, 1), (1, 2)]) == PauliString("XZI")
        assert cz_conjugate_layer(PauliString("ZXI"), [(0, 1), (1, 2)]) == PauliString("IXZ")

    def test_empty_layer(self):
        assert cz_conjugate_layer(PauliString("II"), []) == PauliString("II")

    def test_bad_edges(self):
        with pytest.raises(IndexError):
            cz_conjugate(PauliString("XI"), (0, 2))
        with pytest.raises(ValueError):
            cz_conjugate(PauliString("XI"), (1, 1))

    @pytest.mark.parametrize("a,b", list(product(PAULI_LETTERS, repeat=2)))
    def test_table_matches_matrices(self, a, b):
        ra, rb, s = CZ_TABLE[(a, b)]
        lhs = CZ_MATRIX.conj().T @ np.kron(pauli_matrix(a), pauli_matrix(b)) @ CZ_MATRIX
        np.testing.assert_array_equal(lhs, s * np.kron(pauli_matrix(ra), pauli_matrix(rb)))

    def test_table_rebuild_is_stable(self):
        assert build_cz_table() == CZ_TABLE

    @given(words, st.data())
    def test_involution(self, word, data):
        if len(word) < 2:
            return
        i, j = data.draw(st.lists(st.integers(0, len(word) - 1), min_size=2, max_size=2, unique=True))
        p = PauliString(word)
        assert cz_conjugate(cz_conjugate(p, (i, j)), (i, j)) == p

    @given(words, st.data())
    def test_closure(self, word, data):
        if len(word) < 2:
            return
        i, j = data.draw(st.lists(st.integers(0, len(word) - 1), min_size=2, max_size=2, unique=True))
        out = cz_conjugate(PauliString(word), (i, j)).word
        if set(word) <= {"I", "Z"}:
            assert set(out) <= {"I", "Z"}
        for k in (i, j):
            if word[k] in "XY":
                assert out[k] in "XY"


class TestPairStatsSupport:
    def test_examples(self):
        assert tuple(vars(pair_stats(PauliString("XYZI"), PauliString("XYIZ"))).values()) == (1, 0, 2, 2)
        assert tuple(vars(pair_stats(PauliString("ZZ"), PauliString("ZZ"))).values()) == (0, 2, 2, 0)
        assert tuple(vars(pair_stats(PauliString("XX"), PauliString("ZI"))).values()) == (0, 0, 0, 0)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            pair_stats(PauliString("X"), PauliString("XX"))

    @given(st.integers(1, 5).flatmap(
        lambda n: st.tuples(*[st.text(alphabet="IXYZ", min_size=n, max_size=n)] * 2)))
    def test_symmetric_and_ordered(self, pair):
        a, b = PauliString(pair[0]), PauliString(pair[1])
        s = pair_stats(a, b)
        assert s == pair_stats(b, a)
        assert 0 <= s.s3 <= s.s13 <= len(a)
        assert 0 <= s.s1 <= len(a) and 0 <= s.s03 <= len(a)

    def test_support(self):
        assert support(PauliString("XIZ")) == (frozenset({0, 2}), 2)
        assert support(PauliString("II")) == (frozenset(), 0)
        assert support(PauliString("XXXX")) == (frozenset(range(4)), 4)


class TestObservable:
    def test_merge_duplicates(self):
        obs = Observable.from_terms([(1.0, "ZZ"), (0.5, "ZZ"), (-1.0, "XI")])
        assert obs.words == ["ZZ", "XI"]
        np.testing.assert_allclose(obs.coeffs, [1.5, -1.0])

    def test_cancelling_terms_dropped(self):
        obs = Observable.from_terms([(1.0, "ZZ"), (-1.0, "ZZ"), (2.0, "XX")])
        assert obs.words == ["XX"]

    def test_sign_folded(self):
        obs = Observable.from_terms([(2.0, PauliString("XY", -1.0))])
        assert obs.terms[0] == (-2.0, PauliString("XY"))

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            Observable.from_terms([(1.0, "ZZ"), (1.0, "Z")])

    def test_direct_duplicates_rejected(self):
        with pytest.raises(ValueError):
            Observable(((1.0, PauliString("X")), (2.0, PauliString("X"))), 1)

    def test_matrix_hermitian(self):
        obs = Observable.from_terms([(0.3, "XY"), (-1.1, "ZI"), (0.7, "YY")])
        m = observable_matrix(obs)
        np.testing.assert_allclose(m, m.conj().T)

    def test_qubit_zero_is_rightmost_factor(self):
        np.testing.assert_array_equal(pauli_matrix("XI"), np.kron(np.eye(2), pauli_matrix("X")))
