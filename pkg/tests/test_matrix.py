import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from corrmax.errors import FormatError, ParseError, ShapeError
from corrmax.matrix import (
    BLOCK_ROWS,
    MAGIC,
    DataMatrix,
    column_stats,
    column_summaries,
    load_binary,
    load_csv,
    load_matrix,
    save_binary,
    save_csv,
)


def _write(path, text):
    path.write_bytes(text.encode())
    return path


class TestDataMatrix:
    def test_basic(self):
        X = DataMatrix([[1, 2], [3, 4]])
        assert X.shape == (2, 2) and X.n == 2 and X.p == 2
        assert X.values.dtype == np.float64
        assert not X.values.flags.writeable

    def test_copies_input(self):
        a = np.ones((3, 3))
        X = DataMatrix(a)
        a[0, 0] = 7
        assert X.values[0, 0] == 1

    @pytest.mark.parametrize("bad", [[1, 2, 3], [[1, 2]], [[1], [2]], np.zeros((2, 2, 2))])
    def test_shape_errors(self, bad):
        with pytest.raises(ShapeError):
            DataMatrix(bad)

    @pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
    def test_non_finite(self, bad):
        with pytest.raises(ValueError):
            DataMatrix([[1, 2], [3, bad]])

    def test_leading(self):
        X = DataMatrix(np.arange(20.0).reshape(5, 4))
        np.testing.assert_array_equal(X.leading(3, 2).values, X.values[:3, :2])
        with pytest.raises(ShapeError):
            X.leading(6, 2)

    def test_eq_hash(self):
        a = DataMatrix([[1, 2], [3, 4]])
        b = DataMatrix([[1.0, 2.0], [3.0, 4.0]])
        assert a == b and hash(a) == hash(b)
        assert a != DataMatrix([[1, 2], [3, 5]])


class TestCsv:
    def test_direct_parse(self, tmp_path):
        X = load_csv(_write(tmp_path / "a.csv", "1,2\n3,4\n"))
        np.testing.assert_array_equal(X.values, [[1, 2], [3, 4]])

    def test_ragged_row(self, tmp_path):
        with pytest.raises(ParseError) as err:
            load_csv(_write(tmp_path / "a.csv", "1,2\n3\n"))
        assert err.value.row == 2

    def test_header(self, tmp_path):
        X = load_csv(_write(tmp_path / "a.csv", "a,b\n1,2\n3,4\n5,6\n"), has_header=True)
        assert X.shape == (3, 2)

    def test_crlf_blank_and_exponent(self, tmp_path):
        X = load_csv(_write(tmp_path / "a.csv", "1e0, -2.5E+1\r\n\r\n.5,3.\r\n"))
        np.testing.assert_array_equal(X.values, [[1, -25], [0.5, 3]])

    @pytest.mark.parametrize("field", ["abc", "1,5", "0x10", "1_0", ""])
    def test_non_numeric(self, tmp_path, field):
        text = f"1,2\n3,{field}\n" if field != "1,5" else "1,2\n3;4,5\n"
        with pytest.raises(ParseError) as err:
            load_csv(_write(tmp_path / "a.csv", text))
        assert err.value.row == 2

    def test_non_finite_is_value_error(self, tmp_path):
        with pytest.raises(ValueError) as err:
            load_csv(_write(tmp_path / "a.csv", "1,2\n3,nan\n"))
        assert not isinstance(err.value, ParseError)

    def test_too_small(self, tmp_path):
        with pytest.raises(ShapeError):
            load_csv(_write(tmp_path / "a.csv", "1,2\n"))

    def test_round_trip(self, tmp_path, rng):
        X = DataMatrix(rng.standard_normal((7, 3)) * 1e-300)
        save_csv(X, tmp_path / "x.csv")
        assert load_csv(tmp_path / "x.csv") == X


class TestBinary:
    def test_round_trip_bit_exact(self, tmp_path, rng):
        X = DataMatrix(rng.standard_normal((5, 3)))
        save_binary(X, tmp_path / "x.cmx")
        Y = load_binary(tmp_path / "x.cmx")
        assert Y.values.tobytes() == X.values.tobytes()

    def test_layout(self, tmp_path):
        save_binary(DataMatrix([[1, 2], [3, 4]]), tmp_path / "x.cmx")
        data = (tmp_path / "x.cmx").read_bytes()
        assert data[:4] == MAGIC
        assert struct.unpack("<QQ", data[4:20]) == (2, 2)
        assert struct.unpack("<4d", data[20:]) == (1, 2, 3, 4)

    def test_too_short(self, tmp_path):
        (tmp_path / "x.cmx").write_bytes(b"\0" * 10)
        with pytest.raises(FormatError):
            load_binary(tmp_path / "x.cmx")

    def test_bad_magic(self, tmp_path):
        (tmp_path / "x.cmx").write_bytes(b"CMX2" + struct.pack("<QQ4d", 2, 2, 1, 2, 3, 4))
        with pytest.raises(FormatError):
            load_binary(tmp_path / "x.cmx")

    def test_size_mismatch(self, tmp_path):
        (tmp_path / "x.cmx").write_bytes(MAGIC + struct.pack("<QQ3d", 2, 2, 1, 2, 3))
        with pytest.raises(FormatError):
            load_binary(tmp_path / "x.cmx")

    def test_load_matrix_dispatch(self, tmp_path):
        X = DataMatrix([[1, 2], [3, 4]])
        save_binary(X, tmp_path / "x.bin")
        save_csv(X, tmp_path / "x.csv")
        assert load_matrix(tmp_path / "x.bin") == X == load_matrix(tmp_path / "x.csv")


class TestColumnSummaries:
    def test_examples(self):
        s = column_summaries(DataMatrix([[1, 5, -1], [2, 5, 1], [3, 5, 1]]))
        assert (s[0].mean, s[0].css, s[0].degenerate) == (2.0, 2.0, False)
        assert (s[1].mean, s[1].css, s[1].degenerate) == (5.0, 0.0, True)
        s = column_summaries(DataMatrix([[-1, 0], [1, 1]]))
        assert (s[0].mean, s[0].css) == (0.0, 2.0)

    def test_backends_agree(self, rng):
        X = DataMatrix(rng.standard_normal((2 * BLOCK_ROWS + 17, 5)) + 3.0)
        a = column_stats(X, backend="python")
        b = column_stats(X)
        for u, v in zip(a, b):
            np.testing.assert_array_equal(u, v)

    def test_affine_equivariance(self, rng):
        X = rng.standard_normal((300, 4))
        a, b = rng.uniform(0.5, 3.0, 4), rng.uniform(-10, 10, 4)
        m0, c0, _ = column_stats(X)
        m1, c1, _ = column_stats(X * a + b)
        np.testing.assert_allclose(m1, a * m0 + b, rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(c1, a * a * c0, rtol=1e-12)

    def test_row_permutation(self, rng):
        X = rng.standard_normal((BLOCK_ROWS + 500, 6)) * 10 + 1
        perm = rng.permutation(X.shape[0])
        m0, c0, _ = column_stats(X)
        m1, c1, _ = column_stats(X[perm])
        np.testing.assert_allclose(m1, m0, rtol=1e-15)
        np.testing.assert_allclose(c1, c0, rtol=1e-15)

    @settings(max_examples=60, deadline=None)
    @given(hnp.arrays(np.float64, st.tuples(st.integers(2, 40), st.integers(2, 5)),
                      elements=st.floats(-1e6, 1e6)))
    def test_css_nonnegative_and_flag(self, arr):
        m, c, d = column_stats(arr)
        assert (c >= 0).all()
        np.testing.assert_array_equal(d, c <= 1e-12 * arr.shape[0] * np.maximum(1, m * m))
