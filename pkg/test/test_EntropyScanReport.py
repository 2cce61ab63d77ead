from EntropyScanReport import (
    INFINITE_LENGTH,
    SCAN_COLUMNS,
    SCAN_DF_TYPE_DICT,
    ScanRow,
    emit_csv,
    ingest_scan_csv,
    preset_infinite_rows,
    rows_to_frame,
    scan_finite,
    scan_infinite,
    snap_filling,
)
from LogCombinatorics import DomainError
from fractions import Fraction
import io
import math
import pytest


class TestSnapFilling:

    def test_snap_filling_rounds_half_up(self):
        """
        Test snapping to N = round(p L) with halves rounding up.
        """
        assert snap_filling(20, Fraction(1, 2)) == (10, 0.5)
        assert snap_filling(25, "1/10") == (3, 0.12)
        assert snap_filling(15, Fraction(1, 10)) == (2, 2 / 15)

    def test_snap_filling_rejects_polarized_result(self):
        """
        Test that fillings snapping to N = 0 or N = L are rejected.
        """
        with pytest.raises(DomainError):
            snap_filling(20, Fraction(1, 100))
        with pytest.raises(DomainError):
            snap_filling(20, Fraction(99, 100))
        with pytest.raises(DomainError):
            snap_filling(20, 1)


class TestScans:

    def test_scan_finite_rows(self):
        """
        Test a finite scan of L = 20 at half filling over n = 1..10.
        """
        rows = scan_finite(20, Fraction(1, 2), (1, 10))
        assert len(rows) == 10
        assert [row.n for row in rows] == list(range(1, 11))
        assert all(row.L == 20 and row.N == 10 and row.p == 0.5 for row in rows)
        assert rows[-1].S_exact > rows[0].S_exact
        for row in rows:
            assert row.abs_error == pytest.approx(row.recomputed_error(), abs=1e-12)
            assert row.npq_eff == pytest.approx(row.n * 0.25 * (20 - row.n) / 20)

    def test_scan_finite_step(self):
        """
        Test the block size increment.
        """
        rows = scan_finite(100, "1/10", (5, 95), step=10)
        assert [row.n for row in rows] == list(range(5, 96, 10))
        assert all(row.N == 10 for row in rows)

    def test_scan_finite_range_checks(self):
        """
        Test rejection of empty, out-of-range and badly stepped ranges.
        """
        with pytest.raises(DomainError):
            scan_finite(20, Fraction(1, 2), (10, 5))
        with pytest.raises(DomainError):
            scan_finite(20, Fraction(1, 2), (0, 5))
        with pytest.raises(DomainError):
            scan_finite(20, Fraction(1, 2), (1, 20))
        with pytest.raises(DomainError):
            scan_finite(20, Fraction(1, 2), (1, 5), step=0)

    def test_scan_infinite_accuracy(self):
        """
        Test that the infinite scan reaches abs_error < 0.005 at n = 1000 for p = 1/2.
        """
        rows = scan_infinite(Fraction(1, 2), (1, 1000), step=333)
        assert [row.n for row in rows] == [1, 334, 667, 1000]
        assert rows[-1].abs_error < 0.005
        assert all(row.L == INFINITE_LENGTH and row.N is None for row in rows)

    def test_scan_infinite_small_filling_converges_slowly(self):
        """
        Test that p = 1/100 rows carry larger errors than p = 1/2 rows at equal n.
        """
        slow = scan_infinite(Fraction(1, 100), (10, 100), step=30)
        fast = scan_infinite(Fraction(1, 2), (10, 100), step=30)
        for a, b in zip(slow, fast):
            assert a.abs_error > b.abs_error

    def test_scan_finite_monotone_in_length(self):
        """
        Test that the exact entropy at fixed n grows with L at fixed filling.
        """
        values = [scan_finite(L, Fraction(1, 2), (10, 10))[0].S_exact for L in (20, 50, 100, 150, 200)]
        assert all(a < b for a, b in zip(values, values[1:]))

    def test_scan_parallel_matches_serial(self):
        """
        Test that workers do not change the rows or their order.
        """
        serial = scan_finite(200, Fraction(1, 10), (1, 199))
        parallel = scan_finite(200, Fraction(1, 10), (1, 199), workers=3)
        assert serial == parallel

    def test_scan_finite_bounds_and_peak(self):
        """
        Test a full scan at (200, 1/10): entropies below log2(n + 1), peak at n = L/2, error shrinking by n = 100.
        """
        rows = scan_finite(200, Fraction(1, 10), (1, 199))
        for row in rows:
            assert row.S_exact <= math.log2(row.n + 1) + 1e-9, f"bound violated at n={row.n}"
        peak = max(rows, key=lambda row: row.S_exact)
        assert peak.n == 100
        by_n = {row.n: row for row in rows}
        assert by_n[100].abs_error < by_n[5].abs_error

    def test_preset_infinite_rows(self):
        """
        Test the infinite preset covers three fillings up to n = 1000.
        """
        rows = preset_infinite_rows()
        assert len(rows) == 3000
        assert sorted({row.p for row in rows}) == [0.01, 0.1, 0.5]


class TestCsv:

    def test_header_only_for_empty_rows(self):
        """
        Test that no rows produce only the header line and return 0.
        """
        buffer = io.StringIO()
        assert emit_csv([], buffer) == 0
        assert buffer.getvalue() == "L,n,p,N,S_exact,S_asymptotic,abs_error,npq_eff\n"

    def test_finite_and_infinite_rows_format(self):
        """
        Test the inf literal, empty N field, 12 significant digits and LF endings.
        """
        rows = [
            ScanRow.from_values(20, 10, 0.5, 10, 2.0, 1.5, 2.5),
            ScanRow.from_values(INFINITE_LENGTH, 3, 0.1, None, 1 / 3, 0.25, 0.27),
        ]
        buffer = io.StringIO()
        assert emit_csv(rows, buffer) == 2
        lines = buffer.getvalue().split("\n")
        assert lines[1] == "20,10,0.5,10,2,1.5,0.5,2.5"
        assert lines[2] == "inf,3,0.1,,0.333333333333,0.25,0.083333333333,0.27"
        assert lines[3] == ""
        assert "\r" not in buffer.getvalue()

    def test_csv_round_trip_recomputes_errors(self, tmp_path):
        """
        Test that rows read back keep abs_error = |S_exact - S_asymptotic| within 1e-12.
        """
        rows = scan_finite(50, Fraction(1, 10), (1, 49)) + scan_infinite(Fraction(1, 2), (1, 30))
        path = tmp_path / "scan.csv"
        emit_csv(rows, str(path))
        back = ingest_scan_csv(str(path))
        assert len(back) == len(rows)
        for original, row in zip(rows, back):
            assert row.L == original.L
            assert row.N == original.N
            assert row.n == original.n
            assert row.abs_error == pytest.approx(row.recomputed_error(), abs=1e-12)
            assert row.S_exact == pytest.approx(original.S_exact, rel=1e-11)

    def test_rows_to_frame_types(self):
        """
        Test that the frame carries SCAN_DF_TYPE_DICT dtypes in column order.
        """
        frame = rows_to_frame(scan_finite(20, Fraction(1, 2), (1, 3)))
        assert list(frame.columns) == SCAN_COLUMNS
        for col, dtype in SCAN_DF_TYPE_DICT.items():
            assert frame[col].dtype == dtype, f"Column {col} has incorrect dtype"
