"""Box tables, decay-rate fits, oscillation diagnostics, CSV round trips."""

import math

import pytest

from boxdim.dimension import (BoxRow, DimensionFit, KIND_BOX_DIM,
                              KIND_CESARO, KIND_TRANSFINITE, cesaro_values,
                              fit_dB, fit_tau, fit_tau_cesaro,
                              flags_oscillation, load_box_table, load_fits,
                              save_box_table, save_fits, segment_spreads,
                              tau_inner_values, validate_box_table)
from boxdim.errors import FormatError, InputError, PreconditionError


def test_box_row_validation():
    row = BoxRow(3, 2, 4, "Exact", 16)
    assert row.log_ratio == pytest.approx(math.log(4 / 16))
    with pytest.raises(InputError):
        BoxRow(1, 2, 4, "Exact", 16)  # ell too small
    with pytest.raises(InputError):
        BoxRow(3, 2, 0, "Exact", 16)  # empty cover
    with pytest.raises(InputError):
        BoxRow(3, 2, 17, "Exact", 16)  # more boxes than vertices
    with pytest.raises(InputError):
        BoxRow(3, 2, 4, "Guess", 16)  # unknown method


def test_log_ratio_survives_huge_integer_counts():
    # counts too large for floats must still give finite log ratios
    count = 6 ** 400
    size = 6 ** 401
    row = BoxRow(3, 1000, count, "LowerBound", size)
    assert row.log_ratio == pytest.approx(-math.log(6))


def test_validate_box_table_rejects_conflicts():
    validate_box_table([BoxRow(3, 1, 2, "LowerBound", 8),
                        BoxRow(3, 1, 4, "UpperBound", 8),
                        BoxRow(3, 1, 3, "Exact", 8)])
    with pytest.raises(InputError, match="size"):
        validate_box_table([BoxRow(3, 1, 2, "Exact", 8),
                            BoxRow(3, 1, 2, "Greedy", 9)])
    with pytest.raises(InputError, match="Exact"):
        validate_box_table([BoxRow(3, 1, 2, "Exact", 8),
                            BoxRow(3, 1, 3, "Exact", 8)])
    with pytest.raises(InputError, match="sandwich"):
        validate_box_table([BoxRow(3, 1, 2, "Exact", 8),
                            BoxRow(3, 1, 3, "LowerBound", 8)])
    with pytest.raises(InputError):
        validate_box_table([BoxRow(3, 1, 5, "LowerBound", 8),
                            BoxRow(3, 1, 3, "UpperBound", 8)])


def test_table_csv_round_trip(tmp_path):
    rows = [BoxRow(3, 2, 9, "Exact", 27), BoxRow(5, 2, 3, "Greedy", 27)]
    path = tmp_path / "t.csv"
    save_box_table(rows, path)
    assert load_box_table(path) == rows
    save_box_table([BoxRow(7, 2, 1, "LowerBound", 27)], path, append=True)
    assert len(load_box_table(path)) == 3


def test_table_csv_errors_carry_line_numbers(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("ell,n,count,method,size\n3,1,2,Exact\n")
    with pytest.raises(FormatError, match="bad.csv:2"):
        load_box_table(path)
    path.write_text("wrong,header\n")
    with pytest.raises(FormatError, match="header"):
        load_box_table(path)


def test_power_law_is_recovered_exactly():
    # count/size = ell^-2 exactly: log ratio = -2 log ell
    rows = []
    size = 2 ** 40
    for ell in (2, 4, 8, 16):
        rows.append(BoxRow(ell, 1, size // ell ** 2, "Exact", size))
    fit = fit_dB(rows)
    assert fit.kind == KIND_BOX_DIM
    assert fit.slope == pytest.approx(2.0)
    assert fit.max_residual < 1e-12
    assert fit.bracket is None


def test_exponential_decay_is_recovered_exactly():
    # count/size = e^{-0.7 ell} up to rounding on huge integers
    rows = []
    size = 10 ** 60
    for ell in (2, 3, 5, 8, 13):
        rows.append(BoxRow(ell, 1, round(size * math.exp(-0.7 * ell)),
                           "Exact", size))
    fit = fit_tau(rows)
    assert fit.kind == KIND_TRANSFINITE
    assert fit.slope == pytest.approx(0.7, abs=1e-9)
    assert fit.looks_linear(1e-6)


def test_fit_needs_three_ells_and_rejects_flat_x():
    rows = [BoxRow(3, 1, 2, "Exact", 8), BoxRow(5, 1, 1, "Exact", 8)]
    with pytest.raises(PreconditionError):
        fit_tau(rows)
    with pytest.raises(PreconditionError):
        fit_tau([])


def test_fit_prefers_largest_n_per_ell():
    rows = [BoxRow(3, 1, 7, "Exact", 8),
            BoxRow(3, 2, 9, "Exact", 64),   # larger n wins
            BoxRow(5, 2, 3, "Exact", 64),
            BoxRow(7, 2, 1, "Exact", 64)]
    fit = fit_tau(rows)
    first = dict(fit.points)[-3.0]
    assert first == pytest.approx(math.log(9 / 64))
    assert first != pytest.approx(math.log(7 / 8))


def test_bound_pairs_produce_a_bracket():
    rows = []
    size = 3 ** 12
    for ell in (3, 5, 7, 9):
        k = (ell - 1) // 2
        hi_count = 2 * 3 ** (12 - k)
        rows.append(BoxRow(ell, 12, hi_count // 2, "LowerBound", size))
        rows.append(BoxRow(ell, 12, hi_count, "UpperBound", size))
    fit = fit_tau(rows)
    assert fit.bracket is not None
    lo, hi = fit.bracket
    assert lo <= fit.slope <= hi
    # both sides decay at log(3)/2; the offset only shifts the intercept
    assert lo == pytest.approx(math.log(3) / 2)
    assert hi == pytest.approx(math.log(3) / 2)


def test_one_sided_bounds_are_rejected():
    rows = [BoxRow(3, 1, 2, "LowerBound", 8),
            BoxRow(5, 1, 1, "LowerBound", 8),
            BoxRow(7, 1, 1, "LowerBound", 8)]
    with pytest.raises(PreconditionError, match="upper"):
        fit_tau(rows)


def test_cesaro_values_average_the_inner_sequence():
    rows = []
    for i in (1, 2, 3):
        rows.append(BoxRow(3, 3 + i, 2 ** (3 + i - 1), "Exact", 2 ** (3 + i)))
        rows.append(BoxRow(5, 5 + i, 2 ** (5 + i - 2), "Exact", 2 ** (5 + i)))
    values = dict(cesaro_values(rows))
    assert values[3] == pytest.approx(math.log(2) / 3)
    assert values[5] == pytest.approx(2 * math.log(2) / 5)
    fit = fit_tau_cesaro(rows)
    assert fit.kind == KIND_CESARO
    assert fit.slope == pytest.approx(2 * math.log(2) / 5)


def test_cesaro_requires_complete_index_range():
    rows = [BoxRow(3, 4, 4, "Exact", 8), BoxRow(3, 6, 16, "Exact", 32)]
    with pytest.raises(PreconditionError, match="missing"):
        cesaro_values(rows)


def test_inner_values_and_oscillation_flags():
    rows = [BoxRow(3, n, 2 ** (n - 1) if n % 2 else 2 ** (n - 2),
                   "Exact", 2 ** n) for n in range(4, 16)]
    inner = tau_inner_values(rows, 3)
    values = [v for _, v in inner]
    spreads = segment_spreads(values, 3)
    assert all(s > 0.2 for s in spreads)
    assert flags_oscillation(values, 0.2)
    assert not flags_oscillation(values, 10.0)
    with pytest.raises(InputError):
        segment_spreads(values, 0)


def test_fits_csv_round_trip(tmp_path):
    f1 = DimensionFit(KIND_TRANSFINITE, ((-3.0, -1.0), (-5.0, -2.0),
                                         (-7.0, -3.0)),
                      0.5, 0.5, 0.0, bracket=(0.4, 0.6))
    f2 = DimensionFit(KIND_BOX_DIM, ((-1.0, -1.0), (-2.0, -2.0),
                                     (-3.0, -3.0)), 1.0, 0.0, 0.0)
    path = tmp_path / "fits.csv"
    save_fits([f1, f2], path)
    back = load_fits(path)
    assert back[0].slope == f1.slope and back[0].bracket == f1.bracket
    assert back[1].bracket is None
    with pytest.raises(FormatError):
        load_fits(__file__)


def test_dimension_fit_validates_bracket():
    with pytest.raises(InputError):
        DimensionFit(KIND_TRANSFINITE, (), 1.0, 0.0, 0.0, bracket=(2.0, 3.0))
    with pytest.raises(InputError):
        DimensionFit("Mystery", (), 1.0, 0.0, 0.0)
    fit = DimensionFit(KIND_TRANSFINITE, (), 1.0, 0.0, 0.05)
    assert fit.within(1.02, 0.05)
    assert not fit.within(1.2, 0.05)
