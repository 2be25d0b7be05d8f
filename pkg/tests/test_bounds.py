import math

import pytest
from hypothesis import given, strategies as st

from chromplane import datasets
from chromplane.bounds import (BoundEntry, BoundsLedger, BoundsRecord, WitnessError,
                               asymptotic_chi_bounds, compute_islands, egraph_point, extrapolate,
                               lower_envelope, monotonicity_violations, record_from_witness,
                               table_csv, table_rows, table_text)
from chromplane.colorsat import SolveOutcome, Status
from chromplane.packing import PackingResult
from chromplane.tilings import TilingReport, bundled_tiling, verify_tiling


def reference():
    return datasets.reference_ledger()


def test_island_examples():
    rows = {r.chi: r for r in compute_islands(reference().records())}
    assert (rows[8].d_min, rows[8].d_max, rows[8].status) == (1.387777, 1.444157, "island")
    assert (rows[10].d_min, rows[10].d_max, rows[10].status) == (1.764, 1.732051, "empty")


def test_touching_bounds_are_not_an_island():
    recs = [BoundsRecord(4, d_ub=1.5), BoundsRecord(5), BoundsRecord(6, d_lb=1.5)]
    assert compute_islands(recs)[1].status == "empty"


def test_missing_neighbour_is_unknown():
    assert compute_islands([BoundsRecord(5, d_lb=1.0)])[0].status == "unknown"


def test_round_trip_reproduces_columns():
    rows = {r.chi: r for r in compute_islands(reference().records())}
    for ref in datasets.main_table():
        row = rows[ref["chi"]]
        assert row.d_min == ref["min"] and row.d_max == ref["max"]
    statuses = {c: rows[c].status for c in range(7, 17)}
    assert {c for c, s in statuses.items() if s == "island"} == {7, 8, 9, 12, 13}


def test_prediction_flag():
    preds = {r["chi"]: r["pred"] for r in datasets.main_table()}
    rows = {r.chi: r for r in compute_islands(reference().records(), preds)}
    assert [c for c in range(7, 17) if rows[c].predicted] == [14, 15, 16]


def test_reference_bounds_are_monotone():
    assert monotonicity_violations(reference().records()) == []


def test_monotonicity_violation_detected():
    recs = [BoundsRecord(7, d_lb=1.4), BoundsRecord(8, d_lb=1.3)]
    assert monotonicity_violations(recs)


def test_ledger_keeps_the_best_and_persists(tmp_path):
    path = tmp_path / "ledger.jsonl"
    led = BoundsLedger(path)
    assert led.add(BoundEntry(8, "ub", 1.6))
    assert led.add(BoundEntry(8, "ub", 1.55))
    assert not led.add(BoundEntry(8, "ub", 1.7))
    assert led.add(BoundEntry(8, "lb", 1.3))
    assert not led.add(BoundEntry(8, "lb", 1.2))
    again = BoundsLedger(path)
    assert again.best(8, "ub").d == 1.55 and again.best(8, "lb").d == 1.3
    assert len(path.read_text().splitlines()) == 3


def test_bad_ledger_line(tmp_path):
    path = tmp_path / "ledger.jsonl"
    path.write_text('{"chi": 7, "kind": "lb", "d": 1.0}\n{"chi": 7, "kind": "up", "d": 1.0}\n')
    with pytest.raises(ValueError, match=":2:"):
        BoundsLedger(path)


def test_entry_validation():
    with pytest.raises(ValueError):
        BoundEntry(7, "lb", -1.0)
    with pytest.raises(ValueError):
        BoundEntry(7, "lb", 1.0, provenance_class="rumour")


@given(st.lists(st.tuples(st.integers(6, 12), st.sampled_from(["lb", "ub", "ub_clique"]),
                          st.floats(0.5, 3.0)), max_size=30))
def test_dominated_witnesses_leave_the_ledger_unchanged(items):
    led = BoundsLedger()
    led.extend(BoundEntry(c, k, d) for c, k, d in items)
    before = [(r.chi, r.d_lb, r.d_ub, r.d_ub_clique) for r in led.records()]
    for c, k, d in items:
        worse = d - 0.1 if k == "lb" else d + 0.1
        if worse >= 0:
            led.add(BoundEntry(c, k, worse))
    assert [(r.chi, r.d_lb, r.d_ub, r.d_ub_clique) for r in led.records()] == before


def test_two_point_fit():
    fit = extrapolate([(1, 2), (2, 3)])
    assert (fit.slope, fit.intercept) == pytest.approx((1.0, 1.0), abs=1e-15)


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0.01, 1), st.floats(0.02, 1))
def test_fit_interpolates_two_points(d1, d2, r1, r2):
    if abs(r1 - r2) < 1e-3:
        return
    fit = extrapolate([(r1, d1), (r2, d2)])
    assert fit.predict(r1) == pytest.approx(d1, abs=1e-9)
    assert fit.predict(r2) == pytest.approx(d2, abs=1e-9)


def test_constant_fit_and_errors():
    assert extrapolate([(0.1, 1.5), (0.2, 1.5), (0.3, 1.5)]).slope == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        extrapolate([(0.1, 1.0), (0.1, 2.0)])
    with pytest.raises(ValueError):
        extrapolate([(0.1, 1.0)])


def test_seven_colour_record_rows_extrapolate_to_row_eight():
    # the k=7 record graphs certify chi >= 8, whose predicted d_min is listed in row 8
    rows = [r for r in datasets.record_graphs() if r["k"] == 7]
    fit = extrapolate(egraph_point(r["a"], r["b"]) for r in rows)
    assert fit.intercept == pytest.approx(1.323, abs=0.05)
    assert fit.slope == pytest.approx(1.72, abs=0.4)


def test_lower_envelope():
    pts = lower_envelope([(13, 21), (13, 19), (19, 28)])
    assert pts == [egraph_point(13, 19), egraph_point(19, 28)]


def test_asymptotics():
    lo, hi = asymptotic_chi_bounds(1.0)
    assert (lo, hi) == (4 / 3, math.pi / math.sqrt(3))
    assert asymptotic_chi_bounds(3.0) == pytest.approx((12.0, 16.3242), abs=1e-4)
    assert math.sqrt(hi / lo) == pytest.approx(7 / 6, rel=0.01)
    with pytest.raises(ValueError):
        asymptotic_chi_bounds(0.5)


def test_witness_conversions():
    unsat = SolveOutcome(Status.UNSAT, detail={"instance": {"m": 5, "a": 57, "b": 133}})
    e = record_from_witness(unsat, colors=8)
    assert (e.chi, e.kind) == (8, "ub") and e.d == pytest.approx(1.52753, abs=1e-5)
    w = SolveOutcome(Status.UNSAT, detail={"instance": {"p": 294, "c": 12, "d": 1.764}})
    assert record_from_witness(w, colors=9).d == 1.764
    assert record_from_witness(SolveOutcome(Status.SAT, [0]), colors=8) is None
    pk = PackingResult.from_points([(0, 0), (1, 0), (0.5, math.sqrt(3) / 2)])
    e = record_from_witness(pk)
    assert (e.chi, e.kind, e.d) == (6, "ub_clique", pytest.approx(1.0))
    rep = verify_tiling(bundled_tiling(9))
    e = record_from_witness(rep, colors=9)
    assert (e.chi, e.kind) == (10, "lb") and e.d == pytest.approx(math.sqrt(3), abs=1e-9)


def test_unverified_witnesses_rejected():
    with pytest.raises(WitnessError):
        record_from_witness(PackingResult.from_points([(0, 0), (0.5, 0), (1, 0)]))
    bad = TilingReport(1.0, 0.0, [{"kind": "touch"}])
    with pytest.raises(WitnessError):
        record_from_witness(bad, colors=3)
    with pytest.raises(WitnessError):
        record_from_witness(SolveOutcome(Status.UNSAT), colors=7)


def test_table_export_matches_reference():
    preds = {r["chi"]: (r["pred"], r["slope"]) for r in datasets.main_table()}
    rows = table_rows(reference(), preds, range(7, 17))
    ref = {r["chi"]: r for r in datasets.main_table()}
    for row in rows:
        for col in ("lower", "min", "max", "upper", "clique"):
            assert row[col] == ref[row["chi"]][col]
    text = table_text(rows)
    assert "1.387777" in text and len(text.splitlines()) == 11
    assert table_csv(rows).splitlines()[0] == "chi,status,lower,min,max,upper,clique,pred,slope"
