import math

import pytest

from submanifold_ot.inequalities.report import (
    REPORT_KEYS,
    InequalityReport,
    read_report_rows,
    write_reports_csv,
)


@pytest.fixture
def report():
    return InequalityReport(
        name="weighted_isoperimetric",
        lhs=3.0,
        rhs=4.0,
        surface="flat-disc",
        params={"radius": 1.0},
        resolution=(32, 32),
        constants={"omega_n": math.pi},
    )


def test_margins(report):
    assert report.margin == 1.0
    assert report.relative_margin == 0.25
    assert report.holds()


def test_violated_report_within_tolerance():
    report = InequalityReport(name="x", lhs=1.001, rhs=1.0, surface="s")
    assert not report.holds()
    assert report.holds(tolerance=1e-2)


def test_to_dict_keys(report):
    data = report.to_dict()
    assert tuple(data) == REPORT_KEYS
    assert data["resolution"] == [32, 32]
    assert '"relative_margin": 0.25' in report.to_json()


@pytest.mark.parametrize("lhs, rhs", [(math.nan, 1.0), (1.0, math.inf), (1.0, 0.0), (1.0, -2.0)])
def test_rejects_bad_values(lhs, rhs):
    with pytest.raises(ValueError):
        InequalityReport(name="x", lhs=lhs, rhs=rhs, surface="s")


def test_csv_round_trip(tmp_path, report):
    other = InequalityReport(
        name="lp_sobolev", lhs=0.1, rhs=0.3, surface="sphere-cap",
        flags={"holder_homogeneous_rhs": True},
    )
    path = write_reports_csv([report, other], tmp_path / "out" / "reports.csv")
    rows = read_report_rows(path)
    assert [row["name"] for row in rows] == ["weighted_isoperimetric", "lp_sobolev"]
    assert rows[0]["lhs"] == 3.0
    assert rows[0]["params"] == {"radius": 1.0}
    assert rows[0]["resolution"] == [32, 32]
    assert rows[1]["relative_margin"] == other.relative_margin
    assert rows[1]["flags"] == {"holder_homogeneous_rhs": True}


def test_read_rejects_foreign_csv(tmp_path):
    path = tmp_path / "foreign.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError, match="missing columns"):
        read_report_rows(path)
