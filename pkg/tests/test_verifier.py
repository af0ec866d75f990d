from __future__ import annotations

import csv
import io
import json
import math

import numpy as np
import pytest

from chordscope import convex_bodies as cb
from chordscope import scalar_fields as sf
from chordscope import verifier as v
from chordscope.special_functions import DomainError, ball_chord_integral, unit_ball_volume

DISK = cb.ball([0, 0], 1.0)
SQUARE = cb.polytope([[0, 0], [1, 0], [1, 1], [0, 1]])
SIMPLEX = cb.polytope([[-1, -1], [2, -1], [-1, 2]])


@pytest.mark.parametrize("alpha", [-0.5, 0.5, 1.0, 3.0])
def test_chord_power_integral_of_disk(alpha):
    assert v.chord_power_integral(DISK, alpha) == pytest.approx(ball_chord_integral(2, alpha), rel=1e-9)


def test_chord_power_integral_scaling():
    # I_{alpha+1}(lambda K) = lambda^{n+alpha} I_{alpha+1}(K)
    a = v.chord_power_integral(SQUARE, 1.5)
    b = v.chord_power_integral(SQUARE.dilate(2.0), 1.5)
    assert b / a == pytest.approx(2.0**3.5, rel=1e-10)


def test_report_serialisation():
    rep = v.check_iso_chord(SQUARE, 1.0)
    data = json.loads(rep.to_json())
    assert data["check_id"] == "iso_chord"
    assert "runtime_ms" not in data
    assert data["status"] == rep.status
    assert data["margin_status"] == rep.margin_status
    assert json.loads(rep.to_json(include_runtime=True))["runtime_ms"] >= 0


def test_csv_layout_and_runtime_column():
    reps = [v.check_iso_chord(SQUARE, 1.0), v.check_counterexample_1d()]
    rows = list(csv.reader(io.StringIO(v.reports_to_csv(reps))))
    assert rows[0] == ["check_id", "status", "min_margin", "tolerance", "runtime_ms", "terms"]
    assert [r[0] for r in rows[1:]] == ["iso_chord", "counterexample_1d"]
    assert all(r[4] == "" for r in rows[1:])
    timed = list(csv.reader(io.StringIO(v.reports_to_csv(reps, include_runtime=True))))
    assert all(float(r[4]) >= 0 for r in timed[1:])


def test_counterexample_report():
    rep = v.check_counterexample_1d()
    values = dict(rep.terms)
    assert values["c_(1,1) R_1 f"] == pytest.approx(2 / 3, abs=1e-12)
    assert values["c_(1,1/2) R_1/2 f"] == pytest.approx(16 / 25, abs=1e-12)
    assert rep.margins[0] == pytest.approx(2 / 75, abs=1e-12)
    assert rep.status == v.HOLDS


def test_iso_chord_identity_case_records_value():
    rep = v.check_iso_chord(SQUARE, 2.0)
    assert rep.status == v.EQUALITY
    assert rep.details["identity_value"] == pytest.approx(3.0 / math.pi)


def test_thm1_preconditions():
    with pytest.raises(DomainError):
        v.check_thm1(DISK, 2.0)
    with pytest.raises(DomainError):
        v.check_thm3(DISK, 1.5)


def test_thm1_monte_carlo_attached():
    rep = v.check_thm1(DISK, 1.0, mc_samples=200_000, seed=1)
    assert rep.details["mc_agrees_3sigma"]
    assert rep.std_errors and rep.std_errors[0] > 0
    assert rep.status == v.EQUALITY


def test_thm1_double_integral_equals_scaled_chord_integral_for_indicators():
    rep = v.check_thm1(SQUARE, 1.0)
    double = dict(rep.terms)["double_integral"]
    expected = v.chord_power_integral(SQUARE, 1.0) * 2 * unit_ball_volume(2) / 2.0
    assert double == pytest.approx(expected, rel=1e-10)


def test_violation_is_detected():
    # shrinking the outer body below the chain must be reported
    rep = v.check_thm4(sf.exp_gauge(1.0, SIMPLEX), (2.0, 0.5), pi_star_factor=0.5)
    assert rep.status == v.VIOLATED
    assert rep.min_margin < 0


def test_thm4_factor_diagnostics():
    rep = v.check_thm4(sf.exp_gauge(1.0, SIMPLEX), (2.0, 0.5))
    assert rep.details["gap_to_norm1_pi_star"] < 1e-10
    assert rep.details["spread_across_alpha"] < 1e-10


def test_thm5_requires_cone():
    with pytest.raises(DomainError):
        v.check_thm5(sf.exp_gauge(1.0, SIMPLEX))


def test_gz55_accepts_alpha_zero():
    rep = v.check_gz55(SIMPLEX, (1.0, 0.0, -0.5))
    assert rep.status == v.EQUALITY


def test_riesz_regime_validation():
    with pytest.raises(DomainError):
        v.check_riesz(SQUARE, 3.0, "sub_n")
    with pytest.raises(DomainError):
        v.check_riesz(SQUARE, 1.0, "super_n")


def test_riesz_ellipse_equality_under_affine_invariance():
    E = cb.ellipsoid([0, 0], np.diag([2.0, 1.0]))
    rep = v.check_riesz(E, 1.0, "sub_n")
    assert rep.status == v.EQUALITY


def test_limits_report_shape():
    rep = v.check_limits(sf.cone_power(1.0, SIMPLEX, s=1.0))
    names = [name for name, _ in rep.terms]
    assert names == ["allowed_gap", "gap_minus_one", "gap_infinity"]
    assert rep.status != v.VIOLATED
    exp_rep = v.check_limits(sf.exp_gauge(1.0, SIMPLEX))
    assert [name for name, _ in exp_rep.terms] == ["allowed_gap", "gap_minus_one"]


def test_registry():
    assert set(v.CHECKS) == {
        "iso_chord", "thm1", "thm2", "thm3", "thm4", "thm5", "gz55", "riesz", "counterexample_1d", "limits",
    }
