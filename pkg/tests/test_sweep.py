"""Tests for the sweep layer: grids, rows, serialization, derived studies."""

import dataclasses
import json
import math

import numpy as np
import pytest

from adicke import (ModelParams, SweepSpec, convergence_scan, gamma_comparison,
                    peak_locate, ratio_scan, rows_to_csv, run_sweep, write_csv,
                    write_json)
from adicke.sweep import CSV_COLUMNS, SweepRow, continuity_report, evaluate_point


def small_spec(**kw):
    base = dict(model="co_np", param="g", start=0.2, stop=0.8, points=4,
                gamma=2.0, eta=1.0, j=2.0, n_max=30)
    base.update(kw)
    return SweepSpec(**base)


# ---------------------------------------------------------------------------
# validation and grids


def test_validation_rejects_bad_specs():
    with pytest.raises(ValueError, match="model"):
        small_spec(model="nope").validate()
    with pytest.raises(ValueError, match="grid"):
        small_spec(points=1).validate()
    with pytest.raises(ValueError, match="spacing"):
        small_spec(spacing="cubic").validate()
    with pytest.raises(ValueError, match="positive endpoints"):
        small_spec(spacing="log", start=0.0).validate()
    with pytest.raises(ValueError, match="labels"):
        small_spec(labels=("omega",)).validate()
    with pytest.raises(ValueError, match="one-mode"):
        small_spec(model="cs_np", method="analytic").validate()
    with pytest.raises(ValueError, match="gamma = 1"):
        small_spec(method="analytic", gamma=2.0).validate()
    with pytest.raises(ValueError, match="workers"):
        small_spec(workers=0).validate()


def test_grid_spacings():
    lin = small_spec(points=5).grid()
    assert np.allclose(lin, np.linspace(0.2, 0.8, 5))
    log = small_spec(spacing="log", start=0.1, stop=10.0, points=3).grid()
    assert np.allclose(log, [0.1, 1.0, 10.0])


def test_point_params_for_primary_sweep():
    spec = small_spec(param="theta", start=0.0, stop=1.0, g=0.5)
    p = spec.point_params(0.7)
    assert p.theta == 0.7 and p.g == pytest.approx(0.5)


# ---------------------------------------------------------------------------
# row production


def test_decoupled_line_has_zero_tensor_columns():
    rows = run_sweep(small_spec(param="theta", start=0.0, stop=1.0, points=3, g=0.0))
    for row in rows:
        assert row.G_omega_omega == pytest.approx(0.0, abs=1e-12)
        assert row.G_theta_theta == pytest.approx(0.0, abs=1e-12)
        assert row.F_theta_omega == pytest.approx(0.0, abs=1e-12)
        assert row.I_omega_omega == pytest.approx(0.0, abs=1e-12)
        assert row.converged


def test_row_identity_qfi_equals_four_metric():
    rows = run_sweep(small_spec(points=5))
    for row in rows:
        assert row.I_omega_omega == pytest.approx(4.0 * row.G_omega_omega, abs=1e-12)


def test_auto_cs_curvature_changes_sign_across_transition():
    spec = SweepSpec(model="auto_cs", param="g", start=0.6, stop=1.4, points=5,
                     gamma=2.0, eta=1.0, j=10.0, n_max=24, n_max_b=24)
    rows = run_sweep(spec)
    below = [r for r in rows if r.g < 1.0 - 1e-9]
    above = [r for r in rows if r.g > 1.0 + 1e-9]
    assert all(r.F_theta_omega > 0 for r in below)
    assert all(r.F_theta_omega < 0 for r in above)
    assert all(r.branch == "np" for r in below)
    assert all(r.branch == "sp" for r in above)


def test_one_mode_swap_symmetry_in_rows():
    rows_a = run_sweep(small_spec(gamma=2.0, points=3, theta=0.3))
    rows_b = run_sweep(small_spec(gamma=0.5, points=3, theta=0.3))
    for ra, rb in zip(rows_a, rows_b):
        assert ra.I_omega_omega == pytest.approx(rb.I_omega_omega, abs=1e-8)


def test_failed_points_become_flagged_rows():
    # a superradiant builder swept through the normal phase cannot evaluate there
    spec = SweepSpec(model="cs_sp", param="g", start=0.8, stop=1.2, points=3,
                     gamma=2.0, eta=1.0, j=4.0, n_max=16, n_max_b=16)
    rows = run_sweep(spec)
    assert len(rows) == 3
    assert not rows[0].converged and math.isnan(rows[0].I_omega_omega)
    assert rows[2].converged and math.isfinite(rows[2].I_omega_omega)


def test_fd_exclusion_zone_flags_rows():
    spec = small_spec(method="fd", start=0.999, stop=1.004, points=2, n_max=40)
    rows = [evaluate_point(spec, 0.9995), evaluate_point(spec, 0.95)]
    assert not rows[0].converged
    assert rows[1].converged


def test_analytic_method_rows():
    spec = SweepSpec(model="auto_co", param="g", start=0.5, stop=0.9, points=3,
                     gamma=1.0, method="analytic", n_max=30, j=2.0)
    rows = run_sweep(spec)
    for row in rows:
        assert row.F_theta_omega > 0
        assert math.isnan(row.I_omega_omega)
        assert row.method == "analytic"


def test_continuity_report_mentions_both_sides():
    spec = SweepSpec(model="auto_co", param="g", start=0.9, stop=1.1, points=3,
                     gamma=1.0, j=2.0, n_max=30)
    text = continuity_report(spec)
    assert "E(1-1e-06)" in text and "E(1+1e-06)" in text


# ---------------------------------------------------------------------------
# determinism and serialization


def test_csv_fixed_header_and_format():
    rows = run_sweep(small_spec(points=2))
    text = rows_to_csv(rows)
    lines = text.strip().split("\n")
    assert lines[0] == ",".join(CSV_COLUMNS)
    first = lines[1].split(",")
    assert first[0] == format(rows[0].g, ".17e")
    assert first[CSV_COLUMNS.index("converged")] == "true"


def test_parallel_serial_equivalence():
    spec = small_spec(points=6, workers=3)
    parallel = rows_to_csv(run_sweep(spec))
    serial = rows_to_csv(run_sweep(dataclasses.replace(spec, workers=1)))
    assert parallel == serial


def test_rerun_is_byte_identical(tmp_path):
    spec = small_spec(points=4)
    path_a = tmp_path / "a.csv"
    path_b = tmp_path / "b.csv"
    write_csv(run_sweep(spec), str(path_a))
    write_csv(run_sweep(spec), str(path_b))
    assert path_a.read_bytes() == path_b.read_bytes()


def test_json_round_trip(tmp_path):
    rows = run_sweep(small_spec(points=3))
    path = tmp_path / "rows.json"
    write_json(rows, str(path))
    loaded = json.loads(path.read_text())
    assert len(loaded) == 3
    assert list(loaded[0].keys()) == list(CSV_COLUMNS)
    assert loaded[1]["I_omega_omega"] == pytest.approx(rows[1].I_omega_omega, rel=1e-15)


# ---------------------------------------------------------------------------
# derived studies


def _independent_dicke_qfi(lam, j, n_max):
    """QFI of omega for the symmetric-coupling model, built from scratch."""
    import numpy as np
    sdim = int(2 * j) + 1
    dim = (n_max + 1) * sdim
    a = np.zeros((n_max + 1, n_max + 1))
    a[np.arange(n_max), np.arange(1, n_max + 1)] = np.sqrt(np.arange(1, n_max + 1))
    m = -j + np.arange(sdim)
    jz = np.diag(m)
    jp = np.zeros((sdim, sdim))
    jp[np.arange(1, sdim), np.arange(sdim - 1)] = np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] + 1))
    eye_b, eye_s = np.eye(n_max + 1), np.eye(sdim)
    num = np.kron(a.T @ a, eye_s)
    ham = (num + np.kron(eye_b, jz)
           + (lam / math.sqrt(2 * j)) * np.kron(a + a.T, jp + jp.T))
    energies, states = np.linalg.eigh(ham)
    coeffs = states.conj().T @ (num @ states[:, 0])
    weights = np.zeros(dim)
    weights[1:] = 1.0 / (energies[1:] - energies[0]) ** 2
    return 4 * float(np.sum(np.abs(coeffs) ** 2 * weights))


def test_gamma_comparison_symmetric_limit_and_reduction_oracle():
    gammas = [1 / 3, 0.5, 1.0, 2.0, 3.0]
    result = gamma_comparison(0.9, gammas, "co_np", j=2.0, n_max=40)
    assert result.reciprocal_asymmetry < 1e-8
    full = gamma_comparison(0.9, [1.0], "full", j=2.0, n_max=24, sector="full")
    lam = 0.9 / 2  # symmetric couplings at g = 0.9 on resonance
    oracle = _independent_dicke_qfi(lam, 2.0, 24)
    assert full.entries[0][1] == pytest.approx(oracle, rel=1e-9)


def test_gamma_comparison_full_model_monotone():
    result = gamma_comparison(0.99, [0.5, 1.0, 2.0], "full", j=5.0, n_max=40,
                              method="solve")
    assert result.strictly_increasing


def test_ratio_scan_trends_small():
    rows = ratio_scan([5.0], [1.0], [2.0, 5.0], 0.95, n_max=40, eff_n_max=40)
    assert len(rows) == 2
    assert all(r.converged for r in rows)
    assert 0 < rows[0].ratio < rows[1].ratio < 1


def test_ratio_of_identical_quantities_is_one():
    rows = ratio_scan([2.0], [1.0], [3.0], 0.9, n_max=40, eff_n_max=40)
    row = rows[0]
    assert row.qfi_lab / row.qfi_lab == 1.0
    assert row.ratio == pytest.approx(row.qfi_lab / row.qfi_eff, rel=1e-15)


def test_peak_locate_exact_parabola():
    rows = [SweepRow(g=g, gamma=1, eta=1, j=1, n_max=10, model="x", method="sum",
                     I_omega_omega=-(g - 0.93) ** 2) for g in np.linspace(0.8, 1.1, 7)]
    assert peak_locate(rows) == pytest.approx(0.93, abs=1e-12)


def test_peak_locate_edge_error():
    rows = [SweepRow(g=g, gamma=1, eta=1, j=1, n_max=10, model="x", method="sum",
                     I_omega_omega=g) for g in np.linspace(0.5, 0.9, 5)]
    with pytest.raises(ValueError, match="widen"):
        peak_locate(rows)


def test_peak_localizes_critical_coupling_within_grid_resolution():
    # shrinking the window around the divergence tightens the located peak
    for width in (0.1, 0.02):
        spec = SweepSpec(model="auto_cs", param="g", start=1 - width, stop=1 + width,
                         points=9, gamma=1.0, eta=1.0, j=4.0,
                         n_max=24, n_max_b=24, method="sum")
        spacing = 2 * width / 8
        assert abs(peak_locate(run_sweep(spec)) - 1.0) < spacing


def test_convergence_scan_decoupled_and_moderate():
    spec = SweepSpec(model="full", param="g", start=0.0, stop=0.5, points=2,
                     gamma=1.0, eta=1.0, j=10.0, n_max=30)
    points = convergence_scan(spec, [20, 30])
    assert points[0].converged and points[0].converged_at == 30  # decoupled line
    assert points[1].converged  # g = 0.5 settles by n_max = 30


def test_convergence_scan_near_critical_needs_more():
    spec = SweepSpec(model="full", param="g", start=0.99, stop=0.99, points=2,
                     gamma=2.0, eta=1.0, j=10.0, n_max=30, method="solve")
    points = convergence_scan(spec, [10, 20, 60, 100])
    for pt in points:
        assert pt.rel_changes[0] > 1e-4  # tiny cutoffs are not converged
        assert pt.converged and pt.converged_at <= 100
