"""Top-level acceptance gate.

One test per shipped guarantee; conftest prints a PASS/FAIL line for
each at the end of the run.  Tolerances here are contractual, do not
loosen them to make a failure go away.
"""

import json
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from fansq.atlas import AxisRange, GridSpec, find_intersections, scan, trace_boundary
from fansq.cli import main
from fansq.fanstate import FanConfig, Identity, TrappedIon, moment
from fansq.fockoracle import (
    eigen_residual,
    moment_oracle,
    oracle_vector,
    quadrature_moment,
    support_check,
    vacuum,
)
from fansq.specfun import double_factorial
from fansq.squeeze import (
    Regime,
    classify_directions,
    coefficients,
    leading_order_squeeze,
    leading_order_terms,
    squeeze_approx,
    squeeze_parameter,
    vacuum_benchmark,
)


def _model(kind: str, eta_sq, k: int):
    if kind == "identity":
        return Identity()
    return TrappedIon(eta_sq=eta_sq, quantum_order=2 * k)


def test_c01_intersection_scan_finds_three_roots():
    t0 = time.monotonic()
    result = find_intersections(0.1, 3, 12, AxisRange(0.05, 0.45, 81))
    elapsed = time.monotonic() - t0
    assert len(result.roots) == 3
    for root, expected in zip(result.roots, (0.107, 0.223, 0.367)):
        assert 0.05 < root < 0.45
        assert root == pytest.approx(expected, abs=0.005)
    assert elapsed < 60.0


def test_c02_sign_exchange_swaps_squeeze_and_stretch_angles():
    period = math.pi / 6

    cfg = FanConfig.from_xi_sq(3, 0.1, TrappedIon(eta_sq=0.2, quantum_order=6))
    coeffs = coefficients(cfg, 12)
    assert coeffs.harmonics[0] > 0
    assert squeeze_parameter(coeffs, math.pi / 12) < 0
    report = classify_directions(coeffs)
    assert report.regime is Regime.LEADING_POSITIVE
    expected = [(1 + 2 * n) * math.pi / 12 for n in range(6)]
    assert len(report.squeeze_angles) == 6
    for got, want in zip(sorted(report.squeeze_angles), expected):
        assert got == pytest.approx(want, abs=1e-9)

    cfg = FanConfig.from_xi_sq(3, 0.1, TrappedIon(eta_sq=0.25, quantum_order=6))
    coeffs = coefficients(cfg, 12)
    assert coeffs.harmonics[0] < 0
    report = classify_directions(coeffs)
    assert report.regime is Regime.LEADING_NEGATIVE
    expected = [n * period for n in range(6)]
    for got, want in zip(sorted(report.squeeze_angles), expected):
        assert got == pytest.approx(want, abs=1e-9)


def test_c03_vacuum_circle_and_exact_benchmark():
    v = vacuum(32)
    for i in range(16):
        phi = 2 * math.pi * i / 16
        assert quadrature_moment(v, phi, 4) == pytest.approx(0.75, abs=1e-12)
    for N in range(2, 17, 2):
        exact = Fraction(double_factorial(N - 1), 2 ** (N // 2))
        assert vacuum_benchmark(N) == float(exact)


def test_c04_series_and_fock_oracle_agree():
    t0 = time.monotonic()
    model_specs = [("identity", None), ("trapped-ion", 0.1), ("trapped-ion", 0.3)]
    xi_sqs = (0.05, 0.2, 0.5)
    vectors = {}

    for k in (1, 2, 3):
        for kind, eta_sq in model_specs:
            for xi_sq in xi_sqs:
                cfg = FanConfig.from_xi_sq(k, xi_sq, _model(kind, eta_sq, k))
                vec = oracle_vector(cfg, 18)
                vectors[(k, kind, eta_sq, xi_sq)] = (cfg, vec)
                for l in range(0, 9):
                    for m in range(0, l + 1):
                        series = moment(cfg, l, m)
                        oracle = moment_oracle(vec, l, m).real
                        err = abs(series - oracle)
                        where = (k, kind, eta_sq, xi_sq, l, m)
                        if abs(oracle) < 1e-12:
                            assert err <= 1e-12, where
                        else:
                            assert err / abs(oracle) <= 1e-8, where

    for k, N in ((1, 4), (1, 8), (2, 8), (3, 12)):
        bench = vacuum_benchmark(N)
        for kind, eta_sq in model_specs:
            for xi_sq in xi_sqs:
                cfg, vec = vectors[(k, kind, eta_sq, xi_sq)]
                coeffs = coefficients(cfg, N)
                for phi in (0.0, math.pi / 8, math.pi / (4 * k)):
                    series = squeeze_parameter(coeffs, phi) + bench
                    oracle = quadrature_moment(vec, phi, N)
                    where = (k, N, kind, eta_sq, xi_sq, phi)
                    assert abs(series - oracle) / abs(oracle) <= 1e-8, where

    assert time.monotonic() - t0 < 300.0


def test_c05_below_minimum_order_no_squeezing():
    phis = [2 * math.pi * i / 64 for i in range(64)]
    for k in (1, 2, 3):
        for N in range(2, 4 * k, 2):
            for kind, eta_sq in (("identity", None), ("trapped-ion", 0.2)):
                for xi_sq in (0.05, 0.3):
                    cfg = FanConfig.from_xi_sq(k, xi_sq, _model(kind, eta_sq, k))
                    coeffs = coefficients(cfg, N)
                    vals = [squeeze_parameter(coeffs, p) for p in phis]
                    assert max(vals) - min(vals) < 1e-12, (k, N, kind, xi_sq)
                    assert min(vals) > 0, (k, N, kind, xi_sq)


def test_c06_small_amplitude_leading_order():
    cases = {1: (0.01, 0.005, 0.002), 2: (0.1, 0.05)}
    for k, xi_sq_list in cases.items():
        N = 4 * k
        for xi_sq in xi_sq_list:
            xi = math.sqrt(xi_sq)
            assert xi ** (4 * k) <= 1e-4 + 1e-15
            cfg = FanConfig.from_xi_sq(k, xi_sq, Identity())
            coeffs = coefficients(cfg, N)
            for phi in (0.0, math.pi / (4 * k)):  # stretch and squeeze extrema
                full = squeeze_parameter(coeffs, phi)
                lead = leading_order_squeeze(k, N, xi, phi)
                assert abs(full - lead) <= 0.01 * abs(full), (k, xi_sq, phi)
            t = leading_order_terms(k, N, xi)
            assert t.harmonic > t.isotropic > 0  # wings beat the isotropic floor


CONFIGS_C07 = [
    FanConfig.from_xi_sq(1, 0.5, Identity()),
    FanConfig.from_xi_sq(1, 0.2, TrappedIon(eta_sq=0.1, quantum_order=2)),
    FanConfig.from_xi_sq(2, 0.3, Identity()),
    FanConfig.from_xi_sq(2, 0.2, TrappedIon(eta_sq=0.3, quantum_order=4)),
    FanConfig.from_xi_sq(3, 0.15, Identity()),
    FanConfig.from_xi_sq(3, 0.1, TrappedIon(eta_sq=0.2, quantum_order=6)),
]


def test_c07_structural_invariants():
    for cfg in CONFIGS_C07:
        vec = oracle_vector(cfg, 14)
        assert support_check(vec, cfg.k)
        assert eigen_residual(cfg, vec) <= 1e-10

    for cfg, N in ((CONFIGS_C07[0], 12), (CONFIGS_C07[3], 8), (CONFIGS_C07[5], 12)):
        coeffs = coefficients(cfg, N)
        period = math.pi / (2 * cfg.k)
        for i in range(16):
            phi = 0.37 + i * 0.41
            s = squeeze_parameter(coeffs, phi)
            assert abs(squeeze_parameter(coeffs, phi + period) - s) <= 1e-12
            assert abs(squeeze_parameter(coeffs, -phi) - s) <= 1e-12

    for cfg, N in ((CONFIGS_C07[0], 4), (CONFIGS_C07[5], 12)):
        report = classify_directions(coefficients(cfg, N))
        spacing = math.pi / (2 * cfg.k)
        sq = sorted(report.squeeze_angles)
        for a, b in zip(sq, sq[1:]):
            assert b - a == pytest.approx(spacing, abs=1e-9)
        for angle in report.stretch_angles:
            # bisection: the two nearest squeeze axes sit half a spacing
            # away on either side (distances on the circle of period pi)
            dists = sorted(
                min((angle - s) % math.pi, (s - angle) % math.pi) for s in sq
            )
            assert dists[0] == pytest.approx(spacing / 2, abs=1e-9)
            assert dists[1] == pytest.approx(spacing / 2, abs=1e-9)


def test_c08_phase_diagram_boundary_and_harmonic_conjecture(capsys):
    grid = GridSpec(
        xi_sq=AxisRange(0.01, 1.0, 101),
        eta_sq=AxisRange(0.01, 1.0, 101),
        k=1,
        N=4,
        phi=math.pi / 4,
    )
    diagram = scan(grid, "trapped-ion")
    ok = np.array(
        [[st == "OK" for st in row] for row in diagram.status], dtype=bool
    )
    assert (diagram.values[ok] < 0).any()

    points = trace_boundary(grid, "trapped-ion")
    assert points
    for xi_sq, eta_sq in points:
        cfg = FanConfig.from_xi_sq(1, xi_sq, TrappedIon(eta_sq=eta_sq, quantum_order=2))
        s = squeeze_parameter(coefficients(cfg, 4), math.pi / 4)
        assert abs(s) <= 1e-5

    # positivity of the leading harmonic is a conjecture: violations are
    # reported, they do not fail the gate
    violations = []
    xi_vals = grid.xi_sq.values()
    eta_vals = grid.eta_sq.values()
    for i, eta_sq in enumerate(eta_vals):
        for j, xi_sq in enumerate(xi_vals):
            if diagram.status[i][j] != "OK":
                continue
            cfg = FanConfig.from_xi_sq(
                1, xi_sq, TrappedIon(eta_sq=eta_sq, quantum_order=2)
            )
            b1 = coefficients(cfg, 4).harmonics[0]
            if not b1 > 0:
                violations.append((xi_sq, eta_sq, b1))
    with capsys.disabled():
        if violations:
            print(f"\nleading-harmonic positivity violated at {len(violations)} nodes:")
            for xi_sq, eta_sq, b1 in violations[:20]:
                print(f"  xi_sq={xi_sq:.4f} eta_sq={eta_sq:.4f} B(1)={b1:.3e}")
        else:
            print("\nleading-harmonic positivity held at all OK nodes")


def test_c09_single_harmonic_dominance():
    for eta_sq in (0.2, 0.25):
        cfg = FanConfig.from_xi_sq(3, 0.1, TrappedIon(eta_sq=eta_sq, quantum_order=6))
        coeffs = coefficients(cfg, 12)
        assert len(coeffs.harmonics) == 1  # N = 4k admits p = 1 only
        assert squeeze_approx(coeffs, 0.0).dominance < 0.1

    # exercise the bound where higher harmonics actually exist
    for cfg, N in (
        (FanConfig.from_xi_sq(1, 0.1, Identity()), 8),
        (FanConfig.from_xi_sq(1, 0.3, TrappedIon(eta_sq=0.2, quantum_order=2)), 8),
        (FanConfig.from_xi_sq(1, 0.4, Identity()), 12),
    ):
        coeffs = coefficients(cfg, N)
        assert len(coeffs.harmonics) >= 2
        dom = squeeze_approx(coeffs, 0.0).dominance
        assert 0 < dom < 0.1, (cfg.k, N, dom)


SCAN_ARGS_C10 = [
    "scan", "--k", "1", "--N", "4", "--phi", str(math.pi / 4),
    "--xi-sq", "0.01:1.0:21", "--eta-sq", "0.01:1.0:21",
]
ORACLE_ARGS_C10 = [
    "oracle-check", "--k", "2", "--N", "8", "--xi-sq", "0.2",
    "--eta-sq", "0.3", "--max-power", "6",
]


def test_c10_byte_identical_determinism(tmp_path, monkeypatch, capsys):
    monkeypatch.delenv("SOURCE_DATE_EPOCH", raising=False)
    for label, args in (("scan", SCAN_ARGS_C10), ("oracle", ORACLE_ARGS_C10)):
        blobs = []
        for run, threads in enumerate((None, None, "2", "5")):
            if threads is None:
                monkeypatch.delenv("FANSQ_THREADS", raising=False)
            else:
                monkeypatch.setenv("FANSQ_THREADS", threads)
            path = tmp_path / f"{label}-{run}.out"
            assert main(args + ["--output", str(path)]) == 0
            blobs.append(path.read_bytes())
        assert all(b == blobs[0] for b in blobs), label
