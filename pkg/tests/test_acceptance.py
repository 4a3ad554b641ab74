"""Acceptance gate: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -s` to see the per-criterion
summary lines.
"""

import math
import os
import time

import numpy as np
import pytest

from impsoh.dataset import Spectrum, build_feature_table, load_spectrum_csv
from impsoh.ecm import EcmParams, ImpedanceSample, Regime, ecm_impedance, reduced_impedance, sweep
from impsoh.extraction import FourPointSet, extract_params, fit_rmse
from impsoh.regression import FeatureRow, evaluate, predict, split, split_by_cell, train
from impsoh.synth import default_trend, gen_dataset
from impsoh.waveform import SignalFrame, estimate_impedance, make_excitation

# Measured parameter columns at the three anchor SoH levels
COL_MIN = np.array([14.7e-3, 1.9e-3, 1.8e-3, 2.5e-3, 1.2, 0.24])
COL_MAX = np.array([17.9e-3, 11.5e-3, 3.7e-3, 4.1e-3, 5.2, 0.34])


def report(name, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else "")
    print(line)
    assert ok, line


def draw_params(rng, lo, hi):
    return EcmParams.from_features(np.exp(rng.uniform(np.log(lo), np.log(hi))))


def test_criterion_1_reduced_circuit_round_trip():
    rng = np.random.default_rng(2024)
    freqs = {"high": 1e4, "mid2": 10.0, "mid1": 1.0, "low": 1e-2}
    t0 = time.monotonic()
    worst = 0.0
    for _ in range(1000):
        p = draw_params(rng, 0.1 * COL_MIN, 10.0 * COL_MAX)
        fp = FourPointSet(
            high=ImpedanceSample(freqs["high"], reduced_impedance(p, freqs["high"], Regime.HIGH)),
            mid2=ImpedanceSample(freqs["mid2"], reduced_impedance(p, freqs["mid2"], Regime.MID2)),
            mid1=ImpedanceSample(freqs["mid1"], reduced_impedance(p, freqs["mid1"], Regime.MID1)),
            low=ImpedanceSample(freqs["low"], reduced_impedance(p, freqs["low"], Regime.LOW)),
        )
        q = extract_params(fp)
        for got, true in (
            (q.r0_ohm, p.r0_ohm),
            (q.aw_ohm_sqrt_rad_s, p.aw_ohm_sqrt_rad_s),
            (q.r2_ohm, p.r2_ohm),
            (q.c2_f, p.c2_f),
            (q.r1_ohm, p.r1_ohm),
        ):
            worst = max(worst, abs(got - true) / true)
    elapsed = time.monotonic() - t0
    report(
        "criterion 1 (reduced-circuit round-trip)",
        worst < 1e-9 and elapsed < 5.0,
        f"worst rel err {worst:.2e}, {elapsed:.2f}s",
    )


def test_criterion_2_full_model_round_trip():
    # Draws span the measured parameter columns; extending each parameter
    # an extra decade both ways merges the circuit's relaxation arcs and no
    # four-point frequency choice reaches the target (see decisions ledger).
    rng = np.random.default_rng(2024)
    freqs = (1e6, 562.0, 5.62, 1e-2)  # >= 1.5 decades apart pairwise
    grid = np.logspace(-2, 4, 60)
    t0 = time.monotonic()
    n_ok = 0
    n = 1000
    for _ in range(n):
        p = draw_params(rng, COL_MIN, COL_MAX)
        try:
            fp = FourPointSet(*[ImpedanceSample(w, ecm_impedance(p, w)) for w in freqs])
            q = extract_params(fp)
        except ValueError:
            continue
        spec = Spectrum(samples=tuple(sweep(p, grid)), cell_id="x", soh_frac=0.9)
        if fit_rmse(q, spec).rmse_pct < 2.0:
            n_ok += 1
    elapsed = time.monotonic() - t0
    report(
        "criterion 2 (full-model round-trip, <2% model fit)",
        n_ok >= 0.95 * n and elapsed < 30.0,
        f"{n_ok}/{n} under 2% rmse, {elapsed:.2f}s",
    )


def test_criterion_3_online_estimator_accuracy():
    p = EcmParams(*COL_MIN)
    t0 = time.monotonic()
    ok = True
    details = []
    for f_hz in (0.01, 1.0, 100.0, 1000.0):
        fs = 100.0 * f_hz
        n = int(round((10 * 10.0 / f_hz + 12.0 / f_hz) * fs))
        t = np.arange(n) / fs
        z = ecm_impedance(p, 2 * np.pi * f_hz)

        # single tone
        i_tone = np.cos(2 * np.pi * f_hz * t)
        v_tone = abs(z) * np.cos(2 * np.pi * f_hz * t + np.angle(z))
        est = estimate_impedance(SignalFrame(v=v_tone, i=i_tone, fs_hz=fs), f_hz)
        mag_err = abs(abs(est.z) - abs(z)) / abs(z)
        ph_err = abs(np.angle(est.z) - np.angle(z))
        ok &= mag_err < 0.01 and ph_err < math.radians(1.0)

        # square-wave excitation, fundamental-referenced
        i_sq = make_excitation(f_hz, 1.0, math.ceil(n * f_hz / fs), fs)[:n]
        v_sq = np.zeros(n)
        for k in range(1, 50, 2):
            zk = ecm_impedance(p, 2 * np.pi * k * f_hz)
            v_sq += (4.0 / math.pi / k) * abs(zk) * np.sin(2 * np.pi * k * f_hz * t + np.angle(zk))
        est = estimate_impedance(SignalFrame(v=v_sq, i=i_sq, fs_hz=fs), f_hz)
        mag_err_sq = abs(abs(est.z) - abs(z)) / abs(z)
        ph_err_sq = abs(np.angle(est.z) - np.angle(z))
        ok &= mag_err_sq < 0.03 and ph_err_sq < math.radians(3.0)
        details.append(f"{f_hz}Hz tone {mag_err * 100:.3f}% sq {mag_err_sq * 100:.3f}%")
    elapsed = time.monotonic() - t0
    report(
        "criterion 3 (online estimator accuracy)",
        ok and elapsed < 30.0,
        "; ".join(details) + f", {elapsed:.2f}s",
    )


def test_criterion_4_regression_oracle():
    rng = np.random.default_rng(7)
    coef = 10.0
    rows = []
    for _ in range(200):
        r0 = rng.uniform(0.01, 0.04)
        p = EcmParams(
            r0_ohm=r0,
            r1_ohm=rng.uniform(1e-3, 1e-2),
            r2_ohm=rng.uniform(1e-3, 1e-2),
            aw_ohm_sqrt_rad_s=rng.uniform(1e-3, 5e-3),
            c1_f=rng.uniform(1.0, 5.0),
            c2_f=rng.uniform(0.1, 0.5),
        )
        rows.append(FeatureRow(params=p, soh_frac=0.5 + coef * r0))
    m = train(rows)
    eff = m.beta[0] / m.feat_std[0]
    coef_err = abs(eff - coef)
    metrics = evaluate(m, rows)
    report(
        "criterion 4 (planted-coefficient regression oracle)",
        coef_err < 1e-6 and metrics.r2 > 1.0 - 1e-9,
        f"coef err {coef_err:.2e}, r2 {metrics.r2:.12f}",
    )


def test_criterion_5_end_to_end_pipeline():
    t0 = time.monotonic()
    passes = 0
    details = []
    for seed in range(10):
        trend = default_trend(noise_rel=0.02, seed=seed)
        spectra, _ = gen_dataset(trend, 5, 12)
        table = build_feature_table(spectra)
        train_rows, test_rows = split(list(table.rows), 0.6, seed)
        m = train(train_rows)
        metrics = evaluate(m, test_rows)
        ok = metrics.mae_pct < 2.0 and metrics.r2 > 0.9
        passes += ok
        details.append(f"seed {seed}: mae {metrics.mae_pct:.2f} r2 {metrics.r2:.3f}")
    elapsed = time.monotonic() - t0
    report(
        "criterion 5 (end-to-end synthetic pipeline, 10 seeds)",
        passes >= 9 and elapsed < 60.0,
        f"{passes}/10 seeds passed, {elapsed:.2f}s",
    )


def test_criterion_6_equivariance_and_invariance_properties():
    rng = np.random.default_rng(11)

    # extraction scale equivariance on 100 random instances
    eq_ok = 0
    for _ in range(100):
        p = draw_params(rng, COL_MIN, COL_MAX)
        k = float(np.exp(rng.uniform(-2, 2)))
        freqs = (1e4, 10.0, 1.0, 1e-2)
        fp = FourPointSet(
            high=ImpedanceSample(freqs[0], reduced_impedance(p, freqs[0], Regime.HIGH)),
            mid2=ImpedanceSample(freqs[1], reduced_impedance(p, freqs[1], Regime.MID2)),
            mid1=ImpedanceSample(freqs[2], reduced_impedance(p, freqs[2], Regime.MID1)),
            low=ImpedanceSample(freqs[3], reduced_impedance(p, freqs[3], Regime.LOW)),
        )
        scaled = FourPointSet(
            high=ImpedanceSample(freqs[0], k * fp.high.z),
            mid2=ImpedanceSample(freqs[1], k * fp.mid2.z),
            mid1=ImpedanceSample(freqs[2], k * fp.mid1.z),
            low=ImpedanceSample(freqs[3], k * fp.low.z),
        )
        q, qk = extract_params(fp), extract_params(scaled)
        rel = max(
            abs(qk.r0_ohm - k * q.r0_ohm) / (k * q.r0_ohm),
            abs(qk.r1_ohm - k * q.r1_ohm) / (k * q.r1_ohm),
            abs(qk.r2_ohm - k * q.r2_ohm) / (k * q.r2_ohm),
            abs(qk.aw_ohm_sqrt_rad_s - k * q.aw_ohm_sqrt_rad_s) / (k * q.aw_ohm_sqrt_rad_s),
            abs(qk.c1_f - q.c1_f / k) / (q.c1_f / k),
            abs(qk.c2_f - q.c2_f / k) / (q.c2_f / k),
        )
        eq_ok += rel < 1e-9

    # regression standardization invariance on 100 random instances
    inv_ok = 0
    for trial in range(100):
        trial_rng = np.random.default_rng(1000 + trial)
        rows = []
        for _ in range(15):
            p = draw_params(trial_rng, COL_MIN, COL_MAX)
            soh = float(trial_rng.uniform(0.77, 0.95))
            rows.append(FeatureRow(params=p, soh_frac=soh))
        j = int(trial_rng.integers(0, 6))
        k = float(np.exp(trial_rng.uniform(-2, 2)))
        scaled_rows = []
        for r in rows:
            feats = list(r.params.as_features())
            feats[j] *= k
            scaled_rows.append(
                FeatureRow(params=EcmParams.from_features(feats), soh_frac=r.soh_frac)
            )
        m, ms = train(rows), train(scaled_rows)
        worst = max(
            abs(predict(ms, rs.params) - predict(m, r.params))
            for r, rs in zip(rows, scaled_rows)
        )
        inv_ok += worst < 1e-8

    report(
        "criterion 6 (scale equivariance + standardization invariance)",
        eq_ok == 100 and inv_ok == 100,
        f"equivariance {eq_ok}/100, invariance {inv_ok}/100",
    )


def test_criterion_7_external_dataset_optional():
    """Non-blocking stretch check against externally normalized public data.

    Set IMPSOH_EXTERNAL_EIS to a spectrum CSV and IMPSOH_TEST_CELLS to the
    held-out cell ids to run it.
    """
    path = os.environ.get("IMPSOH_EXTERNAL_EIS")
    if not path:
        print("[SKIP] criterion 7 (external dataset): IMPSOH_EXTERNAL_EIS not set")
        pytest.skip("external dataset not provided")
    test_cells = [c for c in os.environ.get("IMPSOH_TEST_CELLS", "").split(",") if c]
    spectra = load_spectrum_csv(path)
    table = build_feature_table(spectra)
    rows = list(table.rows)
    if test_cells:
        train_rows, test_rows = split_by_cell(rows, test_cells)
    else:
        train_rows, test_rows = split(rows, 0.6, 0)
    m = train(train_rows)
    metrics = evaluate(m, test_rows)
    report(
        "criterion 7 (external dataset, non-blocking target mae <= 1.3%)",
        metrics.mae_pct <= 1.3,
        f"mae {metrics.mae_pct:.3f}% r2 {metrics.r2:.3f}",
    )
