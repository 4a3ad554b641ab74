"""Command-line front end.

Groups: `ecm` (sweep, extract), `signal` (estimate-z), `dataset`
(synth, build, train, predict, eval). Every command writes a machine-
readable run report next to its primary output (or to --report).

Exit codes: 0 ok, 2 usage/validation, 3 extraction, 4 signal,
5 artifact/schema, 1 unexpected.
"""

from __future__ import annotations

import csv
import json
import math
import sys
import time
import traceback

import click
import numpy as np

from . import dataset as ds
from . import regression as rg
from . import synth as sy
from .ecm import FEATURE_NAMES, EcmParams, sweep
from .errors import (
    EmptyTableError,
    ExtractionError,
    ParseError,
    SchemaError,
    SelectionError,
    SettlingError,
    SignalError,
    VersionError,
)
from .extraction import FourPointSet, extract_params, fit_rmse, select_four_frequencies
from .ecm import ImpedanceSample
from .waveform import estimate_impedance


def _load_config(ctx, param, value):
    if value is None:
        return None
    try:
        import tomllib
    except ImportError:
        import tomli as tomllib
    with open(value, "rb") as fh:
        ctx.default_map = tomllib.load(fh)
    return value


@click.group()
@click.option(
    "--config",
    type=click.Path(exists=True, dir_okay=False),
    callback=_load_config,
    expose_value=False,
    is_eager=True,
    help="TOML file with per-command defaults; explicit flags win.",
)
def cli():
    """Battery SoH estimation from four discrete impedance points."""


def _write_report(command: str, inputs: dict, outputs: dict, started: float,
                  metrics=None, skips=None, seed=None, report_path=None):
    report = {
        "command": command,
        "inputs": inputs,
        "outputs": outputs,
        "metrics": metrics,
        "skips": skips,
        "seed": seed,
        "wall_time_s": time.monotonic() - started,
    }
    if report_path is None:
        primary = next((p for p in outputs.values() if p and p != "-"), None)
        if primary is None:
            return
        report_path = str(primary) + ".report.json"
    with open(report_path, "w") as fh:
        json.dump(report, fh, indent=2)


def _params_from_json(path) -> EcmParams:
    with open(path) as fh:
        doc = json.load(fh)
    missing = [k for k in FEATURE_NAMES if k not in doc]
    if missing:
        raise SchemaError(f"{path}: missing parameter(s): {', '.join(missing)}")
    return EcmParams.from_features([doc[k] for k in FEATURE_NAMES])


def _params_to_json(p: EcmParams, path) -> None:
    doc = dict(zip(FEATURE_NAMES, p.as_features()))
    if path == "-":
        click.echo(json.dumps(doc, indent=2))
    else:
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=2)


def _open_out(path):
    if path == "-":
        return sys.stdout
    return open(path, "w", newline="")


def _emit_impedance_csv(path, rows) -> None:
    fh = _open_out(path)
    try:
        writer = csv.writer(fh)
        writer.writerow(["freq_hz", "re_ohm", "im_ohm"])
        for f_hz, z in rows:
            writer.writerow([repr(float(f_hz)), repr(float(z.real)), repr(float(z.imag))])
    finally:
        if fh is not sys.stdout:
            fh.close()


@cli.group()
def ecm():
    """Equivalent-circuit forward model and parameter extraction."""


_PARAM_FLAGS = [
    ("--r0", "R0 in ohms"),
    ("--r1", "R1 in ohms"),
    ("--r2", "R2 in ohms"),
    ("--aw", "Warburg gain in ohm*(rad/s)^0.5"),
    ("--c1", "C1 in farads"),
    ("--c2", "C2 in farads"),
]


def _param_options(fn):
    for flag, helptext in reversed(_PARAM_FLAGS):
        fn = click.option(flag, type=float, default=None, help=helptext)(fn)
    return fn


def _resolve_params(params_json, r0, r1, r2, aw, c1, c2) -> EcmParams:
    if params_json:
        return _params_from_json(params_json)
    flags = (r0, r1, r2, aw, c1, c2)
    if any(v is None for v in flags):
        raise click.UsageError("give --params-json or all of --r0 --r1 --r2 --aw --c1 --c2")
    return EcmParams(r0, r1, r2, aw, c1, c2)


@ecm.command("sweep")
@click.option("--params-json", type=click.Path(exists=True, dir_okay=False), default=None)
@_param_options
@click.option("--fmin-hz", type=float, default=1e-3, show_default=True)
@click.option("--fmax-hz", type=float, default=1e3, show_default=True)
@click.option("--points", type=int, default=60, show_default=True)
@click.option("--out", default="-", show_default=True, help="Output CSV path, - for stdout.")
@click.option("--report", type=click.Path(dir_okay=False), default=None)
def ecm_sweep(params_json, r0, r1, r2, aw, c1, c2, fmin_hz, fmax_hz, points, out, report):
    """Evaluate the circuit over a log frequency grid (Nyquist CSV)."""
    started = time.monotonic()
    p = _resolve_params(params_json, r0, r1, r2, aw, c1, c2)
    if not 0 < fmin_hz < fmax_hz or points < 1:
        raise click.UsageError("need 0 < fmin-hz < fmax-hz and points >= 1")
    freqs = np.logspace(math.log10(fmin_hz), math.log10(fmax_hz), points)
    samples = sweep(p, 2.0 * math.pi * freqs)
    _emit_impedance_csv(out, [(f, s.z) for f, s in zip(freqs, samples)])
    _write_report(
        "ecm sweep",
        inputs={"params_json": params_json, "fmin_hz": fmin_hz, "fmax_hz": fmax_hz, "points": points},
        outputs={"csv": out},
        started=started,
        report_path=report,
    )


def _parse_point(text: str, name: str) -> ImpedanceSample:
    parts = text.split(",")
    if len(parts) != 3:
        raise click.UsageError(f"--{name} must be 'freq_hz,re_ohm,im_ohm', got {text!r}")
    try:
        f_hz, re, im = (float(v) for v in parts)
    except ValueError:
        raise click.UsageError(f"--{name}: bad number in {text!r}") from None
    return ImpedanceSample(2.0 * math.pi * f_hz, complex(re, im))


@ecm.command("extract")
@click.option("--spectrum", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Spectrum CSV with exactly one group; four points are auto-selected.")
@click.option("--high", default=None, help="High point as 'freq_hz,re_ohm,im_ohm'.")
@click.option("--mid2", default=None, help="Upper-mid point.")
@click.option("--mid1", default=None, help="Lower-mid point.")
@click.option("--low", default=None, help="Low point.")
@click.option("--out", default="-", show_default=True, help="Params JSON path, - for stdout.")
@click.option("--report", type=click.Path(dir_okay=False), default=None)
def ecm_extract(spectrum, high, mid2, mid1, low, out, report):
    """Extract the six parameters from four impedance points."""
    started = time.monotonic()
    fit = None
    selection = None
    if spectrum:
        spectra = ds.load_spectrum_csv(spectrum)
        if len(spectra) != 1:
            raise click.UsageError(
                f"{spectrum} contains {len(spectra)} groups; `ecm extract` needs exactly one "
                "(use `dataset build` for batches)"
            )
        fp = select_four_frequencies(spectra[0])
        selection = [fp.high.omega_rad_s, fp.mid2.omega_rad_s, fp.mid1.omega_rad_s, fp.low.omega_rad_s]
        params = extract_params(fp)
        fit = fit_rmse(params, spectra[0])
    else:
        points = {"high": high, "mid2": mid2, "mid1": mid1, "low": low}
        missing = [k for k, v in points.items() if v is None]
        if missing:
            raise click.UsageError(f"give --spectrum or all four points (missing: {', '.join(missing)})")
        try:
            fp = FourPointSet(**{k: _parse_point(v, k) for k, v in points.items()})
        except ValueError as exc:
            raise click.UsageError(str(exc)) from exc
        params = extract_params(fp)
    _params_to_json(params, out)
    if fit is not None:
        click.echo(f"fit: rmse={fit.rmse_pct:.3g}% max={fit.max_err_pct:.3g}% n={fit.n_points}", err=True)
    _write_report(
        "ecm extract",
        inputs={"spectrum": spectrum, "points": None if spectrum else [high, mid2, mid1, low],
                "selection_omegas_rad_s": selection},
        outputs={"params_json": out},
        started=started,
        metrics=None if fit is None else {"rmse_pct": fit.rmse_pct, "max_err_pct": fit.max_err_pct},
        report_path=report,
    )


@cli.group()
def signal():
    """Online impedance estimation from sampled waveforms."""


@signal.command("estimate-z")
@click.option("--waveform", type=click.Path(exists=True, dir_okay=False), required=True,
              help="CSV with columns t_s,i_a,v_v.")
@click.option("--freqs", required=True, help="Comma-separated target frequencies in Hz.")
@click.option("--q", type=float, default=10.0, show_default=True, help="Bandpass quality factor.")
@click.option("--out", default="-", show_default=True)
@click.option("--report", type=click.Path(dir_okay=False), default=None)
def signal_estimate_z(waveform, freqs, q, out, report):
    """Estimate complex impedance at each target frequency."""
    started = time.monotonic()
    try:
        freq_list = [float(f) for f in freqs.split(",") if f.strip()]
    except ValueError:
        raise click.UsageError(f"bad --freqs value {freqs!r}") from None
    if not freq_list:
        raise click.UsageError("--freqs is empty")
    frame = ds.load_waveform_csv(waveform)
    rows = []
    for f_hz in freq_list:
        s = estimate_impedance(frame, f_hz, q=q)
        rows.append((f_hz, s.z))
    _emit_impedance_csv(out, rows)
    _write_report(
        "signal estimate-z",
        inputs={"waveform": waveform, "freqs_hz": freq_list, "q": q},
        outputs={"csv": out},
        started=started,
        report_path=report,
    )


@cli.group()
def dataset():
    """Dataset generation, assembly, training, and evaluation."""


@dataset.command("synth")
@click.option("--cells", type=int, default=5, show_default=True)
@click.option("--soh-points", type=int, default=12, show_default=True)
@click.option("--noise-rel", type=float, default=0.02, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--grid-points", type=int, default=60, show_default=True)
@click.option("--emit-eis", type=click.Path(dir_okay=False), default=None,
              help="Write the generated spectra as a spectrum CSV.")
@click.option("--out-truth", type=click.Path(dir_okay=False), default=None,
              help="Write the ground-truth feature table as JSON.")
@click.option("--report", type=click.Path(dir_okay=False), default=None)
def dataset_synth(cells, soh_points, noise_rel, seed, grid_points, emit_eis, out_truth, report):
    """Generate a synthetic aging dataset from the default trend."""
    started = time.monotonic()
    if emit_eis is None and out_truth is None:
        raise click.UsageError("give --emit-eis and/or --out-truth")
    trend = sy.default_trend(noise_rel=noise_rel, seed=seed)
    grid = np.logspace(-2, 4, grid_points)
    spectra, truth = sy.gen_dataset(trend, cells, soh_points, freq_grid=grid)
    if emit_eis:
        ds.write_spectrum_csv(spectra, emit_eis)
    if out_truth:
        ds.save_feature_table(truth, out_truth)
    click.echo(f"generated {len(spectra)} spectra ({cells} cells x {soh_points} SoH points)", err=True)
    _write_report(
        "dataset synth",
        inputs={"cells": cells, "soh_points": soh_points, "noise_rel": noise_rel,
                "grid_points": grid_points},
        outputs={"eis_csv": emit_eis, "truth_json": out_truth},
        started=started,
        seed=seed,
        report_path=report,
    )


@dataset.command("build")
@click.option("--eis", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.option("--targets-hz", default=None,
              help="Optional comma-separated four target frequencies in Hz.")
@click.option("--report", type=click.Path(dir_okay=False), default=None)
def dataset_build(eis, out, targets_hz, report):
    """Build a feature table from a spectrum CSV."""
    started = time.monotonic()
    targets = None
    if targets_hz:
        try:
            targets = [2.0 * math.pi * float(f) for f in targets_hz.split(",")]
        except ValueError:
            raise click.UsageError(f"bad --targets-hz value {targets_hz!r}") from None
        if len(targets) != 4:
            raise click.UsageError("--targets-hz needs exactly 4 frequencies")
    spectra = ds.load_spectrum_csv(eis)
    table = ds.build_feature_table(spectra, freq_targets=targets)
    ds.save_feature_table(table, out)
    n_skips = len(table.provenance.get("skips", []))
    click.echo(f"built {len(table.rows)} rows, skipped {n_skips}", err=True)
    _write_report(
        "dataset build",
        inputs={"eis": eis, "targets_hz": targets_hz},
        outputs={"features_json": out},
        started=started,
        skips=table.provenance.get("skips"),
        report_path=report,
    )


@dataset.command("train")
@click.option("--features", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="Model JSON path.")
@click.option("--train-frac", type=float, default=0.6, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--test-cells", default=None,
              help="Comma-separated cell ids held out for testing (overrides --train-frac).")
@click.option("--out-test", type=click.Path(dir_okay=False), default=None,
              help="Write the held-out rows as a feature table JSON.")
@click.option("--report", type=click.Path(dir_okay=False), default=None)
def dataset_train(features, out, train_frac, seed, test_cells, out_test, report):
    """Split, train the linear SoH model, and save it."""
    started = time.monotonic()
    table = ds.load_feature_table(features)
    rows = list(table.rows)
    if test_cells:
        ids = [c.strip() for c in test_cells.split(",") if c.strip()]
        train_rows, test_rows = rg.split_by_cell(rows, ids)
    else:
        train_rows, test_rows = rg.split(rows, train_frac, seed)
    model = rg.train(train_rows)
    rg.save_model(model, out)
    if out_test:
        ds.save_feature_table(
            ds.FeatureTable(rows=tuple(test_rows), provenance={"source": features, "split": "test"}),
            out_test,
        )
    tm = model.train_metrics
    click.echo(f"train: r2={tm.r2:.4f} mae={tm.mae_pct:.3f}% rmse={tm.rmse_pct:.3f}% n={tm.n}")
    _write_report(
        "dataset train",
        inputs={"features": features, "train_frac": train_frac, "test_cells": test_cells},
        outputs={"model_json": out, "test_json": out_test},
        started=started,
        metrics=tm.as_dict(),
        seed=seed,
        report_path=report,
    )


@dataset.command("predict")
@click.option("--model", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--params", type=click.Path(exists=True, dir_okay=False), required=True,
              help="Params JSON as written by `ecm extract`.")
def dataset_predict(model, params):
    """Print the estimated SoH in percent."""
    m = rg.load_model(model)
    p = _params_from_json(params)
    click.echo(f"{rg.predict(m, p) * 100.0:.4f}")


@dataset.command("eval")
@click.option("--model", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--features", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out-pred", type=click.Path(dir_okay=False), default=None,
              help="Per-row prediction CSV.")
@click.option("--report", type=click.Path(dir_okay=False), default=None)
def dataset_eval(model, features, out_pred, report):
    """Evaluate a model on a feature table and print metrics."""
    started = time.monotonic()
    m = rg.load_model(model)
    table = ds.load_feature_table(features)
    metrics = rg.evaluate(m, table.rows)
    if out_pred:
        with open(out_pred, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["cell_id", "soh_true_pct", "soh_pred_pct", "abs_err_pct"])
            for r in table.rows:
                pred = rg.predict(m, r.params) * 100.0
                true = r.soh_frac * 100.0
                writer.writerow(
                    [r.cell_id, repr(float(true)), repr(float(pred)), repr(float(abs(pred - true)))]
                )
    click.echo(
        f"eval: r2={metrics.r2:.4f} mae={metrics.mae_pct:.3f}% "
        f"rmse={metrics.rmse_pct:.3f}% n={metrics.n}"
    )
    _write_report(
        "dataset eval",
        inputs={"model": model, "features": features},
        outputs={"pred_csv": out_pred},
        started=started,
        metrics=metrics.as_dict(),
        report_path=report,
    )


def main(argv=None):
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.UsageError as exc:
        exc.show()
        return 2
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except (ExtractionError, SelectionError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 3
    except (SettlingError, SignalError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 4
    except (VersionError, SchemaError, EmptyTableError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 5
    except (ParseError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except Exception:
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
