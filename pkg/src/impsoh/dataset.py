"""Spectrum/waveform ingestion, feature-table assembly, and persistence.

Spectrum CSV schema (header exactly):
    cell_id,soh_pct,soc_pct,temp_c,freq_hz,re_ohm,im_ohm
soc_pct and temp_c may be empty. Frequencies are in Hz on disk and are
converted to rad/s at the boundary. im_ohm is signed mathematically
(capacitive negative); leading high-frequency points with im > 0 (the
inductive tail) are masked on load.

Waveform CSV schema: t_s,i_a,v_v with uniform sampling.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .ecm import EcmParams, ImpedanceSample
from .errors import EmptyTableError, ParseError, SchemaError, VersionError
from .extraction import extract_params, select_four_frequencies
from .regression import FeatureRow
from .waveform import SignalFrame

SPECTRUM_COLUMNS = ("cell_id", "soh_pct", "soc_pct", "temp_c", "freq_hz", "re_ohm", "im_ohm")
WAVEFORM_COLUMNS = ("t_s", "i_a", "v_v")
TABLE_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Spectrum:
    """A full impedance sweep for one cell/condition, ascending frequency."""

    samples: tuple
    cell_id: str
    soh_frac: float
    soc_frac: Optional[float] = None
    temp_c: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        if len(self.samples) < 4:
            raise ValueError(f"spectrum needs >= 4 samples, got {len(self.samples)}")
        omegas = [s.omega_rad_s for s in self.samples]
        if any(b <= a for a, b in zip(omegas, omegas[1:])):
            raise ValueError("sample frequencies must be strictly increasing")
        if not 0.0 < self.soh_frac <= 1.2:
            raise ValueError(f"soh_frac must be in (0, 1.2], got {self.soh_frac}")


@dataclass(frozen=True)
class FeatureTable:
    rows: tuple
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        if not self.rows:
            raise EmptyTableError("feature table has no rows")


def _parse_optional(text: str, column: str, line_no: int) -> Optional[float]:
    if text is None or text.strip() == "":
        return None
    return _parse_float(text, column, line_no)


def _parse_float(text: str, column: str, line_no: int) -> float:
    try:
        return float(text)
    except (TypeError, ValueError):
        raise ParseError(f"line {line_no}: bad {column} value {text!r}") from None


def load_spectrum_csv(path) -> list[Spectrum]:
    """Parse and group a spectrum CSV into Spectrum objects.

    Rows are grouped by (cell_id, soh, soc, temp); within each group the
    inductive tail (im > 0 at the high-frequency end) is masked. Duplicate
    frequencies within a group are rejected.
    """
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: empty file")
        missing = [c for c in SPECTRUM_COLUMNS if c not in reader.fieldnames]
        if missing:
            raise SchemaError(f"{path}: missing column(s): {', '.join(missing)}")
        groups: dict[tuple, list] = {}
        seen: set[tuple] = set()
        for line_no, row in enumerate(reader, start=2):
            cell_id = (row["cell_id"] or "").strip()
            if not cell_id:
                raise ParseError(f"line {line_no}: empty cell_id")
            soh = _parse_float(row["soh_pct"], "soh_pct", line_no) / 100.0
            soc_pct = _parse_optional(row["soc_pct"], "soc_pct", line_no)
            temp_c = _parse_optional(row["temp_c"], "temp_c", line_no)
            freq = _parse_float(row["freq_hz"], "freq_hz", line_no)
            re = _parse_float(row["re_ohm"], "re_ohm", line_no)
            im = _parse_float(row["im_ohm"], "im_ohm", line_no)
            if freq <= 0:
                raise ParseError(f"line {line_no}: freq_hz must be positive, got {freq}")
            key = (cell_id, soh, soc_pct, temp_c)
            if (key, freq) in seen:
                raise ParseError(f"line {line_no}: duplicate frequency {freq} Hz in group {key}")
            seen.add((key, freq))
            groups.setdefault(key, []).append((2.0 * math.pi * freq, complex(re, im)))

    spectra = []
    for (cell_id, soh, soc_pct, temp_c), points in groups.items():
        points.sort(key=lambda p: p[0])
        while points and points[-1][1].imag > 0.0:  # inductive tail
            points.pop()
        if len(points) < 4:
            raise ParseError(
                f"group {cell_id!r} at SoH {soh * 100:.3g}% has {len(points)} usable "
                "samples after masking, need >= 4"
            )
        spectra.append(
            Spectrum(
                samples=tuple(ImpedanceSample(w, z) for w, z in points),
                cell_id=cell_id,
                soh_frac=soh,
                soc_frac=None if soc_pct is None else soc_pct / 100.0,
                temp_c=temp_c,
            )
        )
    return spectra


def write_spectrum_csv(spectra: Sequence[Spectrum], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SPECTRUM_COLUMNS)
        for spec in spectra:
            soc = "" if spec.soc_frac is None else repr(float(spec.soc_frac) * 100.0)
            temp = "" if spec.temp_c is None else repr(float(spec.temp_c))
            for s in spec.samples:
                writer.writerow(
                    [
                        spec.cell_id,
                        repr(float(spec.soh_frac) * 100.0),
                        soc,
                        temp,
                        repr(float(s.omega_rad_s) / (2.0 * math.pi)),
                        repr(float(s.z.real)),
                        repr(float(s.z.imag)),
                    ]
                )


def load_waveform_csv(path) -> SignalFrame:
    """Load a t_s,i_a,v_v waveform; sample rate comes from the time column."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: empty file")
        missing = [c for c in WAVEFORM_COLUMNS if c not in reader.fieldnames]
        if missing:
            raise SchemaError(f"{path}: missing column(s): {', '.join(missing)}")
        t, i, v = [], [], []
        for line_no, row in enumerate(reader, start=2):
            t.append(_parse_float(row["t_s"], "t_s", line_no))
            i.append(_parse_float(row["i_a"], "i_a", line_no))
            v.append(_parse_float(row["v_v"], "v_v", line_no))
    if len(t) < 2:
        raise ParseError(f"{path}: need at least 2 samples")
    dts = [b - a for a, b in zip(t, t[1:])]
    dt = sorted(dts)[len(dts) // 2]
    if dt <= 0 or any(abs(d - dt) > 1e-6 * dt for d in dts):
        raise ParseError(f"{path}: time column is not uniformly sampled")
    return SignalFrame(v=v, i=i, fs_hz=1.0 / dt)


def build_feature_table(specs: Sequence[Spectrum], freq_targets=None) -> FeatureTable:
    """Select four points and extract parameters per spectrum.

    Spectra whose selection or extraction fails are skipped and recorded in
    provenance; the call only fails outright when no rows survive.
    """
    rows = []
    skips = []
    selections = []
    for spec in specs:
        try:
            fp = select_four_frequencies(spec, targets=freq_targets)
            params = extract_params(fp)
        except ValueError as exc:
            skips.append({"cell_id": spec.cell_id, "soh_pct": spec.soh_frac * 100.0, "reason": str(exc)})
            continue
        rows.append(
            FeatureRow(
                params=params,
                soh_frac=spec.soh_frac,
                soc_frac=spec.soc_frac,
                temp_c=spec.temp_c,
                cell_id=spec.cell_id,
            )
        )
        selections.append(
            [fp.high.omega_rad_s, fp.mid2.omega_rad_s, fp.mid1.omega_rad_s, fp.low.omega_rad_s]
        )
    if not rows:
        raise EmptyTableError(f"all {len(specs)} spectra failed extraction")
    return FeatureTable(
        rows=tuple(rows),
        provenance={"selection_omegas_rad_s": selections, "skips": skips},
    )


def _row_to_dict(r: FeatureRow) -> dict:
    return {
        "params": list(r.params.as_features()),
        "soh_frac": r.soh_frac,
        "soc_frac": r.soc_frac,
        "temp_c": r.temp_c,
        "cell_id": r.cell_id,
    }


def _row_from_dict(d: dict) -> FeatureRow:
    return FeatureRow(
        params=EcmParams.from_features(d["params"]),
        soh_frac=d["soh_frac"],
        soc_frac=d["soc_frac"],
        temp_c=d["temp_c"],
        cell_id=d["cell_id"],
    )


def save_feature_table(table: FeatureTable, path) -> None:
    if not table.rows:
        raise EmptyTableError("refusing to save an empty feature table")
    doc = {
        "schema_version": TABLE_SCHEMA_VERSION,
        "rows": [_row_to_dict(r) for r in table.rows],
        "provenance": table.provenance,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)


def load_feature_table(path) -> FeatureTable:
    with open(path) as fh:
        doc = json.load(fh)
    version = doc.get("schema_version")
    if version != TABLE_SCHEMA_VERSION:
        raise VersionError(f"unknown feature-table schema_version {version!r}")
    return FeatureTable(
        rows=tuple(_row_from_dict(d) for d in doc["rows"]),
        provenance=doc.get("provenance", {}),
    )
