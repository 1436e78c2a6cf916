"""Deterministic CSV/JSON emitters.

CSV schema: header ``t_us,e1_re,e1_im,e2_re,e2_im,p1,p2``, one row per grid
sample, 9 significant digits, LF line endings.  Identical inputs produce
byte-identical files; writes go through a temp file plus rename so partial
output never lands under the target name.
"""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np

from .model import TimeGrid, Waveform

__all__ = ["emit_csv", "read_csv", "emit_summary", "SUMMARY_SCHEMA_VERSION"]

SUMMARY_SCHEMA_VERSION = 1


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def _atomic_write(path, data: str):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".ratos-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_csv(waveform: Waveform, path) -> None:
    """Write an output waveform; see the module docstring for the schema."""
    t_us = waveform.grid.times / 1e-6
    p1 = waveform.power(1)
    p2 = waveform.power(2)
    rows = ["t_us,e1_re,e1_im,e2_re,e2_im,p1,p2"]
    e1, e2 = waveform.e1, waveform.e2
    for i in range(waveform.grid.n_t):
        rows.append(
            ",".join(
                (
                    _fmt(t_us[i]),
                    _fmt(e1[i].real),
                    _fmt(e1[i].imag),
                    _fmt(e2[i].real),
                    _fmt(e2[i].imag),
                    _fmt(p1[i]),
                    _fmt(p2[i]),
                )
            )
        )
    _atomic_write(path, "\n".join(rows) + "\n")


def read_csv(path) -> Waveform:
    """Read a waveform CSV back (inverse of :func:`emit_csv`)."""
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    data = np.atleast_2d(data)
    t = data[:, 0] * 1e-6
    grid = TimeGrid(float(t[0]), float(t[-1]), len(t))
    return Waveform(grid, data[:, 1] + 1j * data[:, 2], data[:, 3] + 1j * data[:, 4])


def emit_summary(path, param: str, values, runs, config_entries: dict, pump_power_mw: float):
    """Write the sweep summary JSON.

    ``runs`` is a list of {"value": v, "csv": name, "metrics": {...}} in
    the order the values were requested.  The config echo keeps the surface
    (human-unit) entries so a summary is self-describing.
    """
    doc = {
        "schema_version": SUMMARY_SCHEMA_VERSION,
        "param": param,
        "values": [float(v) for v in values],
        "pump_power_mw": pump_power_mw,
        "config": {k: str(v) for k, v in config_entries.items()},
        "runs": runs,
    }
    _atomic_write(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")
