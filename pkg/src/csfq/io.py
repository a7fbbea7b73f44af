"""File formats: key = value configs, x,y CSV traces, JSON reports, minimal SVG plots.

Numbers are written with 9 significant digits using Python's locale-independent
formatting.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigError, InputError

SIG_DIGITS = 9


def fmt(value) -> str:
    return format(float(value), f".{SIG_DIGITS}g")


def round_sig(value):
    """Recursively round floats to 9 significant digits; non-finite floats become None."""
    if isinstance(value, dict):
        return {k: round_sig(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_sig(v) for v in value]
    if isinstance(value, np.ndarray):
        return round_sig(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if not math.isfinite(v):
            return None
        return float(fmt(v))
    return value


def dumps_json(obj) -> str:
    return json.dumps(round_sig(obj), indent=2, allow_nan=False) + "\n"


def read_keyvalue(path, allowed=None, required=()) -> dict:
    """Parse a flat ``key = value`` file with ``#`` comments into floats.

    Errors carry the file name and line number.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read file: {exc.strerror}", path) from exc
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", path, lineno)
        key, _, val = (s.strip() for s in line.partition("="))
        if not key:
            raise ConfigError("missing key", path, lineno)
        if allowed is not None and key not in allowed:
            raise ConfigError(f"unknown key {key!r}", path, lineno)
        if key in out:
            raise ConfigError(f"duplicate key {key!r}", path, lineno)
        try:
            num = float(val)
        except ValueError:
            raise ConfigError(f"value for {key!r} is not a number: {val!r}", path, lineno) from None
        if not math.isfinite(num):
            raise ConfigError(f"value for {key!r} is not finite", path, lineno)
        out[key] = num
    missing = [k for k in required if k not in out]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}", path)
    return out


def _read_rows(path):
    path = Path(path)
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            return path, list(csv.reader(fh))
    except OSError as exc:
        raise InputError(f"{path}: cannot read file: {exc.strerror}") from exc


def read_xy_csv(path):
    """Read a two-column CSV with header ``x,y``."""
    path, rows = _read_rows(path)
    if not rows or [c.strip() for c in rows[0]] != ["x", "y"]:
        raise ConfigError("header must be 'x,y'", path, 1)
    xs, ys = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise ConfigError(f"expected 2 columns, got {len(row)}", path, lineno)
        try:
            xs.append(float(row[0]))
            ys.append(float(row[1]))
        except ValueError:
            raise ConfigError("non-numeric value", path, lineno) from None
    return np.array(xs), np.array(ys)


def read_values_csv(path):
    """Read a one-column CSV with header ``value``."""
    path, rows = _read_rows(path)
    if not rows or [c.strip() for c in rows[0]] != ["value"]:
        raise ConfigError("header must be 'value'", path, 1)
    out = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 1:
            raise ConfigError(f"expected 1 column, got {len(row)}", path, lineno)
        try:
            out.append(float(row[0]))
        except ValueError:
            raise ConfigError("non-numeric value", path, lineno) from None
    return np.array(out)


def csv_text(header, rows) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_text(out, text: str):
    """Write to a path, or to stdout when ``out`` is ``-``."""
    if str(out) == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    Path(out).write_text(text, encoding="utf-8")


# --- SVG ------------------------------------------------------------------

_W, _H, _M = 640, 420, 60


def _scale(lo, hi, a, b):
    if hi == lo:
        hi = lo + 1.0
    return lambda v: a + (v - lo) * (b - a) / (hi - lo)


def svg_plot(points=None, curve=None, bars=None, title="", xlabel="", ylabel="") -> str:
    """Axes with optional scatter ``points``, line ``curve`` and histogram ``bars``.

    ``bars`` is (edges, counts).
    """
    xs, ys = [], []
    for series in (points, curve):
        if series is not None:
            xs.extend(np.asarray(series[0]).tolist())
            ys.extend(np.asarray(series[1]).tolist())
    if bars is not None:
        xs.extend(np.asarray(bars[0]).tolist())
        ys.extend(np.asarray(bars[1]).tolist())
        ys.append(0.0)
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    pad = 0.05 * (y1 - y0 or 1.0)
    y0, y1 = y0 - pad, y1 + pad
    sx = _scale(x0, x1, _M, _W - _M / 2)
    sy = _scale(y0, y1, _H - _M, _M / 2)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
           f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
           f'<rect width="{_W}" height="{_H}" fill="white"/>',
           f'<line x1="{_M}" y1="{_H - _M}" x2="{_W - _M / 2}" y2="{_H - _M}" stroke="black"/>',
           f'<line x1="{_M}" y1="{_M / 2}" x2="{_M}" y2="{_H - _M}" stroke="black"/>']
    for v in np.linspace(x0, x1, 5):
        out.append(f'<text x="{sx(v):.1f}" y="{_H - _M + 16}" text-anchor="middle">'
                   f'{format(v, ".4g")}</text>')
    for v in np.linspace(y0, y1, 5):
        out.append(f'<text x="{_M - 6}" y="{sy(v) + 4:.1f}" text-anchor="end">'
                   f'{format(v, ".3g")}</text>')
    if bars is not None:
        edges, counts = bars
        for a, b, c in zip(edges[:-1], edges[1:], counts):
            out.append(f'<rect x="{sx(a):.2f}" y="{sy(c):.2f}" width="{sx(b) - sx(a):.2f}" '
                       f'height="{sy(0) - sy(c):.2f}" fill="#9ecae1" stroke="#3182bd"/>')
    if points is not None:
        for a, b in zip(*points):
            out.append(f'<circle cx="{sx(a):.2f}" cy="{sy(b):.2f}" r="2" fill="#3182bd"/>')
    if curve is not None:
        path = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(*curve))
        out.append(f'<polyline points="{path}" fill="none" stroke="#d62728" stroke-width="1.5"/>')
    out.append(f'<text x="{_W / 2}" y="20" text-anchor="middle">{_esc(title)}</text>')
    out.append(f'<text x="{_W / 2}" y="{_H - 15}" text-anchor="middle">{_esc(xlabel)}</text>')
    out.append(f'<text x="15" y="{_H / 2}" text-anchor="middle" '
               f'transform="rotate(-90 15 {_H / 2})">{_esc(ylabel)}</text>')
    out.append("</svg>\n")
    return "\n".join(out)


def _esc(s):
    return str(s).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
