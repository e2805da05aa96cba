"""Curve files, JSON reports and CSV tables.

A curve file is UTF-8 JSON::

    {"format": "writhe-lab-curves", "version": 1,
     "components": [{"closed": true, "vertices": [[x, y, z], ...],
                     "framing": [[vx, vy, vz], ...],   # optional
                     "turns": [k0, k1, ...],           # optional
                     "flux": 1.0}]}                    # optional

Coordinates are written with 17 significant digits so that reading a file
back reproduces every vertex bit for bit.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math

import numpy as np

from .curves import CurveSystem, FluxTube, PolygonalCurve, Ribbon
from .errors import CurveFileError, WritheLabError

FORMAT = "writhe-lab-curves"
VERSION = 1


def _num(x):
    x = float(x)
    if not math.isfinite(x):
        raise CurveFileError(f"non-finite value {x!r}")
    return format(x, ".16e")


def _triples(rows, indent):
    pad = " " * indent
    body = (",\n" + pad).join("[" + ", ".join(_num(c) for c in r) + "]"
                              for r in rows)
    return "[\n" + pad + body + "\n" + " " * (indent - 2) + "]"


def dump_curves(components):
    """Serialize curves, ribbons or flux tubes to curve-file text."""
    parts = []
    for item in components:
        flux = None
        ribbon = None
        if isinstance(item, FluxTube):
            flux, ribbon = item.flux, item.ribbon
        elif isinstance(item, Ribbon):
            ribbon = item
        curve = ribbon.curve if ribbon is not None else item
        fields = [f'"closed": {"true" if curve.closed else "false"}']
        if flux is not None:
            fields.append(f'"flux": {_num(flux)}')
        fields.append('"vertices": ' + _triples(curve.vertices, 8))
        if ribbon is not None:
            fields.append('"framing": ' + _triples(ribbon.framing, 8))
            if np.any(ribbon.turns):
                fields.append('"turns": ' + json.dumps(
                    [int(t) for t in ribbon.turns]))
        parts.append("    {\n      " + ",\n      ".join(fields) + "\n    }")
    return ('{\n  "format": "' + FORMAT + '",\n  "version": 1,\n'
            '  "components": [\n' + ",\n".join(parts) + "\n  ]\n}\n")


def _array(value, where, width=3):
    try:
        arr = np.array(value, dtype=np.float64)
    except (TypeError, ValueError):
        raise CurveFileError(f"{where}: expected a list of numeric "
                             f"{width}-vectors") from None
    if arr.ndim != 2 or arr.shape[1] != width:
        raise CurveFileError(f"{where}: expected shape (n, {width})")
    return arr


def load_curves(text):
    """Parse curve-file text.

    Returns
    -------
    system : CurveSystem
        The centerlines (disjointness checked for closed components).
    items : list
        One entry per component: a ``FluxTube`` when a flux is given, a
        ``Ribbon`` when only a framing is given, else the curve.

    Raises
    ------
    CurveFileError
        On malformed JSON (with line, column and byte offset) or on a
        schema violation (with the JSON path).
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CurveFileError(
            f"line {exc.lineno}, column {exc.colno} (byte {exc.pos}): "
            f"{exc.msg}", (exc.lineno, exc.colno, exc.pos)) from None
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise CurveFileError(f'$.format: expected "{FORMAT}"')
    if doc.get("version") != VERSION:
        raise CurveFileError(f"$.version: unsupported version "
                             f"{doc.get('version')!r}")
    comps = doc.get("components")
    if not isinstance(comps, list) or not comps:
        raise CurveFileError("$.components: expected a non-empty list")
    curves, items = [], []
    for k, c in enumerate(comps):
        where = f"$.components[{k}]"
        if not isinstance(c, dict):
            raise CurveFileError(f"{where}: expected an object")
        closed = c.get("closed", True)
        if not isinstance(closed, bool):
            raise CurveFileError(f"{where}.closed: expected a boolean")
        verts = _array(c.get("vertices"), where + ".vertices")
        try:
            curve = PolygonalCurve(verts, closed)
            item = curve
            if "framing" in c:
                fr = _array(c["framing"], where + ".framing")
                item = Ribbon(curve, fr, c.get("turns"))
            if "flux" in c:
                if not isinstance(item, Ribbon):
                    raise CurveFileError(f"{where}.flux: a flux tube needs a "
                                         "framing")
                item = FluxTube(item, c["flux"])
        except CurveFileError:
            raise
        except WritheLabError as exc:
            raise CurveFileError(f"{where}: {exc}") from None
        curves.append(curve)
        items.append(item)
    system = CurveSystem(tuple(curves))
    return system, items


def read_curves(path):
    with open(path, encoding="utf-8") as fh:
        return load_curves(fh.read())


def write_curves(path, components):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dump_curves(components))


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


def dumps_json(obj):
    """Deterministic JSON text (shortest round-trip floats, fixed key
    order)."""
    return json.dumps(_plain(obj), indent=2, allow_nan=False) + "\n"


def write_json(path, obj):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_json(obj))


def _cell(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def dumps_csv(header, rows):
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(x) for x in r])
    return buf.getvalue()


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(dumps_csv(header, rows))
