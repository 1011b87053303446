"""Canonical JSON files (format "moff/1") and CSV export.

Exact files never contain floats: rationals are "p/q" strings and basis
grids are Gaussian integers [a, b] meaning a + bi.  Keys are sorted and
the layout is fixed, so write -> read -> write is byte-stable.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, is_dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .designs import BlockFamily
from .fusion import Certificate, FusionFrame
from .mub import (SCALE_INV_SQRT_DIM, SCALE_NONE, OrthonormalBasisSet, exact_basis,
                  float_basis)
from .numerics import EXACT, FLOAT, frac_str

FORMAT = "moff/1"


class FormatError(ValueError):
    """File does not follow the moff/1 layout."""


def _plain(x):
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, Fraction):
        return frac_str(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_plain(v) for v in x]
    if is_dataclass(x):
        return _plain(asdict(x))
    raise TypeError(f"cannot serialize {type(x).__name__}")


def dumps(obj: dict) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=1, allow_nan=False) + "\n"


def write_json(path, obj: dict) -> str:
    text = dumps(obj)
    Path(path).write_text(text)
    return text


def read_json(path, kind: str | None = None) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise FormatError(f"{path}: missing \"format\": \"{FORMAT}\"")
    if kind is not None and doc.get("kind") != kind:
        raise FormatError(f"{path}: expected a {kind} file, found {doc.get('kind')!r}")
    return doc


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _frac(s) -> Fraction:
    if isinstance(s, bool) or not isinstance(s, (str, int)):
        raise FormatError(f"expected a rational string, found {s!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad rational {s!r}") from exc


def _need(doc: dict, *keys):
    missing = [k for k in keys if k not in doc]
    if missing:
        raise FormatError(f"missing keys {missing}")
    return [doc[k] for k in keys]


# --------------------------------------------------------------------------
# basis sets


def basis_set_doc(S: OrthonormalBasisSet) -> dict:
    bases = []
    for b in S.bases:
        if b.exact:
            ent = np.stack([b.re, b.im], axis=-1).tolist()
            bases.append({"scale": b.scale, "den": int(b.den), "entries": ent})
        else:
            ent = np.stack([b.data.real, b.data.imag], axis=-1).tolist()
            bases.append({"scale": SCALE_NONE, "entries": ent})
    doc = {"format": FORMAT, "kind": "basis-set", "field": S.field, "dim": S.dim,
           "mode": S.mode, "bases": bases}
    for key in ("construction", "irreducible"):
        if key in S.meta:
            doc[key] = S.meta[key]
    return doc


def _exact_grid(entries, m: int):
    """Gaussian-integer pairs, or {"re","im"} rationals, to (re, im, den)."""
    flat = [e for row in entries for e in row]
    if len(entries) != m or any(len(row) != m for row in entries):
        raise FormatError(f"basis entries must form a {m}x{m} grid")
    if all(isinstance(e, dict) for e in flat):
        fr = [(_frac(e.get("re", "0")), _frac(e.get("im", "0"))) for e in flat]
        den = math.lcm(*(x.denominator for p in fr for x in p))
        re = [[int(fr[i * m + j][0] * den) for j in range(m)] for i in range(m)]
        im = [[int(fr[i * m + j][1] * den) for j in range(m)] for i in range(m)]
        return re, im, den
    if all(isinstance(e, list) and len(e) == 2 and all(
            isinstance(x, int) and not isinstance(x, bool) for x in e) for e in flat):
        return [[e[0] for e in row] for row in entries], \
            [[e[1] for e in row] for row in entries], 1
    raise FormatError("exact basis entries must be [a, b] integers or {re, im} rationals")


def basis_set_from_doc(doc: dict) -> OrthonormalBasisSet:
    field, dim, mode, bases = _need(doc, "field", "dim", "mode", "bases")
    if mode not in (EXACT, FLOAT):
        raise FormatError(f"unknown mode {mode!r}")
    out = []
    for bd in bases:
        ent = _need(bd, "entries")[0]
        if mode == EXACT:
            scale = bd.get("scale", SCALE_NONE)
            if scale not in (SCALE_NONE, SCALE_INV_SQRT_DIM):
                raise FormatError(f"unknown scale {scale!r}")
            re, im, den = _exact_grid(ent, dim)
            den *= int(bd.get("den", 1))
            out.append(exact_basis(re, im, scale, den))
        else:
            a = np.asarray(ent, dtype=np.float64)
            if a.shape != (dim, dim, 2):
                raise FormatError(f"float basis entries must have shape ({dim}, {dim}, 2)")
            out.append(float_basis(a[..., 0] + 1j * a[..., 1]))
    meta = {k: doc[k] for k in ("construction", "irreducible") if k in doc}
    try:
        return OrthonormalBasisSet(field, int(dim), tuple(out), meta)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


# --------------------------------------------------------------------------
# designs


def design_doc(F: BlockFamily) -> dict:
    return {"format": FORMAT, "kind": "design", "m": F.m, "l": F.l,
            "blocks": [list(b) for b in F.blocks]}


def design_from_doc(doc: dict) -> BlockFamily:
    m, l, blocks = _need(doc, "m", "l", "blocks")
    try:
        return BlockFamily(int(m), [tuple(b) for b in blocks], int(l))
    except (TypeError, ValueError) as exc:
        raise FormatError(str(exc)) from exc


# --------------------------------------------------------------------------
# frames


def frame_doc(ff: FusionFrame) -> dict:
    projs = []
    if ff.mode == EXACT:
        den = ff.den
        for j in range(ff.n):
            re, im = ff.re[j], ff.im[j]
            projs.append([[{"re": frac_str(Fraction(int(re[a, b]), den)),
                            "im": frac_str(Fraction(int(im[a, b]), den))}
                           for b in range(ff.m)] for a in range(ff.m)])
    else:
        for P in ff.data:
            projs.append([[{"re": float(z.real), "im": float(z.imag)} for z in row]
                          for row in P])
    doc = {"format": FORMAT, "kind": "frame", "field": ff.field, "m": ff.m, "l": ff.l,
           "mode": ff.mode, "projections": projs}
    if ff.mode == FLOAT:
        doc["tolerance"] = ff.tol
    if ff.provenance is not None:
        doc["provenance"] = [{"basis": k, "block": list(b)} for k, b in ff.provenance]
    return doc


def frame_from_doc(doc: dict, tol: float | None = None) -> FusionFrame:
    field, m, l, mode, projs = _need(doc, "field", "m", "l", "mode", "projections")
    m, l = int(m), int(l)
    prov = doc.get("provenance")
    if prov is not None:
        prov = [(p["basis"], p["block"]) for p in prov]
    if not isinstance(projs, list) or not projs:
        raise FormatError("frame needs a non-empty projection list")
    if any(len(P) != m or any(len(row) != m for row in P) for P in projs):
        raise FormatError(f"every projection must be {m}x{m}")
    try:
        if mode == EXACT:
            fr = [(_frac(e["re"]), _frac(e["im"])) for P in projs for row in P for e in row]
            den = math.lcm(*(x.denominator for p in fr for x in p))
            re = np.array([int(a * den) for a, _ in fr], dtype=object)
            im = np.array([int(b * den) for _, b in fr], dtype=object)
            shape = (len(projs), m, m)
            return FusionFrame(field, m, l, re=re.reshape(shape), im=im.reshape(shape),
                               den=den, provenance=prov)
        if mode == FLOAT:
            data = np.array([[[complex(e["re"], e["im"]) for e in row] for row in P]
                             for P in projs])
            t = tol if tol is not None else float(doc.get("tolerance", 1e-10))
            return FusionFrame(field, m, l, data=data, provenance=prov, tol=t)
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed projection entry: {exc}") from exc
    raise FormatError(f"unknown mode {mode!r}")


# --------------------------------------------------------------------------
# reports


def certificate_doc(cert: Certificate, inputs: dict | None = None,
                    expectations: dict | None = None) -> dict:
    from . import __version__

    body = asdict(cert)
    body["is_2design"] = cert.is_2design
    side = body["sidelnikov"]
    side["lhs_float"], side["rhs_float"] = float(side["lhs"]), float(side["rhs"])
    doc = {"format": FORMAT, "kind": "certificate", "version": __version__,
           "mode": cert.mode, "tolerance": cert.tol, "certificate": body,
           "inputs": inputs or {}}
    if expectations is not None:
        doc["expectations"] = expectations
    return doc


def report_doc(kind: str, parameters: dict, result: dict) -> dict:
    from . import __version__

    return {"format": FORMAT, "kind": kind, "version": __version__,
            "parameters": parameters, "result": result}
