"""Plain-text and binary file formats for designs, arrays, codes and shares.

Every format starts with a one-line text header naming the format and its
parameters.  Field elements are written as their integer values.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .basecodes import LinearCode, OrthogonalArray
from .design import TransversalDesign
from .ff import field_new
from .inccode import IncidenceCode
from .linalg import rref


class FormatError(ValueError):
    pass


def _header(line: str, tag: str, nfields: int) -> list[int]:
    parts = line.split()
    if not parts or parts[0] != tag or len(parts) != nfields + 1:
        raise FormatError(f"expected a '{tag}' header with {nfields} fields, got {line!r}")
    return [int(x) for x in parts[1:]]


def _write_rows(fh, rows):
    for r in np.asarray(rows, dtype=np.int64):
        fh.write(" ".join(map(str, r.tolist())) + "\n")


def _read_rows(lines, nrows: int, ncols: int) -> np.ndarray:
    if len(lines) < nrows:
        raise FormatError(f"expected {nrows} rows, found {len(lines)}")
    if nrows == 0:
        return np.zeros((0, ncols), dtype=np.int64)
    arr = np.array([list(map(int, ln.split())) for ln in lines[:nrows]], dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != ncols:
        raise FormatError(f"rows must have {ncols} entries")
    return arr


def _lines(path) -> list[str]:
    return [ln for ln in Path(path).read_text().splitlines() if ln.strip()]


# designs

def write_td(D: TransversalDesign, path):
    with open(path, "w") as fh:
        fh.write(f"TD {D.ell} {D.s} {D.lam} {D.strength} {D.nblocks}\n")
        _write_rows(fh, D.blocks)


def read_td(path) -> TransversalDesign:
    lines = _lines(path)
    ell, s, lam, t, nb = _header(lines[0], "TD", 5)
    return TransversalDesign(ell, s, lam, t, _read_rows(lines[1:], nb, ell))


# orthogonal arrays

def write_oa(A: OrthogonalArray, path):
    with open(path, "w") as fh:
        fh.write(f"OA {A.s} {A.ell} {A.strength} {A.lam} {A.rows.shape[0]}\n")
        _write_rows(fh, A.rows)


def read_oa(path) -> OrthogonalArray:
    lines = _lines(path)
    s, ell, t, lam, nrows = _header(lines[0], "OA", 5)
    return OrthogonalArray(s, ell, t, lam, _read_rows(lines[1:], nrows, ell))


# base codes: CODE p e ell k, then the k generator rows

def write_code(C: LinearCode, path):
    with open(path, "w") as fh:
        fh.write(f"CODE {C.F.p} {C.F.e} {C.length} {C.k}\n")
        _write_rows(fh, C.G)


def read_code(path) -> LinearCode:
    lines = _lines(path)
    p, e, ell, k = _header(lines[0], "CODE", 4)
    return LinearCode(field_new(p, e), _read_rows(lines[1:], k, ell))


# incidence codes: the design lives in a sibling .td file

def write_ic(C: IncidenceCode, path):
    with open(path, "w") as fh:
        fh.write(f"IC {C.F.p} {C.F.e} {C.n} {C.k} {C.ell} {C.s}\n")
        _write_rows(fh, C.generator)
        fh.write(" ".join(map(str, C.sigma)) + "\n")


def read_ic(path, design: TransversalDesign | None = None) -> IncidenceCode:
    path = Path(path)
    lines = _lines(path)
    p, e, n, k, ell, s = _header(lines[0], "IC", 6)
    G = _read_rows(lines[1:], k, n)
    sigma = [int(x) for x in lines[1 + k].split()] if k else []
    if design is None:
        design = read_td(path.with_suffix(".td"))
    if design.ell != ell or design.s != s:
        raise FormatError("code and design parameters disagree")
    E = rref(G, p)[0][:k] if k else G.copy()
    return IncidenceCode(field_new(p, e), design, G, sigma, E, n - k)


def write_scheme(C: IncidenceCode, stem):
    """``stem.td`` plus ``stem.ic``; returns the path of the .ic file."""
    stem = Path(stem)
    if stem.suffix in (".ic", ".td"):
        stem = stem.with_suffix("")
    write_td(C.design, stem.with_suffix(".td"))
    write_ic(C, stem.with_suffix(".ic"))
    return stem.with_suffix(".ic")


# shares: text header line, then s*m little-endian uint32 values

def share_bytes(values, p: int, e: int, group_index: int) -> bytes:
    v = np.asarray(values, dtype=np.int64)
    if v.ndim == 1:
        v = v[:, None]
    s, m = v.shape
    head = f"SHARE {p} {e} {s} {m} {group_index}\n".encode()
    return head + v.astype("<u4").tobytes()


def parse_share(data: bytes) -> tuple[dict, np.ndarray]:
    nl = data.find(b"\n")
    if nl < 0:
        raise FormatError("share is missing its header line")
    p, e, s, m, g = _header(data[:nl].decode(), "SHARE", 5)
    body = data[nl + 1 :]
    if len(body) != 4 * s * m:
        raise FormatError(f"share body has {len(body)} bytes, expected {4 * s * m}")
    vals = np.frombuffer(body, dtype="<u4").astype(np.int64).reshape(s, m)
    if vals.size and vals.max() >= p**e:
        raise FormatError("share holds values outside the field")
    return {"p": p, "e": e, "s": s, "m": m, "group_index": g}, vals


def write_share(path, values, p: int, e: int, group_index: int):
    Path(path).write_bytes(share_bytes(values, p, e, group_index))


def read_share(path) -> tuple[dict, np.ndarray]:
    return parse_share(Path(path).read_bytes())


def write_manifest(path, manifest: dict):
    Path(path).write_text(json.dumps(manifest, indent=2) + "\n")


def read_manifest(path) -> dict:
    return json.loads(Path(path).read_text())
