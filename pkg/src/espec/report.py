"""Spectrum documents (JSON), plot tables (CSV) and atomic file output."""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

from . import __version__
from .analysis import DegeneracyGroup, PhaseSignature, distribution
from .spectrum import EntanglementSpectrum

SCHEMA_VERSION = 1


def _dist_rows(dist: dict) -> list[list[int]]:
    return [[int(u), int(d), int(c)] for (u, d), c in sorted(dist.items())]


def spectrum_document(
    spec: EntanglementSpectrum,
    groups: list[DegeneracyGroup],
    signature: PhaseSignature,
    metadata: dict,
    max_groups: int = 16,
) -> dict:
    levels = [
        {"xi": float(x), "n_up": int(u), "n_down": int(d), "weight": float(w)}
        for x, u, d, w in zip(spec.xi, spec.n_up, spec.n_down, spec.weights)
    ]
    group_rows = [
        {
            "xi_rep": g.xi_rep,
            "multiplicity": g.multiplicity,
            "splitting": g.splitting,
            "distribution": _dist_rows(distribution(g)),
        }
        for g in groups[:max_groups]
    ]
    meta = {"tool": "espec", "version": __version__, "schema_version": SCHEMA_VERSION}
    meta.update(metadata)
    meta.update(complete=bool(spec.complete), dropped=int(spec.dropped), n_levels=len(spec))
    return {
        "metadata": meta,
        "signature": {
            "tag": signature.tag,
            "ground_multiplicity": signature.ground_multiplicity,
            "splitting": signature.splitting,
            "phase_label": signature.label(metadata.get("phase_labels")),
            "distribution": _dist_rows(signature.distribution),
        },
        "groups": group_rows,
        "levels": levels,
    }


def dumps(doc: dict) -> str:
    # float repr is the shortest string that parses back to the same double
    return json.dumps(doc, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def loads(text: str) -> dict:
    return json.loads(text)


def document_spectrum(doc: dict) -> EntanglementSpectrum:
    lv = doc["levels"]
    return EntanglementSpectrum(
        [r["xi"] for r in lv],
        [r["n_up"] for r in lv],
        [r["n_down"] for r in lv],
        complete=doc["metadata"]["complete"],
        dropped=doc["metadata"]["dropped"],
    )


def levels_csv(spec: EntanglementSpectrum) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["xi", "n_up", "n_down", "weight"])
    for x, u, d, lam in zip(spec.xi, spec.n_up, spec.n_down, spec.weights):
        w.writerow([format(x, ".17g"), int(u), int(d), format(lam, ".17g")])
    return buf.getvalue()


def plot_table(spec: EntanglementSpectrum) -> str:
    """Two columns: subsystem particle number and xi, one row per level."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n_particles_total", "xi"])
    for x, u, d in zip(spec.xi, spec.n_up, spec.n_down):
        w.writerow([int(u + d), format(x, ".17g")])
    return buf.getvalue()


def write_atomic(path: str | os.PathLike, text: str | bytes) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = text.encode("utf-8") if isinstance(text, str) else text
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path
