"""Self-describing JSON state files.

A file carries the split dimensions plus exactly one of:

* ``"matrix"``: a dense complex density matrix as nested lists with each
  complex entry encoded as a two-element ``[re, im]`` array, or
* ``"spectrum"``: a list of probabilities (eigenvalues of a diagonal state).

Spectra are renormalized when their sum is within 1e-8 of one and rejected
otherwise; matrices must satisfy the density-matrix invariants as given.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import StateFileError, ValidationError
from .qstate import BipartiteDims, DensityMatrix

FORMAT_VERSION = 1
SPECTRUM_SUM_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class StateFile:
    dims: BipartiteDims
    matrix: np.ndarray | None
    spectrum: np.ndarray | None
    label: str | None
    format_version: int

    @property
    def is_dense(self) -> bool:
        return self.matrix is not None

    def density_matrix(self) -> DensityMatrix:
        if self.matrix is None:
            raise StateFileError("state file carries only a spectrum, not a dense matrix")
        return DensityMatrix(self.matrix)

    def probabilities(self) -> np.ndarray:
        """Descending probability vector (eigenvalues for dense files)."""
        if self.spectrum is not None:
            return self.spectrum
        vals = np.linalg.eigvalsh(self.matrix)
        return np.clip(np.sort(vals)[::-1], 0.0, None)


def _complex_matrix(raw, n: int) -> np.ndarray:
    arr = np.asarray(raw, dtype=float)
    if arr.shape != (n, n, 2):
        raise StateFileError(
            f"matrix must be {n} x {n} with [re, im] entries, got shape {arr.shape}"
        )
    return arr[..., 0] + 1j * arr[..., 1]


def _spectrum(raw, n: int) -> np.ndarray:
    p = np.asarray(raw, dtype=float)
    if p.ndim != 1 or p.size != n:
        raise StateFileError(f"spectrum must hold {n} probabilities, got shape {p.shape}")
    if p.min() < -1e-12:
        raise StateFileError(f"negative probability in spectrum: {p.min()}")
    total = p.sum()
    if abs(total - 1.0) > SPECTRUM_SUM_TOL:
        raise StateFileError(
            f"spectrum sums to {total}, more than {SPECTRUM_SUM_TOL} away from 1"
        )
    p = np.clip(p, 0.0, None) / total
    return np.sort(p)[::-1]


def load_statefile(path) -> StateFile:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise StateFileError(f"cannot read state file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise StateFileError(f"state file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise StateFileError("state file must be a JSON object")

    version = data.get("format_version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise StateFileError(f"unsupported format_version {version}")
    try:
        dims = BipartiteDims(int(data["d_a"]), int(data["d_b"]))
    except (KeyError, TypeError, ValueError, ValidationError) as exc:
        raise StateFileError(f"bad or missing d_a/d_b: {exc}") from exc

    has_matrix = "matrix" in data
    has_spectrum = "spectrum" in data
    if has_matrix == has_spectrum:
        raise StateFileError("state file must carry exactly one of 'matrix' or 'spectrum'")

    matrix = spectrum = None
    if has_matrix:
        mat = _complex_matrix(data["matrix"], dims.total)
        try:
            DensityMatrix(mat)
        except ValidationError as exc:
            raise StateFileError(f"matrix is not a valid density matrix: {exc}") from exc
        matrix = mat
    else:
        spectrum = _spectrum(data["spectrum"], dims.total)

    label = data.get("label")
    if label is not None and not isinstance(label, str):
        raise StateFileError("label must be a string")
    return StateFile(
        dims=dims, matrix=matrix, spectrum=spectrum, label=label, format_version=version
    )


def save_statefile(path, dims: BipartiteDims, matrix=None, spectrum=None, label=None) -> None:
    if (matrix is None) == (spectrum is None):
        raise StateFileError("provide exactly one of matrix or spectrum")
    doc: dict = {"format_version": FORMAT_VERSION, "d_a": dims.d_a, "d_b": dims.d_b}
    if label is not None:
        doc["label"] = label
    if matrix is not None:
        m = np.asarray(matrix, dtype=complex)
        doc["matrix"] = [
            [[float(v.real), float(v.imag)] for v in row] for row in m
        ]
    else:
        doc["spectrum"] = [float(x) for x in np.asarray(spectrum, dtype=float)]
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


def file_digest(path) -> str:
    """SHA-256 of the raw file bytes, for report provenance."""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
