"""Wavefunction and trace export.

Binary snapshot layout (little-endian):

    offset  type      field
    0       8 bytes   magic b"IONTWF01"
    8       float64   z_min (m)
    16      float64   z_max (m)
    24      uint64    points
    32      float64   dt (s)
    40      uint64    steps
    48      float64[2*points]  interleaved (Re psi, Im psi)
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .grid import GridError, GridSpec, Wavefunction

MAGIC = b"IONTWF01"
_HEADER = struct.Struct("<8sddQdQ")


def write_wavefunction_binary(psi: Wavefunction, path: str | Path) -> None:
    g = psi.grid
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, g.z_min, g.z_max, g.points, g.dt, g.steps))
        fh.write(psi.amplitudes.astype("<c16").tobytes())


def read_wavefunction_binary(path: str | Path) -> Wavefunction:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise GridError("truncated wavefunction snapshot")
    magic, z_min, z_max, points, dt, steps = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise GridError("not a wavefunction snapshot")
    amp = np.frombuffer(data, dtype="<c16", offset=_HEADER.size)
    if amp.size != points:
        raise GridError("snapshot length does not match its header")
    return Wavefunction(GridSpec(z_min, z_max, int(points), dt, int(steps)), amp.astype(complex))


def write_wavefunction_csv(psi: Wavefunction, path: str | Path) -> None:
    table = np.column_stack([psi.grid.z, psi.amplitudes.real, psi.amplitudes.imag])
    with open(path, "w", newline="") as fh:
        fh.write("z,re_psi,im_psi\nm,m^-1/2,m^-1/2\n")
        np.savetxt(fh, table, delimiter=",", fmt="%.17g")


def read_wavefunction_csv(path: str | Path, dt: float = 1.0, steps: int = 1) -> Wavefunction:
    table = np.loadtxt(path, delimiter=",", skiprows=2, ndmin=2)
    z = table[:, 0]
    dz = z[1] - z[0]
    grid = GridSpec(z[0], z[0] + dz * z.size, z.size, dt, steps)
    return Wavefunction(grid, table[:, 1] + 1j * table[:, 2])


def write_trace_csv(trace: np.ndarray, path: str | Path, columns, units) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(columns) + "\n" + ",".join(units) + "\n")
        np.savetxt(fh, np.atleast_2d(trace), delimiter=",", fmt="%.17g")
