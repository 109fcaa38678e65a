"""Binary snapshot persistence.

Layout (little-endian): magic "OLDB2D01", u32 version, u32 n, f64 L, f64 t,
seven f64 parameters (nu, mu, K, alpha, beta, b, q_code), then four
row-major f64 physical-space arrays omega, tau11, tau12, tau22 of length
n^2 each. q_code encodes the variant: 0 = q_zero, 1 = full with Q on,
2 = stokes_toy, 3 = full with Q off.

Physical space is stored for portability; the spectral cache is rebuilt on
load, and the loaded physical arrays are kept verbatim so that
save(load(path)) reproduces the file byte for byte.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import SnapshotError
from .fields import ScalarField, SymTensorField
from .grid import Grid
from .model import ModelParams, SimState

MAGIC = b"OLDB2D01"
VERSION = 1
_HEADER = struct.Struct("<II9d")  # version, n, L, t, nu, mu, K, alpha, beta, b, q_code


def _q_code(params: ModelParams) -> float:
    if params.variant == "q_zero":
        return 0.0
    if params.variant == "stokes_toy":
        return 2.0
    return 1.0 if params.q_enabled else 3.0


def _params_from_code(code: float, nu, mu, K, alpha, beta, b) -> ModelParams:
    table = {
        0.0: ("q_zero", False),
        1.0: ("full", True),
        2.0: ("stokes_toy", False),
        3.0: ("full", False),
    }
    if code not in table:
        raise SnapshotError(f"unknown q_code {code!r} in snapshot")
    variant, q_enabled = table[code]
    return ModelParams(
        nu=nu, mu=mu, K=K, alpha=alpha, beta=beta, b=b,
        q_enabled=q_enabled, variant=variant,
    )


def _scalar_from_exact_physical(grid: Grid, values: np.ndarray) -> ScalarField:
    f = ScalarField.from_physical(grid, values)
    exact = np.ascontiguousarray(values, dtype=np.float64)
    exact.setflags(write=False)
    f.__dict__["physical"] = exact  # pre-seed the cache with the stored bytes
    return f


def save_snapshot(state: SimState, params: ModelParams, path) -> None:
    grid = state.grid
    header = MAGIC + _HEADER.pack(
        VERSION, grid.n, grid.length, state.t,
        params.nu, params.mu, params.K, params.alpha, params.beta, params.b,
        _q_code(params),
    )
    arrays = [state.omega.physical] + [c.physical for c in state.tau.components]
    with open(path, "wb") as fh:
        fh.write(header)
        for arr in arrays:
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load_snapshot(path) -> tuple[SimState, ModelParams]:
    data = Path(path).read_bytes()
    if len(data) < len(MAGIC) + _HEADER.size:
        raise SnapshotError(f"snapshot {path} is truncated")
    if data[: len(MAGIC)] != MAGIC:
        raise SnapshotError(f"bad magic in {path}")
    version, n, length, t, nu, mu, K, alpha, beta, b, q_code = _HEADER.unpack_from(
        data, len(MAGIC)
    )
    if version != VERSION:
        raise SnapshotError(f"unsupported snapshot version {version}")
    expected = len(MAGIC) + _HEADER.size + 4 * n * n * 8
    if len(data) != expected:
        raise SnapshotError(
            f"snapshot {path} has {len(data)} bytes, expected {expected}"
        )
    grid = Grid(n=n, length=length)
    offset = len(MAGIC) + _HEADER.size
    fields = []
    for _ in range(4):
        arr = np.frombuffer(data, dtype="<f8", count=n * n, offset=offset).reshape(n, n)
        fields.append(_scalar_from_exact_physical(grid, arr))
        offset += n * n * 8
    params = _params_from_code(q_code, nu, mu, K, alpha, beta, b)
    omega, t11, t12, t22 = fields
    state = SimState(t=t, omega=omega, tau=SymTensorField(t11, t12, t22))
    return state, params
