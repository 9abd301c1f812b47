"""Grid snapshot files: one header line, then n^3 values with i fastest.

Text files (.txt) carry one shortest round-trip decimal per line; binary
files (.bin) carry flat little-endian 64-bit floats.  The header records
everything needed to rebuild the distribution and its kernel context:

    deltabolt-grid n=<int> v_max=<repr> time=<repr> eps=<repr> gamma=<repr>
"""

from __future__ import annotations

import numpy as np

from .grid import Distribution, GridSpec
from .kernel import KernelParams

_MAGIC = "deltabolt-grid"


def _header(f: Distribution, time: float, params: KernelParams) -> str:
    g = f.grid
    return (
        f"{_MAGIC} n={g.n} v_max={g.v_max!r} time={float(time)!r} "
        f"eps={params.eps!r} gamma={params.gamma!r}"
    )


def _parse_header(line: str) -> dict:
    parts = line.split()
    if not parts or parts[0] != _MAGIC:
        raise ValueError(f"not a snapshot header: {line!r}")
    fields = {}
    for tok in parts[1:]:
        key, _, val = tok.partition("=")
        if not val:
            raise ValueError(f"malformed header token {tok!r}")
        fields[key] = val
    missing = {"n", "v_max", "time", "eps", "gamma"} - fields.keys()
    if missing:
        raise ValueError(f"snapshot header missing {sorted(missing)}")
    return fields


def _format_of(path: str) -> str:
    p = str(path)
    if p.endswith(".txt"):
        return "txt"
    if p.endswith(".bin"):
        return "bin"
    raise ValueError(f"snapshot path must end in .txt or .bin, got {p!r}")


def write_snapshot(path, f: Distribution, time: float, params: KernelParams) -> None:
    fmt = _format_of(path)
    flat = f.values.ravel(order="F")
    header = _header(f, time, params)
    if fmt == "txt":
        with open(path, "w") as fh:
            fh.write(header + "\n")
            for x in flat:
                fh.write(repr(float(x)) + "\n")
    else:
        with open(path, "wb") as fh:
            fh.write((header + "\n").encode("ascii"))
            fh.write(flat.astype("<f8", copy=False).tobytes())


def read_snapshot(path) -> tuple[Distribution, float, KernelParams]:
    fmt = _format_of(path)
    if fmt == "txt":
        with open(path, "r") as fh:
            fields = _parse_header(fh.readline().rstrip("\n"))
            flat = np.array([float(line) for line in fh], dtype=float)
    else:
        with open(path, "rb") as fh:
            fields = _parse_header(fh.readline().decode("ascii").rstrip("\n"))
            flat = np.frombuffer(fh.read(), dtype="<f8").astype(float)
    n = int(fields["n"])
    grid = GridSpec(n, float(fields["v_max"]))
    if flat.size != n**3:
        raise ValueError(f"snapshot payload has {flat.size} values, expected {n**3}")
    values = flat.reshape((n, n, n), order="F")
    params = KernelParams(float(fields["eps"]), float(fields["gamma"]))
    return Distribution(grid, values), float(fields["time"]), params
