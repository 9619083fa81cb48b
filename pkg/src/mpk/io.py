"""JSON parsing for matrices, words, Gaussians, test functions and symbols; array dumps."""

import hashlib
import json
import struct

import numpy as np

from . import metaplectic as mp
from .gaussian import GaussianState, standard_gaussian
from .numerics.hermite import QuadraticSymbol, hcw_symbol, hermite_functions

CSV_HEADER = "# mpk-csv/1"
BINARY_MAGIC = b"MPKG"


class ParseError(ValueError):
    """Malformed input file (maps to exit code 2)."""


def load_json(path):
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(raw), hashlib.sha256(raw).hexdigest()
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc


def _real_matrix(value, n, what):
    """Square real matrix; a bare number is accepted when ``n == 1``."""
    try:
        M = np.atleast_2d(np.asarray(value, dtype=float))
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{what}: not a real matrix") from exc
    if M.shape != (n, n):
        raise ParseError(f"{what}: expected shape ({n}, {n}), got {M.shape}")
    return M


def _complex(value, what):
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ParseError(f"{what}: complex numbers are written [re, im]")


def _require(obj, key, what):
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError(f"{what}: missing field {key!r}")
    return obj[key]


def _dimension(obj, what):
    n = _require(obj, "n", what)
    if not isinstance(n, int) or n < 1:
        raise ParseError(f"{what}: n must be a positive integer")
    return n


def parse_matrix(obj):
    """``{"n", "matrix"}`` or ``{"n", "blocks": {"11", "12", "21", "22"}}``; returns a raw 2n x 2n array."""
    n = _dimension(obj, "matrix")
    if "matrix" in obj:
        try:
            M = np.asarray(obj["matrix"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise ParseError("matrix: entries must be numbers") from exc
        if M.shape != (2 * n, 2 * n):
            raise ParseError(f"matrix: expected shape ({2 * n}, {2 * n}), got {M.shape}")
        return M
    blocks = _require(obj, "blocks", "matrix")
    parts = [_real_matrix(_require(blocks, k, "blocks"), n, f"block {k}") for k in ("11", "12", "21", "22")]
    return np.block([[parts[0], parts[1]], [parts[2], parts[3]]])


def matrix_to_json(M):
    M = np.asarray(M, dtype=float)
    return {"n": M.shape[0] // 2, "matrix": M.tolist()}


def _factor(obj, n):
    kind = _require(obj, "kind", "factor")
    m = obj.get("m")
    try:
        if kind == "free":
            return mp.FreeFactor.make(_real_matrix(_require(obj, "P", "free"), n, "P"),
                                      _real_matrix(_require(obj, "L", "free"), n, "L"),
                                      _real_matrix(_require(obj, "Q", "free"), n, "Q"), m)
        if kind == "chirp":
            return mp.Chirp(_real_matrix(_require(obj, "A", "chirp"), n, "A"), m or 0)
        if kind == "dilation":
            return mp.Dilation(_real_matrix(_require(obj, "B", "dilation"), n, "B"), m)
        if kind == "freqchirp":
            return mp.FreqChirp(_real_matrix(_require(obj, "C", "freqchirp"), n, "C"), m or 0)
        if kind == "fourier":
            return mp.NormalizedFourier(n)
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"{kind} factor: {exc}") from exc
    raise ParseError(f"unknown factor kind {kind!r}")


def parse_word(obj):
    n = _dimension(obj, "word")
    factors = _require(obj, "factors", "word")
    if not isinstance(factors, list):
        raise ParseError("word: factors must be a list")
    phase = _complex(obj.get("scalar_phase", [1.0, 0.0]), "scalar_phase")
    return mp.MetaplecticWord([_factor(f, n) for f in factors], n, phase)


def factor_to_json(f):
    if isinstance(f, mp.FreeFactor):
        return {"kind": "free", "P": f.P.tolist(), "L": f.L.tolist(), "Q": f.Q.tolist(), "m": f.m}
    if isinstance(f, mp.Chirp):
        return {"kind": "chirp", "A": f.A.tolist(), "m": f.m}
    if isinstance(f, mp.Dilation):
        return {"kind": "dilation", "B": f.B.tolist(), "m": f.m}
    if isinstance(f, mp.FreqChirp):
        return {"kind": "freqchirp", "C": f.C.tolist(), "m": f.m}
    return {"kind": "fourier", "m": 0}


def word_to_json(w):
    z = complex(w.scalar_phase)
    return {"n": w.n, "factors": [factor_to_json(f) for f in w.factors], "scalar_phase": [z.real, z.imag]}


def parse_gaussian(obj):
    c = _complex(_require(obj, "c", "gaussian"), "c")
    rows = _require(obj, "theta", "gaussian")
    try:
        theta = np.array([[_complex(v, "theta") for v in row] for row in rows])
        return GaussianState(c, theta)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"gaussian: {exc}") from exc


def gaussian_to_json(g):
    return {"c": [g.c.real, g.c.imag], "theta": [[[z.real, z.imag] for z in row] for row in g.theta]}


def parse_function(obj):
    """Callable of one variable for the Wigner dump.

    Accepted forms: ``{"preset": "g0"}``, ``{"preset": "u1"}`` (``x e^{-pi x^2}``),
    ``{"hermite": [[re, im], ...]}`` (coefficients of the Hermite basis) or a
    one-dimensional Gaussian ``{"c", "theta"}``.
    """
    if not isinstance(obj, dict):
        raise ParseError("function description must be an object")
    if "preset" in obj:
        name = obj["preset"]
        if name == "g0":
            g = standard_gaussian(1)
            return lambda x: g(x)
        if name == "u1":
            return lambda x: x * np.exp(-np.pi * x ** 2)
        raise ParseError(f"unknown function preset {name!r}")
    if "hermite" in obj:
        coef = np.array([_complex(v, "hermite") for v in obj["hermite"]])
        if coef.size == 0:
            raise ParseError("hermite: empty coefficient list")
        return lambda x: coef @ hermite_functions(x, coef.size)
    g = parse_gaussian(obj)
    if g.n != 1:
        raise ParseError("only one-dimensional functions can be dumped")
    return lambda x: g(x)


def parse_symbol(obj):
    """Quadratic symbol: a preset (``hcw`` with ``c``/``omega``, ``harmonic``) or explicit ``Q``."""
    if not isinstance(obj, dict):
        raise ParseError("symbol description must be an object")
    preset = obj.get("preset")
    try:
        if preset == "hcw":
            return hcw_symbol(float(obj.get("c", 1.0)), float(obj.get("omega", 1.0)))
        if preset == "harmonic":
            n = int(obj.get("n", 1))
            return QuadraticSymbol(np.eye(2 * n))
        if preset is not None:
            raise ParseError(f"unknown symbol preset {preset!r}")
        Q = np.asarray(_require(obj, "Q", "symbol"), dtype=float)
        linear = obj.get("linear")
        return QuadraticSymbol(Q, float(obj.get("constant", 0.0)),
                               None if linear is None else np.asarray(linear, dtype=float))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"symbol: {exc}") from exc


def write_binary(path, values):
    """16-byte header (magic, u32 rank, u32 per-axis N, u32 zero) then little-endian complex pairs."""
    values = np.asarray(values, dtype=complex)
    N = values.shape[0]
    if any(k != N for k in values.shape):
        raise ValueError("binary dumps need equal axis lengths")
    header = BINARY_MAGIC + struct.pack("<III", values.ndim, N, 0)
    body = np.empty(values.shape + (2,), dtype="<f8")
    body[..., 0] = values.real
    body[..., 1] = values.imag
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(body.tobytes(order="C"))


def read_binary(path):
    with open(path, "rb") as fh:
        header = fh.read(16)
        if len(header) != 16 or header[:4] != BINARY_MAGIC:
            raise ParseError(f"{path}: not an MPKG file")
        rank, N, _ = struct.unpack("<III", header[4:])
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != 2 * N ** rank:
        raise ParseError(f"{path}: expected {N ** rank} complex values")
    pairs = data.reshape((N,) * rank + (2,))
    return pairs[..., 0] + 1j * pairs[..., 1]


def write_grid_csv(path, axes, values):
    """Rows ``x[,y],re,im`` for a one- or two-dimensional array."""
    values = np.asarray(values, dtype=complex)
    names = ["x", "y"][: values.ndim]
    grids = np.meshgrid(*axes, indexing="ij")
    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        fh.write(",".join(names + ["re", "im"]) + "\n")
        cols = [g.ravel() for g in grids] + [values.real.ravel(), values.imag.ravel()]
        for row in zip(*cols):
            fh.write(",".join(f"{v:.12g}" for v in row) + "\n")


def write_table_csv(fh, columns, rows):
    fh.write(CSV_HEADER + "\n")
    fh.write(",".join(columns) + "\n")
    for row in rows:
        fh.write(",".join(f"{v:.12g}" for v in row) + "\n")


def free_data_to_json(d):
    return {"P": d.P.tolist(), "L": d.L.tolist(), "Q": d.Q.tolist()}


def abc_data_to_json(d):
    return {"A": d.A.tolist(), "B": d.B.tolist(), "C": d.C.tolist()}

