"""Boolean and vector-valued functions on packed bit inputs.

Conventions, shared package-wide:

* A width-w input (x_1, ..., x_w) is the integer sum_i x_i * 2^(w-i), so
  coordinate x_1 is the most significant bit and lexicographic order on bit
  strings equals numeric order on indices.
* f: {0,1}^n -> {0,1} is a dense table of 2^n bits indexed by packed input.
* F: {0,1}^m -> {0,1}^n is a dense table of 2^m output words; output
  component 1 is the most significant output bit.
* Walsh coefficients are stored as exact integers W[w] = 2^n * S_f(w) where
  S_f(w) = 2^-n * sum_x (-1)^(f(x) + w.x), so Parseval and the counting
  identity relating spectra to derivative counts hold exactly in int64.

Widths are capped at 24 bits; every table here is dense.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Union

import numpy as np

__all__ = [
    "MAX_WIDTH",
    "BooleanFunction",
    "VectorFunction",
    "WalshSpectrum",
    "DifferentialCount",
    "walsh_spectrum",
    "dot_array",
    "derivative_table",
    "derivative_count",
    "structure_defect",
    "differential_uniformity",
    "structure_free_uniformity",
    "linear_structures_exhaustive",
    "vector_structures_exhaustive",
    "restricted_spectral_mass",
    "derivative_count_via_spectrum",
    "linear_structures_via_spectrum",
    "random_boolean_function",
    "random_vector_function",
    "format_hex_table",
    "parse_hex_tokens",
    "save_function",
    "load_function",
]

MAX_WIDTH = 24


def _check_width(w: int, name: str = "width") -> None:
    if not 1 <= w <= MAX_WIDTH:
        raise ValueError(f"{name} must be in [1, {MAX_WIDTH}], got {w}")


class BooleanFunction:
    """A function {0,1}^n -> {0,1} held as a dense bit table."""

    __slots__ = ("n", "table")

    def __init__(self, n: int, table) -> None:
        _check_width(n, "n")
        t = np.ascontiguousarray(table, dtype=np.uint8)
        if t.shape != (1 << n,):
            raise ValueError(f"table must have 2^{n} entries, got shape {t.shape}")
        if t.max(initial=0) > 1:
            raise ValueError("truth table entries must be bits")
        t.setflags(write=False)
        self.n = n
        self.table = t

    def __call__(self, x: int) -> int:
        return int(self.table[x])

    def __eq__(self, other) -> bool:
        if not isinstance(other, BooleanFunction):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.table, other.table))

    def __repr__(self) -> str:
        return f"BooleanFunction(n={self.n})"


class VectorFunction:
    """A function {0,1}^m -> {0,1}^n held as a dense word table."""

    __slots__ = ("m", "n", "table", "_components")

    def __init__(self, m: int, n: int, table) -> None:
        _check_width(m, "m")
        _check_width(n, "n")
        t = np.ascontiguousarray(table, dtype=np.int64)
        if t.shape != (1 << m,):
            raise ValueError(f"table must have 2^{m} entries, got shape {t.shape}")
        if t.min(initial=0) < 0 or t.max(initial=0) >= (1 << n):
            raise ValueError(f"table entries must fit in {n} output bits")
        t.setflags(write=False)
        self.m = m
        self.n = n
        self.table = t
        self._components: dict[int, BooleanFunction] = {}

    def __call__(self, x: int) -> int:
        return int(self.table[x])

    def component(self, j: int) -> BooleanFunction:
        """Output bit j as a boolean function; j is 1-based, 1 = most significant."""
        if not 1 <= j <= self.n:
            raise ValueError(f"component index must be in [1, {self.n}], got {j}")
        if j not in self._components:
            shift = self.n - j
            bits = ((self.table >> shift) & 1).astype(np.uint8)
            self._components[j] = BooleanFunction(self.m, bits)
        return self._components[j]

    def __eq__(self, other) -> bool:
        if not isinstance(other, VectorFunction):
            return NotImplemented
        return (
            self.m == other.m
            and self.n == other.n
            and bool(np.array_equal(self.table, other.table))
        )

    def __repr__(self) -> str:
        return f"VectorFunction(m={self.m}, n={self.n})"


class WalshSpectrum:
    """Exact integer Walsh coefficients of a boolean function."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs) -> None:
        _check_width(n, "n")
        c = np.ascontiguousarray(coeffs, dtype=np.int64)
        if c.shape != (1 << n,):
            raise ValueError(f"spectrum must have 2^{n} entries, got shape {c.shape}")
        c.setflags(write=False)
        self.n = n
        self.coeffs = c

    def value(self, w: int) -> Fraction:
        """The normalized coefficient S_f(w) as an exact rational."""
        return Fraction(int(self.coeffs[w]), 1 << self.n)

    def values(self) -> list[Fraction]:
        return [self.value(w) for w in range(1 << self.n)]

    def squared_masses(self) -> np.ndarray:
        """Integer masses W[w]^2; they sum to 4^n exactly."""
        c = self.coeffs.astype(np.int64)
        return c * c

    def support(self) -> np.ndarray:
        """All w with nonzero coefficient (the possible sampler outcomes)."""
        return np.flatnonzero(self.coeffs)

    def __repr__(self) -> str:
        return f"WalshSpectrum(n={self.n})"


def walsh_spectrum(f: BooleanFunction) -> WalshSpectrum:
    """Integer Walsh transform in O(n 2^n) via the in-place butterfly."""
    b = (1 - 2 * f.table.astype(np.int64)).reshape(1, -1)
    h = 1
    size = b.shape[1]
    while h < size:
        b = b.reshape(-1, 2 * h)
        left = b[:, :h].copy()
        b[:, :h] += b[:, h:]
        b[:, h:] = left - b[:, h:]
        h *= 2
    return WalshSpectrum(f.n, b.reshape(-1))


def dot_array(ws: np.ndarray, a: int) -> np.ndarray:
    """Vectorized GF(2) inner product of packed vectors with a fixed vector."""
    return (np.bitwise_count(np.asarray(ws, dtype=np.int64) & a) & 1).astype(np.uint8)


def derivative_table(f: BooleanFunction, a: int) -> np.ndarray:
    """Bit table of x -> f(x ^ a) ^ f(x)."""
    if not 0 <= a < (1 << f.n):
        raise ValueError(f"direction {a:#x} does not fit in {f.n} bits")
    xs = np.arange(1 << f.n)
    return f.table[xs ^ a] ^ f.table


def derivative_count(f: BooleanFunction, a: int, i: int) -> int:
    """|{x : f(x ^ a) ^ f(x) = i}| by direct table lookup."""
    if i not in (0, 1):
        raise ValueError(f"derivative value must be a bit, got {i}")
    d = derivative_table(f, a)
    return int(np.count_nonzero(d == i))


@dataclass(frozen=True)
class DifferentialCount:
    """One measured derivative count for a boolean function."""

    a: int
    i: int
    count: int
    domain_size: int

    @classmethod
    def measure(cls, f: BooleanFunction, a: int, i: int) -> "DifferentialCount":
        return cls(a, i, derivative_count(f, a, i), 1 << f.n)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.count, self.domain_size)


def structure_defect(f: BooleanFunction, a: int, i: int) -> Fraction:
    """Fraction of inputs where the derivative in direction a is not i.

    Zero exactly when a is a structure of f with constant derivative i.
    """
    return Fraction((1 << f.n) - derivative_count(f, a, i), 1 << f.n)


def differential_uniformity(f: BooleanFunction) -> Fraction:
    """Largest derivative bias: max over a != 0 and i of Pr_x[derivative = i]."""
    size = 1 << f.n
    best = 0
    for a in range(1, size):
        ones = int(derivative_table(f, a).sum())
        best = max(best, ones, size - ones)
    return Fraction(best, size)


def structure_free_uniformity(f: BooleanFunction) -> Fraction | None:
    """Same maximum, restricted to directions that are not exact structures.

    Returns None when every nonzero direction is a structure (affine f).
    Exhaustive over all 2^n directions, so only meant for small n.
    """
    size = 1 << f.n
    best = None
    for a in range(1, size):
        ones = int(derivative_table(f, a).sum())
        if ones in (0, size):
            continue
        top = max(ones, size - ones)
        best = top if best is None or top > best else best
    return None if best is None else Fraction(best, size)


def linear_structures_exhaustive(f: BooleanFunction) -> tuple[list[int], list[int]]:
    """(U^0, U^1): all directions with constant derivative 0 or 1; 0 is in U^0."""
    u0, u1 = [], []
    for a in range(1 << f.n):
        d = derivative_table(f, a)
        if not d.any():
            u0.append(a)
        elif d.all():
            u1.append(a)
    return u0, u1


def vector_structures_exhaustive(F: VectorFunction) -> list[tuple[int, int]]:
    """All (a, alpha) with F(x ^ a) = F(x) ^ alpha for every x; includes (0, 0)."""
    out = []
    xs = np.arange(1 << F.m)
    for a in range(1 << F.m):
        d = F.table[xs ^ a] ^ F.table
        if bool((d == d[0]).all()):
            out.append((a, int(d[0])))
    return out


def restricted_spectral_mass(spec: WalshSpectrum, a: int, i: int) -> int:
    """Sum of squared integer coefficients over {w : w . a = i}, exact."""
    if i not in (0, 1):
        raise ValueError(f"mask value must be a bit, got {i}")
    ws = np.arange(1 << spec.n)
    sel = dot_array(ws, a) == i
    c = spec.coeffs[sel]
    return int(np.sum(c * c))


def derivative_count_via_spectrum(spec: WalshSpectrum, a: int, i: int) -> Fraction:
    """Derivative count recovered from the spectrum alone.

    Equals derivative_count(f, a, i) exactly for the matching f; the division
    by 2^n is always exact, which the tests assert.
    """
    return Fraction(restricted_spectral_mass(spec, a, i), 1 << spec.n)


def linear_structures_via_spectrum(spec: WalshSpectrum) -> tuple[list[int], list[int]]:
    """Structure sets read off the spectrum: a is in U^i iff the whole
    squared mass sits on {w : w . a = i}."""
    total = 1 << (2 * spec.n)
    u0, u1 = [], []
    for a in range(1 << spec.n):
        m1 = restricted_spectral_mass(spec, a, 1)
        if m1 == 0:
            u0.append(a)
        elif m1 == total:
            u1.append(a)
    return u0, u1


def random_boolean_function(n: int, rng: np.random.Generator) -> BooleanFunction:
    return BooleanFunction(n, rng.integers(0, 2, size=1 << n, dtype=np.uint8))


def random_vector_function(m: int, n: int, rng: np.random.Generator) -> VectorFunction:
    return VectorFunction(m, n, rng.integers(0, 1 << n, size=1 << m, dtype=np.int64))


# ---------------------------------------------------------------------------
# table files: a one-line header, then the entries as fixed-width hex words,
# 16 per line, in index order.  Round-trips bit-exactly.

_HEADER_BOOL = re.compile(r"^boolfn n=(\d+)$")
_HEADER_VEC = re.compile(r"^vecfn m=(\d+) n=(\d+)$")


def format_hex_table(words, bits: int) -> list[str]:
    """Hex lines for a word sequence, zero-padded to ceil(bits/4) digits."""
    digits = max(1, (bits + 3) // 4)
    toks = [format(int(w), f"0{digits}x") for w in words]
    return [" ".join(toks[i : i + 16]) for i in range(0, len(toks), 16)]


def parse_hex_tokens(lines, count: int, bits: int, what: str) -> list[int]:
    """Parse hex word tokens from lines; enforces count and bit width."""
    toks: list[str] = []
    for line in lines:
        toks.extend(line.split())
    if len(toks) != count:
        raise ValueError(f"{what}: expected {count} entries, got {len(toks)}")
    out = []
    for t in toks:
        try:
            v = int(t, 16)
        except ValueError as exc:
            raise ValueError(f"{what}: bad hex token {t!r}") from exc
        if not 0 <= v < (1 << bits):
            raise ValueError(f"{what}: entry {t} does not fit in {bits} bits")
        out.append(v)
    return out


def save_function(path, fn: Union[BooleanFunction, VectorFunction]) -> None:
    """Write a function table file (header line plus hex entries)."""
    p = Path(path)
    if isinstance(fn, BooleanFunction):
        header = f"boolfn n={fn.n}"
        lines = format_hex_table(fn.table, 1)
    elif isinstance(fn, VectorFunction):
        header = f"vecfn m={fn.m} n={fn.n}"
        lines = format_hex_table(fn.table, fn.n)
    else:
        raise TypeError(f"cannot save object of type {type(fn).__name__}")
    p.write_text("\n".join([header, *lines]) + "\n")


def load_function(path) -> Union[BooleanFunction, VectorFunction]:
    """Read a table file written by save_function."""
    lines = Path(path).read_text().splitlines()
    lines = [ln for ln in lines if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty function file")
    head = lines[0].strip()
    m = _HEADER_BOOL.match(head)
    if m:
        n = int(m.group(1))
        _check_width(n, "n")
        vals = parse_hex_tokens(lines[1:], 1 << n, 1, str(path))
        return BooleanFunction(n, np.array(vals, dtype=np.uint8))
    m = _HEADER_VEC.match(head)
    if m:
        mm, n = int(m.group(1)), int(m.group(2))
        _check_width(mm, "m")
        _check_width(n, "n")
        vals = parse_hex_tokens(lines[1:], 1 << mm, n, str(path))
        return VectorFunction(mm, n, np.array(vals, dtype=np.int64))
    raise ValueError(f"{path}: unrecognized header {head!r}")
