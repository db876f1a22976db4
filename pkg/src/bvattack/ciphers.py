"""Toy block ciphers and the oracle plumbing the attacks run against.

Three constructions:

* Feistel3: a 3-round Feistel network on 2n-bit blocks with independent
  uniformly random round functions (not permutations).
* EvenMansour: E(x) = P(x ^ k1) ^ k2 for a public random permutation P.
* ToyCipher: an iterated n-bit cipher with rounds-1 keyed S-box rounds
  followed by an unkeyed whitening round c = T(y) ^ s; the "weak" preset
  plants a probability-one differential, the "strong" preset uses a random
  S-box.

Secrets are derived from explicit seeds.  Attack code only sees published
artifacts (encryption tables, public permutations, algorithm descriptions);
the OracleFunction wrapper charges the query ledger on every classical read.

Cipher files are plain text: a `cipher <kind> key=value...` header line, an
optional `keys ...` line (omitted in challenge files), then one
`table <name> m=.. n=..` section per table with fixed-width hex entries,
16 per line.  They round-trip bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .boolfn import VectorFunction, format_hex_table, parse_hex_tokens
from .bv import QueryLedger
from .rng import flat_key, seeded_rng

__all__ = [
    "OracleFunction",
    "random_permutation",
    "rotl1",
    "rotr1",
    "Feistel3",
    "feistel_branch_oracle",
    "EvenMansour",
    "em_difference_oracle",
    "weak_sbox",
    "ToyCipher",
    "ToyCipherPublic",
    "toy_reduced_family",
    "CipherFile",
    "save_cipher",
    "load_cipher",
]


class OracleFunction:
    """Query-counted black-box view of a vector function.

    Every classical read charges the ledger once; quantum access goes through
    BvSampler with the same ledger, which charges per measurement.
    """

    __slots__ = ("fn", "ledger")

    def __init__(self, fn: VectorFunction, ledger: QueryLedger | None = None) -> None:
        self.fn = fn
        self.ledger = ledger if ledger is not None else QueryLedger()

    def classical(self, x: int) -> int:
        self.ledger.add_classical(1)
        return int(self.fn.table[x])

    def classical_batch(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.int64)
        self.ledger.add_classical(int(xs.size))
        return self.fn.table[xs]


def random_permutation(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform random bijection on n-bit words, as an int64 table."""
    return rng.permutation(1 << n).astype(np.int64)


def rotl1(v: int, n: int) -> int:
    return ((v << 1) | (v >> (n - 1))) & ((1 << n) - 1)


def rotr1(v: int, n: int) -> int:
    return ((v >> 1) | ((v & 1) << (n - 1))) & ((1 << n) - 1)


# ---------------------------------------------------------------------------
# 3-round Feistel


class Feistel3:
    """Three-round Feistel network on 2n-bit blocks, L in the high bits.

    One round maps (L, R) to (R ^ P_i(L), L); with all-zero round functions
    the cipher is the halves swap (L, R) -> (R, L).
    """

    __slots__ = ("n", "p1", "p2", "p3")

    def __init__(self, n: int, p1, p2, p3) -> None:
        self.n = n
        tables = []
        for t in (p1, p2, p3):
            arr = np.ascontiguousarray(t, dtype=np.int64)
            if arr.shape != (1 << n,) or arr.min(initial=0) < 0 or arr.max(initial=0) >= (1 << n):
                raise ValueError("round function table must map n bits to n bits")
            arr.setflags(write=False)
            tables.append(arr)
        self.p1, self.p2, self.p3 = tables

    @classmethod
    def random(cls, n: int, seed) -> "Feistel3":
        rounds = [
            seeded_rng(*flat_key(seed, i)).integers(0, 1 << n, size=1 << n, dtype=np.int64)
            for i in (1, 2, 3)
        ]
        return cls(n, *rounds)

    def encrypt(self, left: int, right: int) -> tuple[int, int]:
        for p in (self.p1, self.p2, self.p3):
            left, right = right ^ int(p[left]), left
        return left, right

    def decrypt(self, left: int, right: int) -> tuple[int, int]:
        for p in (self.p3, self.p2, self.p1):
            left, right = right, left ^ int(p[right])
        return left, right

    def encrypt_table(self) -> VectorFunction:
        """The whole cipher as a 2n -> 2n table, block packed as L || R."""
        n = self.n
        mask = (1 << n) - 1
        xs = np.arange(1 << (2 * n))
        left, right = xs >> n, xs & mask
        for p in (self.p1, self.p2, self.p3):
            left, right = right ^ p[left], left
        return VectorFunction(2 * n, 2 * n, (left << n) | right)


def feistel_branch_oracle(encrypt: VectorFunction, s0: int, s1: int) -> VectorFunction:
    """The distinguisher's derived oracle F(b || x) = right(E(s_b, x)) ^ s_b.

    Built from the published 2n-bit encryption table alone.  When E is a
    3-round Feistel network, F(b, x) = P2(x ^ P1(s_b)), so
    (1 || P1(s0) ^ P1(s1)) is an exact period of F.
    """
    if encrypt.m != encrypt.n or encrypt.n % 2:
        raise ValueError("expected a table on 2n-bit blocks")
    n = encrypt.n // 2
    if s0 == s1:
        raise ValueError("left-half constants must differ")
    mask = (1 << n) - 1
    xs = np.arange(1 << n)
    rows = [(encrypt.table[(s << n) | xs] & mask) ^ s for s in (s0, s1)]
    return VectorFunction(n + 1, n, np.concatenate(rows))


# ---------------------------------------------------------------------------
# Even-Mansour


class EvenMansour:
    """E(x) = P(x ^ k1) ^ k2 for a public random permutation P.

    k1 = 0 makes E ^ P constant, so every direction is a period and the key
    recovery has no signal; generators therefore draw k1 nonzero unless
    explicitly told otherwise.
    """

    __slots__ = ("n", "perm", "k1", "k2")

    def __init__(self, n: int, perm, k1: int, k2: int) -> None:
        arr = np.ascontiguousarray(perm, dtype=np.int64)
        if arr.shape != (1 << n,) or len(np.unique(arr)) != (1 << n):
            raise ValueError("perm must be a bijection on n-bit words")
        if not (0 <= k1 < (1 << n) and 0 <= k2 < (1 << n)):
            raise ValueError("keys must be n-bit words")
        arr.setflags(write=False)
        self.n = n
        self.perm = arr
        self.k1 = k1
        self.k2 = k2

    @classmethod
    def random(cls, n: int, seed, allow_zero_k1: bool = False) -> "EvenMansour":
        perm = random_permutation(n, seeded_rng(*flat_key(seed, 1)))
        rng = seeded_rng(*flat_key(seed, 2))
        lo = 0 if allow_zero_k1 else 1
        k1 = int(rng.integers(lo, 1 << n))
        k2 = int(rng.integers(0, 1 << n))
        return cls(n, perm, k1, k2)

    def perm_table(self) -> VectorFunction:
        return VectorFunction(self.n, self.n, self.perm)

    def encrypt_table(self) -> VectorFunction:
        xs = np.arange(1 << self.n)
        return VectorFunction(self.n, self.n, self.perm[xs ^ self.k1] ^ self.k2)


def em_difference_oracle(etable: VectorFunction, perm: VectorFunction) -> VectorFunction:
    """F(x) = E(x) ^ P(x); k1 is an exact period of F with zero output shift."""
    if etable.m != perm.m or etable.n != perm.n or etable.m != etable.n:
        raise ValueError("encryption and permutation tables must share one n")
    return VectorFunction(etable.m, etable.n, etable.table ^ perm.table)


# ---------------------------------------------------------------------------
# iterated toy cipher


def weak_sbox(n: int, seed: int) -> np.ndarray:
    """Random bijection with the exact structure S(x ^ 3) = S(x) ^ alpha,
    where alpha = rotr1(3) = 2^(n-1) + 1.

    Inputs pair up as {x, x ^ 3} and map onto output pairs {y, y ^ alpha}
    with a random pairing and orientation.  The round function's rotation
    carries alpha back to 3, so the keyed round chain has a probability-one
    differential 3 -> 3 under every round key.
    """
    if n < 3:
        raise ValueError("weak S-box needs n >= 3 so that 3 and rotr1(3) differ")
    a_star = 3
    alpha = rotr1(a_star, n)
    reps_in = [x for x in range(1 << n) if x < x ^ a_star]
    reps_out = [y for y in range(1 << n) if y < y ^ alpha]
    rng = seeded_rng(*flat_key(seed, 71))
    pairing = rng.permutation(len(reps_in))
    orient = rng.integers(0, 2, size=len(reps_in))
    sbox = np.zeros(1 << n, dtype=np.int64)
    for idx, x in enumerate(reps_in):
        y = reps_out[int(pairing[idx])] ^ (alpha if orient[idx] else 0)
        sbox[x] = y
        sbox[x ^ a_star] = y ^ alpha
    return sbox


def _round_keys(master: int, n: int, rounds: int) -> list[int]:
    # round i takes the i-th n-bit slice of the master key, most significant first
    kb = (rounds - 1) * n
    return [(master >> (kb - i * n)) & ((1 << n) - 1) for i in range(1, rounds)]


@dataclass(frozen=True)
class ToyCipherPublic:
    """Attacker's view of the toy cipher: the algorithm without its keys."""

    n: int
    rounds: int
    sbox: np.ndarray
    last_sbox: np.ndarray

    def __post_init__(self) -> None:
        for name, t in (("sbox", self.sbox), ("last_sbox", self.last_sbox)):
            arr = np.ascontiguousarray(t, dtype=np.int64)
            if arr.shape != (1 << self.n,) or len(np.unique(arr)) != (1 << self.n):
                raise ValueError(f"{name} must be a bijection on n-bit words")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.rounds < 2:
            raise ValueError("need at least one keyed round plus the final round")

    @property
    def key_bits(self) -> int:
        return (self.rounds - 1) * self.n

    def inverse_last(self) -> np.ndarray:
        inv = np.empty_like(self.last_sbox)
        inv[self.last_sbox] = np.arange(1 << self.n)
        return inv

    def reduced_encrypt_all_keys(self) -> np.ndarray:
        """Matrix Y[k, x] = value of the keyed rounds on x under key k."""
        n, kb = self.n, self.key_bits
        ks = np.arange(1 << kb)
        y = np.broadcast_to(np.arange(1 << n), (1 << kb, 1 << n)).copy()
        for i in range(1, self.rounds):
            ki = ((ks >> (kb - i * n)) & ((1 << n) - 1))[:, None]
            y = self.sbox[y ^ ki]
            y = ((y << 1) | (y >> (n - 1))) & ((1 << n) - 1)
        return y


def toy_reduced_family(public: ToyCipherPublic) -> VectorFunction:
    """G(x || k) = keyed rounds of x under key k, data bits on top.

    This is the function the differential searches sample; it is the
    attacker's own model of the cipher, so building it costs no oracle
    queries.
    """
    y = public.reduced_encrypt_all_keys()
    # index (x << key_bits) | k, so transpose [k, x] -> [x, k] then flatten
    return VectorFunction(public.n + public.key_bits, public.n,
                          np.ascontiguousarray(y.T).reshape(-1))


class ToyCipher:
    """A concrete toy cipher instance: public algorithm plus secret keys.

    Keyed round i computes y = rotl1(S(y ^ k_i)); the final round whitens
    with an independent bijection, c = T(y) ^ s.  T independent of S matters:
    if the final bijection were S itself, the planted structure of the weak
    preset would commute through T^-1 for every wrong key guess and key
    counting would see no contrast.
    """

    __slots__ = ("public", "preset", "seed", "master_key", "last_key")

    def __init__(self, public: ToyCipherPublic, preset: str, seed: int,
                 master_key: int, last_key: int) -> None:
        if not 0 <= master_key < (1 << public.key_bits):
            raise ValueError("master key out of range")
        if not 0 <= last_key < (1 << public.n):
            raise ValueError("last-round key out of range")
        self.public = public
        self.preset = preset
        self.seed = seed
        self.master_key = master_key
        self.last_key = last_key

    @classmethod
    def generate(cls, n: int, preset: str = "weak", seed=0, rounds: int = 3) -> "ToyCipher":
        if preset == "weak":
            sbox = weak_sbox(n, seed)
        elif preset == "strong":
            sbox = random_permutation(n, seeded_rng(*flat_key(seed, 11)))
        else:
            raise ValueError(f"unknown preset {preset!r}")
        last = random_permutation(n, seeded_rng(*flat_key(seed, 12)))
        public = ToyCipherPublic(n, rounds, sbox, last)
        rng = seeded_rng(*flat_key(seed, 13))
        master = int(rng.integers(0, 1 << public.key_bits))
        s = int(rng.integers(0, 1 << n))
        return cls(public, preset, seed, master, s)

    @property
    def n(self) -> int:
        return self.public.n

    @property
    def rounds(self) -> int:
        return self.public.rounds

    def reduced_table(self) -> VectorFunction:
        """x -> input of the final round, under this instance's master key."""
        n = self.n
        ys = np.arange(1 << n)
        for ki in _round_keys(self.master_key, n, self.rounds):
            ys = self.public.sbox[ys ^ ki]
            ys = ((ys << 1) | (ys >> (n - 1))) & ((1 << n) - 1)
        return VectorFunction(n, n, ys)

    def encrypt_table(self) -> VectorFunction:
        reduced = self.reduced_table().table
        return VectorFunction(self.n, self.n,
                              self.public.last_sbox[reduced] ^ self.last_key)

    def decrypt(self, c: int) -> int:
        n = self.n
        inv_last = self.public.inverse_last()
        inv_s = np.empty_like(self.public.sbox)
        inv_s[self.public.sbox] = np.arange(1 << n)
        y = int(inv_last[c ^ self.last_key])
        for ki in reversed(_round_keys(self.master_key, n, self.rounds)):
            y = rotr1(y, n)
            y = int(inv_s[y]) ^ ki
        return y


# ---------------------------------------------------------------------------
# cipher files


@dataclass
class CipherFile:
    """Parsed cipher file: header params, optional keys, named tables."""

    kind: str
    params: dict
    keys: dict
    tables: dict

    @property
    def n(self) -> int:
        return self.params["n"]

    def table(self, name: str) -> VectorFunction:
        if name not in self.tables:
            raise ValueError(f"cipher file is missing table {name!r}")
        return self.tables[name]

    def toy_public(self) -> ToyCipherPublic:
        if self.kind != "toy":
            raise ValueError(f"not a toy cipher file (kind={self.kind!r})")
        return ToyCipherPublic(self.n, self.params["r"],
                               self.table("sbox").table, self.table("last_sbox").table)


_KIND_TABLES = {
    "feistel3": ("p1", "p2", "p3"),
    "even-mansour": ("perm",),
    "toy": ("sbox", "last_sbox"),
}


def _header_params(cipher) -> tuple[str, dict, dict, dict]:
    """(kind, params, keys, tables-as-VectorFunction) for a cipher object."""
    if isinstance(cipher, Feistel3):
        n = cipher.n
        tabs = {name: VectorFunction(n, n, t)
                for name, t in zip(("p1", "p2", "p3"), (cipher.p1, cipher.p2, cipher.p3))}
        tabs["etable"] = cipher.encrypt_table()
        return "feistel3", {"n": n}, {}, tabs
    if isinstance(cipher, EvenMansour):
        tabs = {"perm": cipher.perm_table(), "etable": cipher.encrypt_table()}
        return "even-mansour", {"n": cipher.n}, {"k1": cipher.k1, "k2": cipher.k2}, tabs
    if isinstance(cipher, ToyCipher):
        n = cipher.n
        tabs = {
            "sbox": VectorFunction(n, n, cipher.public.sbox),
            "last_sbox": VectorFunction(n, n, cipher.public.last_sbox),
            "etable": cipher.encrypt_table(),
        }
        params = {"n": n, "r": cipher.rounds, "preset": cipher.preset}
        if isinstance(cipher.seed, int):
            params["seed"] = cipher.seed
        return "toy", params, {"k": cipher.master_key, "s": cipher.last_key}, tabs
    raise TypeError(f"cannot save object of type {type(cipher).__name__}")


def save_cipher(path, cipher, seed: int | None = None, include_secrets: bool = True) -> None:
    """Write a cipher file; challenge files drop the keys line and, for
    Feistel, the round-function tables."""
    kind, params, keys, tabs = _header_params(cipher)
    if seed is not None:
        params["seed"] = seed
    head = " ".join([f"cipher {kind}"] + [f"{k}={v}" for k, v in params.items()])
    lines = [head]
    if include_secrets and keys:
        lines.append("keys " + " ".join(f"{k}={v:#x}" for k, v in keys.items()))
    secret_tables = set(_KIND_TABLES["feistel3"]) if kind == "feistel3" else set()
    for name, fn in tabs.items():
        if not include_secrets and name in secret_tables:
            continue
        lines.append(f"table {name} m={fn.m} n={fn.n}")
        lines.extend(format_hex_table(fn.table, fn.n))
    Path(path).write_text("\n".join(lines) + "\n")


def _parse_kv(tokens, what: str, want_ints) -> dict:
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise ValueError(f"{what}: malformed token {tok!r}")
        k, v = tok.split("=", 1)
        if k in want_ints:
            out[k] = int(v, 0)
        else:
            out[k] = v
    return out


def load_cipher(path) -> CipherFile:
    """Read a cipher file written by save_cipher."""
    raw = Path(path).read_text().splitlines()
    lines = [ln.rstrip() for ln in raw if ln.strip()]
    if not lines or not lines[0].startswith("cipher "):
        raise ValueError(f"{path}: expected a 'cipher ...' header line")
    head = lines[0].split()
    kind = head[1]
    if kind not in _KIND_TABLES:
        raise ValueError(f"{path}: unknown cipher kind {kind!r}")
    params = _parse_kv(head[2:], f"{path} header", {"n", "r", "seed"})
    if "n" not in params:
        raise ValueError(f"{path}: header must carry n=<bits>")

    keys: dict = {}
    tables: dict = {}
    i = 1
    while i < len(lines):
        line = lines[i]
        if line.startswith("keys "):
            keys = _parse_kv(line.split()[1:], f"{path} keys", {"k1", "k2", "k", "s"})
            i += 1
        elif line.startswith("table "):
            toks = line.split()
            name = toks[1]
            shape = _parse_kv(toks[2:], f"{path} table {name}", {"m", "n"})
            m, n = shape["m"], shape["n"]
            body = []
            i += 1
            need = 1 << m
            got = 0
            while i < len(lines) and got < need:
                body.append(lines[i])
                got += len(lines[i].split())
                i += 1
            vals = parse_hex_tokens(body, need, n, f"{path} table {name}")
            tables[name] = VectorFunction(m, n, np.array(vals, dtype=np.int64))
        else:
            raise ValueError(f"{path}: unexpected line {line!r}")

    if "etable" not in tables:
        raise ValueError(f"{path}: cipher file must carry the encryption table")
    return CipherFile(kind, params, keys, tables)
