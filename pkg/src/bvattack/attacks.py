"""End-to-end attack drivers.

Every driver owns a QueryLedger, draws all randomness from explicit seed
streams, and returns a frozen report.  A failed search is a verdict carried
in the report, not an exception; malformed arguments raise.

Seed stream layout within one attack: (seed, 0) feeds the attacker's own
classical choices (constants, probe points, plaintext pairs) and (seed, j)
feeds the measurement sampler of output bit j, so streams never collide.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .boolfn import VectorFunction
from .bv import BvSampler, QueryLedger
from .ciphers import (
    OracleFunction,
    ToyCipherPublic,
    em_difference_oracle,
    feistel_branch_oracle,
    toy_reduced_family,
)
from .gf2 import LinearSystem, solve
from .lsfind import (
    _unique_ints,
    default_sample_count,
    find_common_zero_structure,
    find_vector_structures,
)
from .rng import seeded_rng, flat_key

__all__ = [
    "InsufficientDataError",
    "FeistelDistinguishReport",
    "distinguish_feistel",
    "EmKeyRecoveryReport",
    "recover_em_key",
    "KeyCounterTable",
    "rank_last_round_keys",
    "DifferentialAttackReport",
    "differential_attack",
    "differential_match_counts",
    "key_fraction_meeting",
    "SmallProbabilityReport",
    "small_probability_attack",
    "ImpossibleCertificate",
    "ImpossibleFindReport",
    "find_impossible_differential",
    "impossible_certificate_valid",
    "ImpossibleSieveReport",
    "impossible_attack",
]


class InsufficientDataError(ValueError):
    """Raised when an attack phase is asked to work from zero observations."""


# ---------------------------------------------------------------------------
# 3-round Feistel distinguisher


@dataclass(frozen=True)
class FeistelDistinguishReport:
    verdict: bool
    candidate: int | None
    s0: int
    s1: int
    probe: int | None
    p: int
    queries: dict


def distinguish_feistel(encrypt: VectorFunction, seed, p: int | None = None) -> FeistelDistinguishReport:
    """Decide whether a 2n-bit cipher behaves like a 3-round Feistel network.

    Builds the branch-difference oracle F from two distinct left-half
    constants, searches for a direction along which every output bit of F is
    constant (p samples per bit, default n + 1), then confirms the smallest
    candidate with two classical queries at a random probe.  Verdict True
    means the collision check passed.
    """
    if encrypt.m != encrypt.n or encrypt.n % 2:
        raise ValueError("expected a cipher table on 2n-bit blocks")
    n = encrypt.n // 2
    p = n + 1 if p is None else int(p)

    rng = seeded_rng(*flat_key(seed, 0))
    s0 = int(rng.integers(0, 1 << n))
    s1 = (s0 + 1 + int(rng.integers(0, (1 << n) - 1))) % (1 << n)

    ledger = QueryLedger()
    F = feistel_branch_oracle(encrypt, s0, s1)
    res = find_common_zero_structure(F, p=p, seed=seed, ledger=ledger)
    if not res.found:
        return FeistelDistinguishReport(False, None, s0, s1, None, p, ledger.snapshot())

    oracle = OracleFunction(F, ledger)
    u = int(rng.integers(0, 1 << (n + 1)))
    same = oracle.classical(u) == oracle.classical(u ^ res.a)
    return FeistelDistinguishReport(bool(same), res.a, s0, s1, u, p, ledger.snapshot())


# ---------------------------------------------------------------------------
# Even-Mansour key recovery


@dataclass(frozen=True)
class EmKeyRecoveryReport:
    found: bool
    k1: int | None
    candidates: int
    p: int
    queries: dict


def recover_em_key(perm: VectorFunction, etable: VectorFunction, seed,
                   p: int | None = None) -> EmKeyRecoveryReport:
    """Recover the pre-whitening key of E(x) = P(x ^ k1) ^ k2.

    F = E ^ P has exact period k1, so k1 survives every zero-direction
    system; the smallest nonzero survivor is returned after p samples per
    output bit (default n, n^2 quantum queries total).  k2 then follows from
    one classical query, which is left to the caller so the quantum query
    count stays pure.
    """
    F = em_difference_oracle(etable, perm)
    n = F.n
    p = n if p is None else int(p)
    ledger = QueryLedger()
    res = find_common_zero_structure(F, p=p, seed=seed, ledger=ledger)
    k1 = res.a if res.found else None
    return EmKeyRecoveryReport(res.found, k1, res.intersection.size, p, ledger.snapshot())


# ---------------------------------------------------------------------------
# differential key recovery (shared pieces)


@dataclass(frozen=True)
class KeyCounterTable:
    """Per-key match counters; rates are exact rationals."""

    counts: tuple[int, ...]
    pairs: int
    checks_per_pair: int

    def rate(self, s: int) -> Fraction:
        return Fraction(self.counts[s], self.pairs * self.checks_per_pair)

    def argmax(self) -> int:
        """Key with the most matches; ties go to the smallest key."""
        return int(np.argmax(np.asarray(self.counts)))

    def argmin(self) -> int:
        return int(np.argmin(np.asarray(self.counts)))


def _pair_plaintexts(n: int, a: int, pairs: int, rng: np.random.Generator) -> np.ndarray:
    """Plaintexts whose pairs {x, x ^ a} carry difference a.

    Distinct pair representatives while they last (disjoint pairs give
    independent per-pair evidence); falls back to iid uniform once more
    pairs are requested than the 2^(n-1) that exist.
    """
    xs = np.arange(1 << n)
    reps = xs[xs < (xs ^ a)]
    if pairs <= len(reps):
        return rng.choice(reps, size=pairs, replace=False).astype(np.int64)
    return rng.integers(0, 1 << n, size=pairs, dtype=np.int64)


def rank_last_round_keys(oracle: OracleFunction, inv_last: np.ndarray, a: int, alpha: int,
                         pairs: int, rng: np.random.Generator) -> KeyCounterTable:
    """Whole-word key counting: for each final-round key guess s, count the
    pairs whose one-round partial decryption difference equals alpha."""
    if pairs <= 0:
        raise InsufficientDataError("key counting needs at least one plaintext pair")
    n = oracle.fn.n
    xs = _pair_plaintexts(n, a, pairs, rng)
    c1 = oracle.classical_batch(xs)
    c2 = oracle.classical_batch(xs ^ a)
    counts = []
    for s in range(1 << n):
        dy = inv_last[c1 ^ s] ^ inv_last[c2 ^ s]
        counts.append(int(np.count_nonzero(dy == alpha)))
    return KeyCounterTable(tuple(counts), pairs, 1)


@dataclass(frozen=True)
class DifferentialAttackReport:
    found: bool
    a: int | None
    alpha: int | None
    recovered_last_key: int | None
    counter: KeyCounterTable | None
    p: int
    pairs: int
    q: int
    queries: dict


def differential_attack(public: ToyCipherPublic, etable: VectorFunction, seed,
                        q: int, p: int | None = None,
                        pairs: int | None = None) -> DifferentialAttackReport:
    """Two-phase differential key recovery against the toy cipher.

    Phase one samples the keyed-rounds family G(x || k) over data and key
    jointly (the attacker's own model of the public algorithm; each
    measurement still costs one quantum query) and solves for a data-half
    difference whose output difference is constant for most keys.  Phase two
    queries the real encryption table on `pairs` pairs with that difference
    and ranks final-round keys by exact match count.  q is the key-coverage
    target 1 - 1/q; it is recorded for verification and does not change the
    defaults.
    """
    if q < 1:
        raise ValueError(f"coverage parameter q must be positive, got {q}")
    n = public.n
    p = default_sample_count(n) if p is None else int(p)
    pairs = 8 * n if pairs is None else int(pairs)

    G = toy_reduced_family(public)
    ledger = QueryLedger()
    res = find_vector_structures(G, p=p, seed=seed, ledger=ledger, solve_width=n)
    if not res.found:
        return DifferentialAttackReport(False, None, None, None, None, p, pairs, q,
                                        ledger.snapshot())

    oracle = OracleFunction(etable, ledger)
    counter = rank_last_round_keys(oracle, public.inverse_last(), res.a, res.alpha,
                                   pairs, seeded_rng(*flat_key(seed, 0)))
    return DifferentialAttackReport(True, res.a, res.alpha, counter.argmax(), counter,
                                    p, pairs, q, ledger.snapshot())


def differential_match_counts(public: ToyCipherPublic, a: int, alpha: int) -> np.ndarray:
    """Exhaustive per-key counts of x with F_k(x ^ a) = F_k(x) ^ alpha."""
    y = public.reduced_encrypt_all_keys()
    xs = np.arange(1 << public.n)
    diff = y[:, xs ^ a] ^ y
    return (diff == alpha).sum(axis=1)


def key_fraction_meeting(public: ToyCipherPublic, a: int, alpha: int,
                         threshold: Fraction) -> Fraction:
    """Exact fraction of master keys whose differential probability meets
    the threshold."""
    counts = differential_match_counts(public, a, alpha)
    num, den = threshold.numerator, threshold.denominator
    good = int(np.count_nonzero(counts * den >= num * (1 << public.n)))
    return Fraction(good, len(counts))


# ---------------------------------------------------------------------------
# small-probability differential key recovery


@dataclass(frozen=True)
class SmallProbabilityReport:
    found: bool
    a: int | None
    target_diff: int | None
    recovered_last_key: int | None
    counter: KeyCounterTable | None
    p: int
    l: int
    q: int
    pairs: int
    queries: dict


def small_probability_attack(public: ToyCipherPublic, etable: VectorFunction, seed,
                             q: int, l: int, p: int | None = None) -> SmallProbabilityReport:
    """Key recovery from a differential that almost never happens.

    Phase one is the same joint search as the plain differential attack but
    run with p = n^3 l^2 q^2 samples per bit, sharp enough that the found
    output difference fails on at most a 1/(2l) fraction of inputs for most
    keys.  The counted target is the bitwise complement of that difference;
    the right final-round key therefore shows per-bit match rate below 1/l
    while wrong keys sit near 1/2, so keys are ranked by ascending rate
    lambda_s = C_s / (n l^2) over l^2 pairs.
    """
    if l < 2:
        raise ValueError(f"l must be at least 2 for any rate contrast, got {l}")
    if q < 1:
        raise ValueError(f"coverage parameter q must be positive, got {q}")
    n = public.n
    p = (n ** 3) * (l ** 2) * (q ** 2) if p is None else int(p)
    pairs = l * l

    G = toy_reduced_family(public)
    ledger = QueryLedger()
    res = find_vector_structures(G, p=p, seed=seed, ledger=ledger, solve_width=n)
    if not res.found:
        return SmallProbabilityReport(False, None, None, None, None, p, l, q, pairs,
                                      ledger.snapshot())
    b = res.alpha ^ ((1 << n) - 1)

    oracle = OracleFunction(etable, ledger)
    xs = _pair_plaintexts(n, res.a, pairs, seeded_rng(*flat_key(seed, 0)))
    c1 = oracle.classical_batch(xs)
    c2 = oracle.classical_batch(xs ^ res.a)
    inv = public.inverse_last()
    counts = []
    for s in range(1 << n):
        dy = inv[c1 ^ s] ^ inv[c2 ^ s]
        counts.append(int((n - np.bitwise_count(dy ^ b)).sum()))
    counter = KeyCounterTable(tuple(counts), pairs, n)
    return SmallProbabilityReport(True, res.a, b, counter.argmin(), counter,
                                  p, l, q, pairs, ledger.snapshot())


# ---------------------------------------------------------------------------
# impossible differential


@dataclass(frozen=True)
class ImpossibleCertificate:
    """Claim: output bit j of the keyed rounds never changes by `forbidden`
    along input difference a, for any key."""

    j: int
    a: int
    forbidden: int


@dataclass(frozen=True)
class ImpossibleFindReport:
    found: bool
    certificate: ImpossibleCertificate | None
    p: int
    queries: dict


def find_impossible_differential(G: VectorFunction, x_bits: int, seed,
                                 p: int | None = None,
                                 ledger: QueryLedger | None = None) -> ImpossibleFindReport:
    """Per-bit impossible differential search on the keyed family G(x || k).

    For each output bit, a direction orthogonal to every truncated sample
    certifies its derivative bit is constant 0, i.e. the value 1 is
    forbidden; a direction with dot 1 against every sample certifies 0 is
    forbidden.  The first output bit with a nonzero candidate wins and the
    numerically smaller candidate of its two systems is returned.
    """
    if not 1 <= x_bits <= G.m:
        raise ValueError(f"x_bits must be in [1, {G.m}], got {x_bits}")
    p = default_sample_count(x_bits) if p is None else int(p)
    if p < 1:
        raise ValueError(f"sample count must be positive, got {p}")
    shift = G.m - x_bits
    queries = 0
    for j in range(1, G.n + 1):
        ws = BvSampler(G.component(j), (seed, j), ledger).draw(p)
        queries += p
        uniq = _unique_ints(ws >> shift)
        never_one = solve(LinearSystem(x_bits, tuple((w, 0) for w in uniq)))
        never_zero = solve(LinearSystem(x_bits, tuple((w, 1) for w in uniq)))
        cands = []
        for forbidden, sol in ((1, never_one), (0, never_zero)):
            a = sol.smallest_nonzero()
            if a is not None:
                cands.append((a, forbidden))
        if cands:
            a, forbidden = min(cands)
            cert = ImpossibleCertificate(j, a, forbidden)
            return ImpossibleFindReport(True, cert, p, queries)
    return ImpossibleFindReport(False, None, p, queries)


def impossible_certificate_valid(public: ToyCipherPublic, cert: ImpossibleCertificate) -> bool:
    """Exhaustive sweep over every plaintext and key: the certified
    derivative bit must never take the forbidden value."""
    y = public.reduced_encrypt_all_keys()
    xs = np.arange(1 << public.n)
    diff = y[:, xs ^ cert.a] ^ y
    bit = (diff >> (public.n - cert.j)) & 1
    return not bool(np.any(bit == cert.forbidden))


@dataclass(frozen=True)
class ImpossibleSieveReport:
    found: bool
    certificate: ImpossibleCertificate | None
    certificate_valid: bool | None
    alive: tuple[int, ...]
    pairs: int
    p: int
    queries: dict


def impossible_attack(public: ToyCipherPublic, etable: VectorFunction, seed,
                      pairs: int | None = None, p: int | None = None) -> ImpossibleSieveReport:
    """Certificate search plus final-round key sieve.

    The found certificate is first brute-force checked against the
    attacker's own model of the keyed rounds; a bogus one is flagged and no
    sieving happens, so the true key can never be ruled out by a bad
    certificate.  With a valid certificate, any key guess whose partial
    decryption shows the forbidden bit on some pair is eliminated.
    pairs=0 skips sieving and leaves every key alive.
    """
    n = public.n
    pairs = 4 * n if pairs is None else int(pairs)
    if pairs < 0:
        raise ValueError(f"pairs cannot be negative, got {pairs}")

    G = toy_reduced_family(public)
    ledger = QueryLedger()
    res = find_impossible_differential(G, n, seed, p=p, ledger=ledger)
    all_keys = tuple(range(1 << n))
    if not res.found:
        return ImpossibleSieveReport(False, None, None, all_keys, pairs, res.p,
                                     ledger.snapshot())

    cert = res.certificate
    valid = impossible_certificate_valid(public, cert)
    if not valid or pairs == 0:
        return ImpossibleSieveReport(True, cert, valid, all_keys, pairs, res.p,
                                     ledger.snapshot())

    oracle = OracleFunction(etable, ledger)
    xs = _pair_plaintexts(n, cert.a, pairs, seeded_rng(*flat_key(seed, 0)))
    c1 = oracle.classical_batch(xs)
    c2 = oracle.classical_batch(xs ^ cert.a)
    inv = public.inverse_last()
    alive = []
    for s in range(1 << n):
        dy = inv[c1 ^ s] ^ inv[c2 ^ s]
        bit = (dy >> (n - cert.j)) & 1
        if not np.any(bit == cert.forbidden):
            alive.append(s)
    return ImpossibleSieveReport(True, cert, True, tuple(alive), pairs, res.p,
                                 ledger.snapshot())
