"""Independent brute-force reference implementations used by the tests.

Everything here is written the slow, obvious way on purpose: plain Python
loops, direct definitional sums, exhaustive scans.  No fast transforms, no
packed elimination, no shared code with the package under test.  Frozen
expected values in the tests were computed with these.
"""

from fractions import Fraction


def parity(x: int) -> int:
    return bin(x).count("1") & 1


def walsh_coefficient_direct(table, n: int, w: int) -> int:
    """2^n times the normalized coefficient, by the definitional sum."""
    total = 0
    for x in range(1 << n):
        total += (-1) ** (int(table[x]) ^ parity(w & x))
    return total


def walsh_spectrum_direct(table, n: int) -> list:
    return [walsh_coefficient_direct(table, n, w) for w in range(1 << n)]


def sample_distribution_direct(table, n: int) -> list:
    """Exact outcome distribution of one measurement as Fractions."""
    out = []
    for w in range(1 << n):
        c = walsh_coefficient_direct(table, n, w)
        out.append(Fraction(c * c, 4 ** n))
    return out


def derivative_value_counts(table, n: int, a: int) -> tuple[int, int]:
    """(#x with f(x+a)=f(x), #x with f(x+a)=f(x)+1)."""
    zeros = ones = 0
    for x in range(1 << n):
        if int(table[x ^ a]) ^ int(table[x]):
            ones += 1
        else:
            zeros += 1
    return zeros, ones


def boolean_structures_direct(table, n: int) -> tuple[list, list]:
    """All directions with constant derivative, split by the constant."""
    u0, u1 = [], []
    for a in range(1 << n):
        zeros, ones = derivative_value_counts(table, n, a)
        if ones == 0:
            u0.append(a)
        elif zeros == 0:
            u1.append(a)
    return u0, u1


def vector_structures_direct(table, m: int, n: int) -> list:
    """All (a, alpha) with F(x+a) = F(x) + alpha everywhere."""
    out = []
    for a in range(1 << m):
        alpha = int(table[a]) ^ int(table[0])
        if all(int(table[x ^ a]) ^ int(table[x]) == alpha for x in range(1 << m)):
            out.append((a, alpha))
    return out


def solve_affine_direct(width: int, constraints) -> list:
    """All x satisfying every x . w = c, by trying all 2^width points."""
    out = []
    for x in range(1 << width):
        if all(parity(x & w) == c for w, c in constraints):
            out.append(x)
    return out


def restricted_mass_direct(table, n: int, a: int, i: int) -> int:
    """Sum of squared (scaled) coefficients over {w : w . a = i}."""
    total = 0
    for w in range(1 << n):
        if parity(w & a) == i:
            c = walsh_coefficient_direct(table, n, w)
            total += c * c
    return total


def feistel3_encrypt_direct(n: int, p1, p2, p3, left: int, right: int):
    """Three rounds of (L, R) -> (R + P(L), L), straight from the rule."""
    for rf in (p1, p2, p3):
        left, right = right ^ int(rf[left]), left
    return left, right


def toy_encrypt_direct(n: int, rounds: int, sbox, last_sbox, master: int,
                       last_key: int, x: int, rotate=None) -> int:
    """Keyed rounds then the final whitened substitution, per definition."""
    kb = (rounds - 1) * n
    y = x
    for i in range(1, rounds):
        ki = (master >> (kb - i * n)) & ((1 << n) - 1)
        y = int(sbox[y ^ ki])
        y = ((y << 1) | (y >> (n - 1))) & ((1 << n) - 1)
    return int(last_sbox[y]) ^ last_key


def key_match_counts_direct(n: int, etable, inv_last, a: int, alpha: int,
                            plain_xs) -> list:
    """Per-key-guess count of pairs whose one-round partial decryption
    difference equals alpha."""
    counts = []
    for s in range(1 << n):
        c = 0
        for x in plain_xs:
            y1 = int(inv_last[int(etable[x]) ^ s])
            y2 = int(inv_last[int(etable[x ^ a]) ^ s])
            if y1 ^ y2 == alpha:
                c += 1
        counts.append(c)
    return counts


def chi_square_statistic(observed, expected) -> float:
    """Plain chi-square over cells with nonzero expectation."""
    stat = 0.0
    for o, e in zip(observed, expected):
        if e > 0:
            stat += (o - e) ** 2 / e
    return stat
