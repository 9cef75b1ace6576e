"""Exact arithmetic in binary extension fields GF(2^b), 1 <= b <= 16.

Field elements are plain Python ints in [0, 2^b), interpreted as GF(2)
polynomial residues; addition is XOR.  Multiplication goes through
log/antilog tables built from a generator of the multiplicative group,
so the reduction polynomial only has to be irreducible, not primitive.

Polynomials over a field are lists of ints, lowest degree first.  In
normalized form there are no trailing zero coefficients; the zero
polynomial is the empty list and its degree is ``None``.  The marker is
deliberate: locator-degree logic in the decoders branches on exact
degrees, so a sentinel number would be a bug magnet.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

__all__ = [
    "ConfigurationError",
    "DEFAULT_REDUCTION_POLYS",
    "GF",
    "field",
    "poly_norm",
    "poly_deg",
    "poly_add",
    "poly_scale",
    "poly_mul",
    "poly_eval",
    "poly_divmod",
    "poly_mod",
    "poly_from_roots",
    "poly_reversed",
    "poly_deriv",
    "poly_pad",
    "gf_mat_vec",
    "gf_mat_mul",
    "gf_mat_inv",
    "gf_solve",
    "element_hex",
    "parse_element",
    "block_to_hex",
    "hex_to_block",
]


class ConfigurationError(ValueError):
    """Invalid parameters for a field, code, decoder, or CLI invocation."""


# One irreducible polynomial per extension degree, overridable per field.
# The 4/8/16-bit entries are the conventional Reed-Solomon moduli.
DEFAULT_REDUCTION_POLYS = {
    1: 0x3,
    2: 0x7,
    3: 0xB,
    4: 0x13,
    5: 0x25,
    6: 0x43,
    7: 0x89,
    8: 0x11D,
    9: 0x211,
    10: 0x409,
    11: 0x805,
    12: 0x1053,
    13: 0x201B,
    14: 0x4143,
    15: 0x8003,
    16: 0x1002D,
}


def _gf2_mod(a: int, m: int) -> int:
    """Remainder of GF(2)[x] division of bitmask a by bitmask m."""
    dm = m.bit_length() - 1
    while a and a.bit_length() - 1 >= dm:
        a ^= m << (a.bit_length() - 1 - dm)
    return a


def _is_irreducible(poly: int, degree: int) -> bool:
    """Trial division by every GF(2) polynomial of degree <= degree/2."""
    for d in range(1, degree // 2 + 1):
        for cand in range(1 << d, 1 << (d + 1)):
            if _gf2_mod(poly, cand) == 0:
                return False
    return True


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


class GF:
    """The field GF(2^bits) with an explicit reduction polynomial.

    All operations are pure; instances are immutable after construction
    and safe to share between threads.
    """

    def __init__(self, bits: int, reduction_poly: int | None = None):
        if not 1 <= bits <= 16:
            raise ConfigurationError(f"field degree must be in 1..16, got {bits}")
        if reduction_poly is None:
            reduction_poly = DEFAULT_REDUCTION_POLYS[bits]
        if reduction_poly.bit_length() != bits + 1:
            raise ConfigurationError(
                f"reduction polynomial 0x{reduction_poly:x} does not have degree {bits}"
            )
        if not _is_irreducible(reduction_poly, bits):
            raise ConfigurationError(
                f"reduction polynomial 0x{reduction_poly:x} is reducible over GF(2)"
            )
        self.bits = bits
        self.reduction_poly = reduction_poly
        self.q = 1 << bits
        self._build_tables()
        self._np_exp: np.ndarray | None = None
        self._np_log: np.ndarray | None = None

    # -- construction ---------------------------------------------------

    def mul_raw(self, a: int, b: int) -> int:
        """Carry-less multiply reduced by the modulus, one shift at a time.

        Independent of the log tables; used to build them and kept public
        as the slow cross-check oracle for `mul`.
        """
        p = 0
        while b:
            if b & 1:
                p ^= a
            a <<= 1
            if a & self.q:
                a ^= self.reduction_poly
            b >>= 1
        return p

    def _pow_raw(self, a: int, n: int) -> int:
        r = 1
        while n:
            if n & 1:
                r = self.mul_raw(r, a)
            a = self.mul_raw(a, a)
            n >>= 1
        return r

    def _find_generator(self) -> int:
        group = self.q - 1
        if group == 1:
            return 1
        factors = _prime_factors(group)
        for g in range(2, self.q):
            if all(self._pow_raw(g, group // p) != 1 for p in factors):
                return g
        raise AssertionError("no generator found; modulus is not irreducible")

    def _build_tables(self) -> None:
        group = self.q - 1
        g = self._find_generator()
        self.generator = g
        exp = [0] * (2 * group if group > 1 else 2)
        log = [0] * self.q
        v = 1
        for i in range(group):
            exp[i] = v
            log[v] = i
            v = self.mul_raw(v, g)
        for i in range(group, len(exp)):
            exp[i] = exp[i - group]
        self._exp = exp
        self._log = log

    # -- element arithmetic ----------------------------------------------

    def add(self, a: int, b: int) -> int:
        return a ^ b

    sub = add

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no multiplicative inverse")
        return self._exp[self.q - 1 - self._log[a]]

    def div(self, a: int, b: int) -> int:
        if b == 0:
            raise ZeroDivisionError("division by zero field element")
        if a == 0:
            return 0
        return self._exp[self._log[a] + self.q - 1 - self._log[b]]

    def pow(self, a: int, n: int) -> int:
        if n < 0:
            return self.pow(self.inv(a), -n)
        if a == 0:
            return 1 if n == 0 else 0
        return self._exp[(self._log[a] * n) % (self.q - 1)]

    # -- vectorized helpers ------------------------------------------------

    def _ensure_np(self) -> None:
        if self._np_exp is None:
            self._np_exp = np.asarray(self._exp + [1], dtype=np.int32)
            log = np.asarray(self._log, dtype=np.int32)
            self._np_log = log

    def np_mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Elementwise product of two int arrays of field elements."""
        self._ensure_np()
        a = np.asarray(a, dtype=np.int32)
        b = np.asarray(b, dtype=np.int32)
        zero = (a == 0) | (b == 0)
        idx = self._np_log[a] + self._np_log[b]
        out = self._np_exp[idx]
        return np.where(zero, 0, out)

    def np_matvec(self, mat: np.ndarray, vec: np.ndarray) -> np.ndarray:
        """mat (r x c) times vec (c) over the field, XOR-accumulated."""
        prod = self.np_mul(mat, np.asarray(vec, dtype=np.int32)[None, :])
        return np.bitwise_xor.reduce(prod, axis=1)

    # -- misc ---------------------------------------------------------------

    def to_json(self) -> dict:
        return {"bits": self.bits, "poly": f"0x{self.reduction_poly:x}"}

    @staticmethod
    def from_json(obj: dict) -> "GF":
        return field(int(obj["bits"]), int(obj["poly"], 16))

    def __repr__(self) -> str:
        return f"GF(2^{self.bits}, 0x{self.reduction_poly:x})"


@lru_cache(maxsize=None)
def _field_cached(bits: int, poly: int) -> GF:
    return GF(bits, poly)


def field(bits: int, reduction_poly: int | None = None) -> GF:
    """Shared GF instance for (bits, reduction_poly); tables built once."""
    if reduction_poly is None:
        reduction_poly = DEFAULT_REDUCTION_POLYS.get(bits)
        if reduction_poly is None:
            raise ConfigurationError(f"field degree must be in 1..16, got {bits}")
    return _field_cached(bits, reduction_poly)


# -- polynomials ------------------------------------------------------------


def poly_norm(p: list[int]) -> list[int]:
    """Strip trailing zero coefficients."""
    d = len(p)
    while d and p[d - 1] == 0:
        d -= 1
    return list(p[:d])


def poly_deg(p: list[int]) -> int | None:
    """Degree, or None for the zero polynomial."""
    d = len(p)
    while d and p[d - 1] == 0:
        d -= 1
    return d - 1 if d else None


def poly_pad(p: list[int], n: int) -> list[int]:
    """p extended with zeros to length n."""
    return list(p) + [0] * (n - len(p))


def poly_add(p: list[int], q: list[int]) -> list[int]:
    if len(p) < len(q):
        p, q = q, p
    out = list(p)
    for i, c in enumerate(q):
        out[i] ^= c
    return poly_norm(out)


def poly_scale(f: GF, p: list[int], c: int) -> list[int]:
    if c == 0:
        return []
    return poly_norm([f.mul(c, v) for v in p])


def poly_mul(f: GF, p: list[int], q: list[int]) -> list[int]:
    p = poly_norm(p)
    q = poly_norm(q)
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            if b:
                out[i + j] ^= f.mul(a, b)
    return out


def poly_eval(f: GF, p: list[int], x: int) -> int:
    """Horner evaluation of p at x."""
    acc = 0
    for c in reversed(p):
        acc = f.mul(acc, x) ^ c
    return acc


def poly_divmod(f: GF, p: list[int], m: list[int]) -> tuple[list[int], list[int]]:
    m = poly_norm(m)
    if not m:
        raise ZeroDivisionError("polynomial division by zero polynomial")
    p = poly_norm(p)
    dm = len(m) - 1
    lead_inv = f.inv(m[-1])
    quot = [0] * max(0, len(p) - dm)
    rem = list(p)
    for i in range(len(rem) - 1, dm - 1, -1):
        c = rem[i]
        if c == 0:
            continue
        c = f.mul(c, lead_inv)
        quot[i - dm] = c
        for j, mv in enumerate(m):
            rem[i - dm + j] ^= f.mul(c, mv)
    return poly_norm(quot), poly_norm(rem)


def poly_mod(f: GF, p: list[int], m: list[int]) -> list[int]:
    return poly_divmod(f, p, m)[1]


def poly_from_roots(f: GF, roots: list[int]) -> list[int]:
    """Monic product of (x - r) over the given roots."""
    p = [1]
    for r in roots:
        p = poly_mul(f, p, [r, 1])
    return p


def poly_reversed(p: list[int], degree: int) -> list[int]:
    """Coefficient reversal of p viewed as a degree-`degree` polynomial.

    Maps a monic locator to its reversed form and back; the explicit
    degree matters because the reversed locator drops degree whenever 0
    is among the roots.
    """
    return poly_norm(list(reversed(poly_pad(p, degree + 1))))


def poly_deriv(f: GF, p: list[int]) -> list[int]:
    """Formal derivative; in characteristic 2 only odd-degree terms survive."""
    return poly_norm([p[i] if i % 2 == 1 else 0 for i in range(1, len(p))])


# -- small dense linear algebra over GF(2^b) ---------------------------------


def gf_mat_vec(f: GF, mat: list[list[int]], vec: list[int]) -> list[int]:
    out = []
    for row in mat:
        acc = 0
        for a, b in zip(row, vec):
            if a and b:
                acc ^= f.mul(a, b)
        out.append(acc)
    return out


def gf_mat_mul(f: GF, a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    cols = list(zip(*b))
    return [[_dot(f, row, col) for col in cols] for row in a]


def _dot(f: GF, u, v) -> int:
    acc = 0
    for a, b in zip(u, v):
        if a and b:
            acc ^= f.mul(a, b)
    return acc


def gf_mat_inv(f: GF, mat: list[list[int]]) -> list[list[int]] | None:
    """Inverse via Gauss-Jordan, or None if singular."""
    n = len(mat)
    aug = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(mat)]
    for c in range(n):
        pr = next((r for r in range(c, n) if aug[r][c]), None)
        if pr is None:
            return None
        aug[c], aug[pr] = aug[pr], aug[c]
        inv = f.inv(aug[c][c])
        aug[c] = [f.mul(inv, v) for v in aug[c]]
        for r in range(n):
            if r != c and aug[r][c]:
                coef = aug[r][c]
                aug[r] = [v ^ f.mul(coef, w) for v, w in zip(aug[r], aug[c])]
    return [row[n:] for row in aug]


def gf_solve(
    f: GF, rows: list[list[int]], rhs: list[int]
) -> tuple[list[int], int] | None:
    """Solve the linear system rows . x = rhs over f.

    Returns (particular solution with free variables set to 0, number of
    free variables), or None when the system is inconsistent.
    """
    n_rows = len(rows)
    n_cols = len(rows[0]) if n_rows else 0
    aug = [list(r) + [v] for r, v in zip(rows, rhs)]
    piv_cols: list[int] = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        pr = next((i for i in range(r, n_rows) if aug[i][c]), None)
        if pr is None:
            continue
        aug[r], aug[pr] = aug[pr], aug[r]
        inv = f.inv(aug[r][c])
        aug[r] = [f.mul(inv, v) for v in aug[r]]
        for i in range(n_rows):
            if i != r and aug[i][c]:
                coef = aug[i][c]
                aug[i] = [v ^ f.mul(coef, w) for v, w in zip(aug[i], aug[r])]
        piv_cols.append(c)
        r += 1
    for i in range(r, n_rows):
        if aug[i][n_cols]:
            return None
    x = [0] * n_cols
    for row_idx, c in enumerate(piv_cols):
        x[c] = aug[row_idx][n_cols]
    return x, n_cols - len(piv_cols)


# -- serialization helpers ----------------------------------------------------


def _nibbles(f: GF) -> int:
    return (f.bits + 3) // 4


def element_hex(f: GF, v: int) -> str:
    return f"0x{v:0{_nibbles(f)}x}"


def parse_element(f: GF, s: str) -> int:
    v = int(s, 16)
    if not 0 <= v < f.q:
        raise ConfigurationError(f"element {s} out of range for {f!r}")
    return v


def block_to_hex(f: GF, block: list[int]) -> str:
    w = _nibbles(f)
    return "".join(f"{v:0{w}x}" for v in block)


def hex_to_block(f: GF, s: str) -> list[int]:
    s = s.strip().lower().removeprefix("0x")
    w = _nibbles(f)
    if len(s) % w:
        raise ConfigurationError(f"hex block length {len(s)} is not a multiple of {w}")
    out = [int(s[i : i + w], 16) for i in range(0, len(s), w)]
    if any(v >= f.q for v in out):
        raise ConfigurationError("hex block contains symbols outside the field")
    return out
