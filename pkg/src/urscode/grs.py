"""Generalized Reed-Solomon codes in the dual (syndrome-kernel) form.

A code is the kernel of the syndrome matrix S = V . D, where V is the
(n-k) x n Vandermonde matrix on the labels and D the diagonal of
multipliers.  Everything downstream (key equation, root search,
magnitude recovery, erasure handling) works on that formulation.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache

import numpy as np

from .gf import (
    GF,
    ConfigurationError,
    element_hex,
    gf_mat_inv,
    gf_mat_vec,
    gf_solve,
    parse_element,
    poly_deg,
    poly_eval,
    poly_mul,
    poly_norm,
    poly_pad,
    poly_reversed,
)

__all__ = [
    "GrsCode",
    "DecodeStatus",
    "DecodeOutcome",
    "make_grs",
    "syndrome",
    "encode_systematic",
    "solve_key_equation",
    "find_roots",
    "error_magnitudes",
    "forney_magnitudes",
    "decode_bounded",
    "min_distance_bruteforce",
    "enumerate_codewords",
    "coset_representative",
    "shorten",
    "code_to_json",
    "code_from_json",
]


class DecodeStatus(str, Enum):
    NO_ERROR = "no_error"
    CORRECTED = "corrected"
    UNCORRECTABLE = "uncorrectable"


@dataclass(frozen=True)
class DecodeOutcome:
    """Result of one decode attempt.

    `error_vector` maps block position -> magnitude and is present iff the
    status is CORRECTED; XOR-ing it into the input block yields a word
    with zero syndrome.  `touched_columns` are column indices at width
    `column_ell` (width 1 for plain GRS decoding).
    """

    status: DecodeStatus
    error_vector: dict[int, int] | None
    touched_columns: frozenset[int]
    decoder_id: str
    column_ell: int = 1
    stage_index: int | None = None
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status is not DecodeStatus.UNCORRECTABLE

    def to_json(self, f: GF) -> dict:
        out = {
            "status": self.status.value,
            "decoder_id": self.decoder_id,
            "column_ell": self.column_ell,
            "touched_columns": sorted(self.touched_columns),
        }
        if self.error_vector is not None:
            out["error_vector"] = [
                {"position": p, "magnitude": element_hex(f, v)}
                for p, v in sorted(self.error_vector.items())
            ]
        if self.stage_index is not None:
            out["stage_index"] = self.stage_index
        if self.detail:
            out["detail"] = self.detail
        return out


_NO_ERROR_VEC: dict[int, int] = {}


def _no_error(decoder_id: str, column_ell: int = 1) -> DecodeOutcome:
    return DecodeOutcome(DecodeStatus.NO_ERROR, None, frozenset(), decoder_id, column_ell)


def _uncorrectable(decoder_id: str, detail: str, column_ell: int = 1) -> DecodeOutcome:
    return DecodeOutcome(
        DecodeStatus.UNCORRECTABLE, None, frozenset(), decoder_id, column_ell, detail=detail
    )


@dataclass(frozen=True)
class GrsCode:
    """An (n, k) generalized Reed-Solomon code over `field`.

    Codewords are exactly the blocks with zero syndrome.  Minimum
    distance is n-k+1 (MDS); `t` is the reliable decoding radius.
    """

    field: GF
    n: int
    k: int
    labels: tuple[int, ...]
    multipliers: tuple[int, ...]
    parity_positions: tuple[int, ...]

    @property
    def redundancy(self) -> int:
        return self.n - self.k

    @property
    def d(self) -> int:
        return self.n - self.k + 1

    @property
    def t(self) -> int:
        return (self.n - self.k) // 2

    @property
    def data_positions(self) -> tuple[int, ...]:
        par = set(self.parity_positions)
        return tuple(i for i in range(self.n) if i not in par)

    @cached_property
    def _syndrome_matrix(self) -> np.ndarray:
        f = self.field
        mat = np.zeros((self.redundancy, self.n), dtype=np.int32)
        for i, (lab, m) in enumerate(zip(self.labels, self.multipliers)):
            v = m
            for row in range(self.redundancy):
                mat[row, i] = v
                v = f.mul(v, lab)
        return mat

    @cached_property
    def _parity_solver(self) -> list[list[int]]:
        # Inverse of the syndrome matrix restricted to the parity columns;
        # always invertible because the labels are distinct (MDS).
        f = self.field
        sub = [
            [int(self._syndrome_matrix[r, p]) for p in self.parity_positions]
            for r in range(self.redundancy)
        ]
        inv = gf_mat_inv(f, sub)
        assert inv is not None
        return inv


def make_grs(
    f: GF,
    n: int,
    k: int,
    labels=None,
    multipliers=None,
    parity_positions=None,
) -> GrsCode:
    """Validated construction; rejects duplicate labels and zero multipliers."""
    if not 0 < k < n:
        raise ConfigurationError(f"need 0 < k < n, got (n, k) = ({n}, {k})")
    if n > f.q:
        raise ConfigurationError(f"length {n} exceeds field size {f.q}")
    if labels is None:
        labels = range(n)
    labels = tuple(int(x) for x in labels)
    if len(labels) != n:
        raise ConfigurationError(f"expected {n} labels, got {len(labels)}")
    if any(not 0 <= x < f.q for x in labels):
        raise ConfigurationError("label out of field range")
    if len(set(labels)) != n:
        raise ConfigurationError("labels must be pairwise distinct")
    if multipliers is None:
        multipliers = (1,) * n
    multipliers = tuple(int(x) for x in multipliers)
    if len(multipliers) != n or any(not 0 < x < f.q for x in multipliers):
        raise ConfigurationError("multipliers must be n nonzero field elements")
    if parity_positions is None:
        parity_positions = tuple(range(k, n))
    parity_positions = tuple(sorted(set(int(x) for x in parity_positions)))
    if len(parity_positions) != n - k or any(
        not 0 <= p < n for p in parity_positions
    ):
        raise ConfigurationError(f"parity_positions must be {n - k} distinct indices")
    return GrsCode(f, n, k, labels, multipliers, parity_positions)


def syndrome(code: GrsCode, block) -> list[int]:
    """sigma_m = sum_i block_i m_i alpha_i^m for m = 0..n-k-1; zero iff block is a codeword."""
    if len(block) != code.n:
        raise ConfigurationError(f"block length {len(block)} != n = {code.n}")
    out = code.field.np_matvec(code._syndrome_matrix, np.asarray(block, dtype=np.int32))
    return [int(x) for x in out]


def syndrome_of_sparse(code: GrsCode, error: dict[int, int]) -> list[int]:
    """Syndrome of a sparse error vector, without materializing the block."""
    f = code.field
    out = [0] * code.redundancy
    for pos, mag in error.items():
        if mag == 0:
            continue
        v = f.mul(mag, code.multipliers[pos])
        lab = code.labels[pos]
        for m in range(code.redundancy):
            out[m] ^= v
            v = f.mul(v, lab)
    return out


def encode_systematic(code: GrsCode, data) -> list[int]:
    """Place data at the non-parity positions and solve for the parity symbols."""
    if len(data) != code.k:
        raise ConfigurationError(f"data length {len(data)} != k = {code.k}")
    word = [0] * code.n
    for pos, v in zip(code.data_positions, data):
        word[pos] = int(v)
    rhs = syndrome(code, word)
    par = gf_mat_vec(code.field, code._parity_solver, rhs)
    for pos, v in zip(code.parity_positions, par):
        word[pos] = v
    return word


def solve_key_equation(
    f: GF, synd: list[int], t_max: int
) -> tuple[list[int], list[int], int] | None:
    """Minimal-degree reversed locator for the given syndrome sequence.

    Inversionless Berlekamp-Massey; returns (lambda_rev, omega, e) with
    lambda_rev(0) = 1, omega = lambda_rev * sigma mod x^len(synd) of degree
    < e, or None when the minimal LFSR length exceeds t_max.
    """
    c = [1]
    b = [1]
    length = 0
    m = 1
    prev_disc = 1
    for i in range(len(synd)):
        disc = 0
        for j in range(min(length, len(c) - 1) + 1):
            if c[j] and synd[i - j]:
                disc ^= f.mul(c[j], synd[i - j])
        if disc == 0:
            m += 1
            continue
        # c <- prev_disc*c + disc*x^m*b  (no inversion in the loop)
        new_c = [f.mul(prev_disc, v) for v in c] + [0] * max(
            0, m + len(b) - len(c)
        )
        for j, bv in enumerate(b):
            if bv:
                new_c[m + j] ^= f.mul(disc, bv)
        if 2 * length <= i:
            b = c
            prev_disc = disc
            length = i + 1 - length
            m = 1
        else:
            m += 1
        c = new_c
    if length > t_max:
        return None
    c0 = c[0]
    if c0 != 1:
        inv = f.inv(c0)
        c = [f.mul(inv, v) for v in c]
    lam = poly_norm(c)
    omega = poly_norm(poly_mul(f, lam, synd)[: len(synd)])
    dom = poly_deg(omega)
    if dom is not None and dom >= max(length, 1):
        return None  # sequence not generated; defensive, unreachable within bound
    return lam, omega, length


def find_roots(code: GrsCode, lam_rev: list[int], err_count: int) -> list[int]:
    """Positions whose labels are roots of the (non-reversed) locator.

    Works from the degree-`err_count` reversal so that label 0 is covered
    even though the reversed locator drops degree there.  Callers treat a
    root count different from err_count as "does not split".
    """
    lam = poly_reversed(lam_rev, err_count)
    f = code.field
    return [i for i, a in enumerate(code.labels) if poly_eval(f, lam, a) == 0]


def error_magnitudes(
    code: GrsCode, synd: list[int], positions: list[int]
) -> dict[int, int] | None:
    """Magnitudes at the given positions consistent with the full syndrome.

    Solves the (n-k) x p Vandermonde-diagonal system; None when the
    system is inconsistent (the positions cannot explain the syndrome).
    """
    f = code.field
    if len(set(positions)) != len(positions):
        raise ConfigurationError("duplicate error positions")
    if not positions:
        return {} if all(v == 0 for v in synd) else None
    rows = []
    cols = [(code.labels[p], code.multipliers[p]) for p in positions]
    acc = [m for (_lab, m) in cols]
    for _m in range(len(synd)):
        rows.append(list(acc))
        acc = [f.mul(v, lab) for v, (lab, _mm) in zip(acc, cols)]
    sol = gf_solve(f, rows, synd)
    if sol is None:
        return None
    x, free = sol
    assert free == 0  # distinct labels: full column rank
    return {p: v for p, v in zip(positions, x)}


def forney_magnitudes(
    code: GrsCode,
    lam_rev: list[int],
    omega: list[int],
    positions: list[int],
) -> dict[int, int] | None:
    """Forney's formula; fast path valid only when no error label is 0."""
    f = code.field
    if any(code.labels[p] == 0 for p in positions):
        return None
    deriv = [lam_rev[i] if i % 2 == 1 else 0 for i in range(1, len(lam_rev))]
    out = {}
    for p in positions:
        xinv = f.inv(code.labels[p])
        num = f.mul(code.labels[p], poly_eval(f, omega, xinv))
        den = f.mul(code.multipliers[p], poly_eval(f, deriv, xinv))
        if den == 0:
            return None
        out[p] = f.div(num, den)
    return out


def _erasure_locator_rev(code: GrsCode, erasures: list[int]) -> list[int]:
    f = code.field
    g = [1]
    for p in erasures:
        g = poly_mul(f, g, [1, code.labels[p]])  # (1 - x*alpha) in char 2
    return g


def decode_bounded(
    code: GrsCode,
    block=None,
    t_max: int | None = None,
    erasures=(),
    synd: list[int] | None = None,
    _forney: list[int] | None = None,
) -> DecodeOutcome:
    """Errors-and-erasures bounded-distance decoding.

    Corrects up to t_max symbol errors plus the declared erasures
    (2*t_max + |erasures| <= n-k).  The Forney syndrome is the plain
    syndrome multiplied by the reversed erasure locator mod x^(n-k); the
    key equation is then solved on its shifted tail.  Magnitudes come
    from the full restricted linear system, so a CORRECTED outcome always
    re-syndromes to zero.

    Pass either the block or a precomputed syndrome.
    """
    f = code.field
    nk = code.redundancy
    er = sorted(set(int(p) for p in erasures))
    if any(not 0 <= p < code.n for p in er):
        raise ConfigurationError("erasure index out of range")
    rho = len(er)
    if t_max is None:
        t_max = (nk - rho) // 2
    if t_max < 0 or 2 * t_max + rho > nk:
        raise ConfigurationError(
            f"2*t_max + erasures = {2 * t_max + rho} exceeds redundancy {nk}"
        )
    synd = list(synd) if synd is not None else syndrome(code, block)
    if not any(synd):
        return _no_error("bounded")
    if _forney is not None:
        fsynd = list(_forney)
    elif rho:
        gam = _erasure_locator_rev(code, er)
        fsynd = poly_pad(poly_mul(f, gam, synd)[:nk], nk)
    else:
        fsynd = synd
    seq = fsynd[rho:]
    if seq:
        res = solve_key_equation(f, seq, t_max)
        if res is None:
            return _uncorrectable("bounded", "key equation unsolvable within radius")
        lam_rev, _omega, e = res
    else:
        lam_rev, e = [1], 0
    if e:
        roots = find_roots(code, lam_rev, e)
        if len(roots) != e:
            return _uncorrectable("bounded", "locator does not split over the labels")
        if any(p in er for p in roots):
            return _uncorrectable("bounded", "locator root at an erased position")
    else:
        roots = []
    positions = er + roots
    mags = error_magnitudes(code, synd, positions)
    if mags is None:
        return _uncorrectable("bounded", "magnitudes inconsistent with syndrome")
    if any(mags[p] == 0 for p in roots):
        return _uncorrectable("bounded", "zero magnitude at a located position")
    err = {p: v for p, v in mags.items() if v}
    return DecodeOutcome(
        DecodeStatus.CORRECTED, err, frozenset(err), "bounded", column_ell=1
    )


@lru_cache(maxsize=16)
def enumerate_codewords(code: GrsCode) -> np.ndarray:
    """All q^k codewords as a (q^k, n) int16 array.  Tiny codes only."""
    f = code.field
    if f.q**code.k > 1 << 24:
        raise ConfigurationError("codeword enumeration limited to q^k <= 2^24")
    basis = [
        encode_systematic(code, [1 if j == i else 0 for j in range(code.k)])
        for i in range(code.k)
    ]
    words = np.zeros((1, code.n), dtype=np.int16)
    for row in basis:
        scaled = np.array(
            [[f.mul(c, v) for v in row] for c in range(f.q)], dtype=np.int16
        )
        words = (words[:, None, :] ^ scaled[None, :, :]).reshape(-1, code.n)
    return words


def min_distance_bruteforce(code: GrsCode) -> int:
    """Exact minimum weight over all nonzero codewords, by enumeration."""
    words = enumerate_codewords(code)
    weights = np.count_nonzero(words, axis=1)
    return int(weights[weights > 0].min())


def coset_representative(code: GrsCode, synd: list[int]) -> list[int]:
    """A block (supported on the parity positions) with the given syndrome."""
    if len(synd) != code.redundancy:
        raise ConfigurationError("syndrome length mismatch")
    par = gf_mat_vec(code.field, code._parity_solver, list(synd))
    word = [0] * code.n
    for pos, v in zip(code.parity_positions, par):
        word[pos] = v
    return word


def shorten(code: GrsCode, fixed_positions) -> GrsCode:
    """Remove data positions whose symbols are pinned to zero.

    Keeps the surviving labels and multipliers, so distance can only
    grow; fixing parity positions is rejected.
    """
    fixed = sorted(set(int(p) for p in fixed_positions))
    if any(p in code.parity_positions for p in fixed):
        raise ConfigurationError("cannot shorten away parity positions")
    if any(not 0 <= p < code.n for p in fixed):
        raise ConfigurationError("shorten position out of range")
    keep = [i for i in range(code.n) if i not in fixed]
    remap = {old: new for new, old in enumerate(keep)}
    return make_grs(
        code.field,
        len(keep),
        code.k - len(fixed),
        [code.labels[i] for i in keep],
        [code.multipliers[i] for i in keep],
        [remap[p] for p in code.parity_positions],
    )


def code_to_json(code: GrsCode) -> dict:
    f = code.field
    return {
        "field": f.to_json(),
        "n": code.n,
        "k": code.k,
        "labels": [element_hex(f, x) for x in code.labels],
        "multipliers": [element_hex(f, x) for x in code.multipliers],
        "parity_positions": list(code.parity_positions),
    }


def code_from_json(obj: dict) -> GrsCode:
    f = GF.from_json(obj["field"])
    return make_grs(
        f,
        int(obj["n"]),
        int(obj["k"]),
        [parse_element(f, x) for x in obj["labels"]],
        [parse_element(f, x) for x in obj["multipliers"]],
        obj["parity_positions"],
    )
