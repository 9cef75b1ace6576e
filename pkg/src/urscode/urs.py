"""Construction of unraveling Reed-Solomon codes.

A URS code is a length-N = ell*n GRS code whose labels are the fibers
beta_ij of a degree-ell map G over the column labels alpha_i (G - alpha_i
splits into ell distinct roots).  Applying the ell x ell Vandermonde
matrix on each column's fiber ("Mix_i") is a bijection onto an
interleaving of ell row codes of length n, which is what makes fast
column-oriented decoders possible on a full-block MDS code.

The same big code usually unravels several ways; `view` / `unravel_along`
derive those alternative groupings as first-class UrsCode objects sharing
the underlying big code.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .gf import (
    GF,
    ConfigurationError,
    element_hex,
    gf_mat_inv,
    gf_mat_vec,
    parse_element,
    poly_eval,
    poly_mul,
    poly_norm,
    poly_pad,
)
from .grs import GrsCode, encode_systematic, make_grs, syndrome

__all__ = [
    "CollapsingMap",
    "subspace_poly",
    "power_map",
    "custom_map",
    "enumerate_fibers",
    "eligible_labels",
    "UrsCode",
    "construct_urs",
    "unravel",
    "reravel",
    "encode_recursive",
    "row_syndromes",
    "rows_from_big_syndrome",
    "syndrome_translation_matrix",
    "view",
    "unravel_along",
    "urs_to_json",
    "urs_from_json",
]


@dataclass(frozen=True)
class CollapsingMap:
    """A degree-ell polynomial used to group code labels into columns.

    kind "power" is x^ell (needs ell | q-1), kind "subspace" is
    G_W = prod_{w in W}(x - w) for a GF(2)-subspace W, kind "custom" is an
    arbitrary polynomial whose eligibility is decided purely by fiber
    enumeration.
    """

    kind: str
    coeffs: tuple[int, ...]
    ell: int
    basis: tuple[int, ...] = ()

    def __call__(self, f: GF, x: int) -> int:
        return poly_eval(f, list(self.coeffs), x)

    @property
    def monic(self) -> bool:
        return self.coeffs[-1] == 1

    def to_json(self, f: GF) -> dict:
        if self.kind == "subspace":
            return {"kind": "subspace", "basis": [element_hex(f, b) for b in self.basis]}
        if self.kind == "power":
            return {"kind": "power", "ell": self.ell}
        return {"kind": "custom", "coeffs": [element_hex(f, c) for c in self.coeffs]}

    @staticmethod
    def from_json(f: GF, obj: dict) -> "CollapsingMap":
        kind = obj["kind"]
        if kind == "subspace":
            return subspace_poly(f, [parse_element(f, b) for b in obj["basis"]])
        if kind == "power":
            return power_map(f, int(obj["ell"]))
        if kind == "custom":
            return custom_map(f, [parse_element(f, c) for c in obj["coeffs"]])
        raise ConfigurationError(f"unknown collapsing map kind {kind!r}")


def _span(f: GF, basis: list[int]) -> list[int]:
    span = [0]
    for b in basis:
        if b == 0 or b in span:
            raise ConfigurationError("basis elements must be GF(2)-linearly independent")
        span = span + [v ^ b for v in span]
    return span


def subspace_poly(f: GF, basis) -> CollapsingMap:
    """G_W = prod_{w in span(basis)} (x - w): a GF(2)-linear map with kernel W.

    Only monomials whose degree is a power of two can appear (linearized
    polynomial), which is what makes the per-column erasure locators
    G - alpha_i sparse.
    """
    basis = tuple(int(b) for b in basis)
    span = _span(f, list(basis))
    g = [1]
    for w in span:
        g = poly_mul(f, g, [w, 1])
    return CollapsingMap("subspace", tuple(g), len(span), basis)


def power_map(f: GF, ell: int) -> CollapsingMap:
    """x^ell; every nonzero image value has exactly ell preimages."""
    if ell < 1 or (f.q - 1) % ell != 0:
        raise ConfigurationError("ℓ must divide q−1")
    return CollapsingMap("power", tuple([0] * ell + [1]), ell)


def custom_map(f: GF, coeffs) -> CollapsingMap:
    coeffs = poly_norm([int(c) for c in coeffs])
    if len(coeffs) < 2:
        raise ConfigurationError("collapsing map must have degree >= 1")
    return CollapsingMap("custom", tuple(coeffs), len(coeffs) - 1)


def enumerate_fibers(f: GF, gmap: CollapsingMap) -> dict[int, tuple[int, ...]]:
    """Map image value -> sorted distinct preimages, for every value G hits.

    Only values with exactly `ell` preimages are eligible column labels;
    ascending order fixes the beta_ij numbering deterministically.
    """
    fibers: dict[int, list[int]] = {}
    coeffs = list(gmap.coeffs)
    for beta in range(f.q):
        fibers.setdefault(poly_eval(f, coeffs, beta), []).append(beta)
    return {a: tuple(v) for a, v in sorted(fibers.items())}


def eligible_labels(f: GF, gmap: CollapsingMap) -> list[int]:
    return [a for a, fib in enumerate_fibers(f, gmap).items() if len(fib) == gmap.ell]


@dataclass(frozen=True)
class UrsCode:
    """A URS code, or equivalently one unraveling view of its big code.

    `positions[i][j]` is the big-block index holding the symbol with
    label `fibers[i][j]`; for a primary construction that is simply
    i*ell + j (column-major), while derived views carry whatever grouping
    the sub-map induces.  Row h of the unraveling is a codeword of
    `row_codes[h]` whenever the block is a big-code codeword.
    """

    field: GF
    gmap: CollapsingMap
    n: int
    k: int
    a: int
    column_labels: tuple[int, ...]
    fibers: tuple[tuple[int, ...], ...]
    positions: tuple[tuple[int, ...], ...]
    big_code: GrsCode
    row_codes: tuple[GrsCode, ...]
    mixes: tuple[tuple[tuple[int, ...], ...], ...]
    mix_invs: tuple[tuple[tuple[int, ...], ...], ...]

    @property
    def ell(self) -> int:
        return self.gmap.ell

    @property
    def N(self) -> int:
        return self.big_code.n

    @property
    def K(self) -> int:
        return self.big_code.k

    @property
    def row_dims(self) -> tuple[int, ...]:
        return tuple(rc.k for rc in self.row_codes)

    @property
    def fully_unraveled(self) -> bool:
        """Rows all have distance <= 3 with at least one distance-3 row."""
        red = [rc.redundancy for rc in self.row_codes]
        return max(red) <= 2 and 2 in red

    @cached_property
    def position_column(self) -> dict[int, int]:
        return {p: i for i, col in enumerate(self.positions) for p in col}

    @cached_property
    def _to_rows(self) -> list[list[int]]:
        # w = T . sigma_big, where w stacks row syndromes in h + ell*m order.
        # Row h + ell*m of T holds the coefficients of x^h * G(x)^m.
        f = self.field
        nk = self.big_code.redundancy
        rows: list[list[int]] = [[0] * nk for _ in range(nk)]
        gpow = [1]
        for m in range(max(rc.redundancy for rc in self.row_codes)):
            for h, rc in enumerate(self.row_codes):
                if m < rc.redundancy:
                    rows[h + self.ell * m] = poly_pad(([0] * h) + gpow, nk)[:nk]
            gpow = poly_mul(f, gpow, list(self.gmap.coeffs))
        return rows

    @cached_property
    def _from_rows(self) -> list[list[int]]:
        inv = gf_mat_inv(self.field, self._to_rows)
        assert inv is not None  # unit-triangular up to row order
        return inv

    @cached_property
    def _views(self) -> dict[int, "UrsCode"]:
        return {}


def _assemble(
    f: GF,
    gmap: CollapsingMap,
    column_labels: tuple[int, ...],
    fibers: tuple[tuple[int, ...], ...],
    positions: tuple[tuple[int, ...], ...],
    big_code: GrsCode,
) -> UrsCode:
    n = len(column_labels)
    ell = gmap.ell
    k, a = divmod(big_code.k, ell)
    if k < 1 or k >= n or (a > 0 and k + 1 >= n):
        raise ConfigurationError(
            f"row shape ({n}, {k}+{a}) is degenerate for ell={ell}"
        )
    row_codes = tuple(
        make_grs(f, n, k if h < ell - a else k + 1, column_labels)
        for h in range(ell)
    )
    mixes = []
    mix_invs = []
    for fib in fibers:
        mat = [[f.pow(b, h) for b in fib] for h in range(ell)]
        inv = gf_mat_inv(f, mat)
        assert inv is not None  # distinct fiber elements
        mixes.append(tuple(tuple(r) for r in mat))
        mix_invs.append(tuple(tuple(r) for r in inv))
    return UrsCode(
        f,
        gmap,
        n,
        k,
        a,
        column_labels,
        fibers,
        positions,
        big_code,
        row_codes,
        tuple(mixes),
        tuple(mix_invs),
    )


def construct_urs(
    f: GF,
    gmap: CollapsingMap,
    n: int,
    k: int,
    a: int,
    labels=None,
    parity_positions=None,
) -> UrsCode:
    """Build the (ell*n, ell*k + a) URS code over the given collapsing map.

    Column labels default to the first n eligible image values in
    ascending order; big-code labels are the concatenated fibers,
    column-major, each fiber ascending.
    """
    ell = gmap.ell
    if not 0 <= a < ell:
        raise ConfigurationError(f"remainder a={a} must satisfy 0 <= a < ell={ell}")
    if k < 1 or k >= n or (a > 0 and k + 1 >= n):
        raise ConfigurationError(f"need 1 <= k < n (and k+1 < n when a > 0)")
    fibers_all = enumerate_fibers(f, gmap)
    eligible = [lab for lab, fib in fibers_all.items() if len(fib) == ell]
    if labels is None:
        if len(eligible) < n:
            raise ConfigurationError(
                f"insufficient eligible labels: need {n}, map supports {len(eligible)}"
            )
        labels = eligible[:n]
    labels = tuple(int(x) for x in labels)
    if len(labels) != n or len(set(labels)) != n:
        raise ConfigurationError(f"need {n} distinct column labels")
    bad = [lab for lab in labels if len(fibers_all.get(lab, ())) != ell]
    if bad:
        raise ConfigurationError(
            f"labels {bad} do not split into {ell} distinct roots"
        )
    fibers = tuple(fibers_all[lab] for lab in labels)
    big_labels = [b for fib in fibers for b in fib]
    big_code = make_grs(
        f, ell * n, ell * k + a, big_labels, parity_positions=parity_positions
    )
    positions = tuple(
        tuple(range(i * ell, (i + 1) * ell)) for i in range(n)
    )
    return _assemble(f, gmap, labels, fibers, positions, big_code)


def unravel(urs: UrsCode, block) -> list[list[int]]:
    """Apply Mix_i to each column: row h gets U_ih = sum_j C_ij beta_ij^h."""
    if len(block) != urs.N:
        raise ConfigurationError(f"block length {len(block)} != N = {urs.N}")
    rows = [[0] * urs.n for _ in range(urs.ell)]
    for i in range(urs.n):
        col = [block[p] for p in urs.positions[i]]
        mixed = gf_mat_vec(urs.field, urs.mixes[i], col)
        for h in range(urs.ell):
            rows[h][i] = mixed[h]
    return rows


def reravel(urs: UrsCode, rows) -> list[int]:
    """Inverse of unravel: apply Mix_i^-1 per column and scatter."""
    if len(rows) != urs.ell or any(len(r) != urs.n for r in rows):
        raise ConfigurationError(f"expected {urs.ell} rows of {urs.n} symbols")
    block = [0] * urs.N
    for i in range(urs.n):
        mixed = [rows[h][i] for h in range(urs.ell)]
        col = gf_mat_vec(urs.field, urs.mix_invs[i], mixed)
        for p, v in zip(urs.positions[i], col):
            block[p] = v
    return block


def encode_recursive(urs: UrsCode, data) -> list[int]:
    """Encode each row code systematically, then reravel.

    Data is consumed row-major: rows 0..ell-a-1 take k symbols each, the
    last a rows take k+1.
    """
    if len(data) != urs.K:
        raise ConfigurationError(f"data length {len(data)} != K = {urs.K}")
    rows = []
    off = 0
    for rc in urs.row_codes:
        rows.append(encode_systematic(rc, data[off : off + rc.k]))
        off += rc.k
    return reravel(urs, rows)


def row_syndromes(urs: UrsCode, block) -> list[list[int]]:
    """Per-row syndromes of the unraveled block (recomputed from scratch)."""
    rows = unravel(urs, block)
    return [syndrome(rc, row) for rc, row in zip(urs.row_codes, rows)]


def rows_from_big_syndrome(urs: UrsCode, big_synd: list[int]) -> list[list[int]]:
    """Translate a big-code syndrome into the stacked row syndromes."""
    w = gf_mat_vec(urs.field, urs._to_rows, list(big_synd))
    return [
        [w[h + urs.ell * m] for m in range(rc.redundancy)]
        for h, rc in enumerate(urs.row_codes)
    ]


def syndrome_translation_matrix(urs: UrsCode) -> list[list[int]]:
    """Invertible M with sigma_big = M . (stacked row syndromes).

    The stacking order is the ascending-moment order h + ell*m.  M is the
    inverse of the unit-lower-triangular matrix built from the
    coefficients of x^h G(x)^m, so when G has 0/1 coefficients M does too.
    """
    return [list(r) for r in urs._from_rows]


def _canonical_submap(urs: UrsCode, ell_eff: int) -> CollapsingMap:
    f = urs.field
    if ell_eff == 1:
        return power_map(f, 1)
    if urs.gmap.kind == "subspace":
        c = ell_eff.bit_length() - 1
        if 1 << c != ell_eff or c > len(urs.gmap.basis):
            raise ConfigurationError(
                f"subspace code unravels at powers of two up to {urs.ell}, not {ell_eff}"
            )
        return subspace_poly(f, urs.gmap.basis[:c])
    if urs.gmap.kind == "power":
        if urs.ell % ell_eff != 0:
            raise ConfigurationError(f"{ell_eff} does not divide ell = {urs.ell}")
        return power_map(f, ell_eff)
    raise ConfigurationError("custom maps only support their own unraveling order")


def _derive_view(urs: UrsCode, gv: CollapsingMap) -> UrsCode:
    f = urs.field
    groups: dict[int, list[tuple[int, int]]] = {}
    order: list[int] = []
    coeffs = list(gv.coeffs)
    for pos, beta in enumerate(urs.big_code.labels):
        gamma = poly_eval(f, coeffs, beta)
        if gamma not in groups:
            groups[gamma] = []
            order.append(gamma)
        groups[gamma].append((beta, pos))
    if any(len(g) != gv.ell for g in groups.values()):
        raise ConfigurationError("sub-map does not evenly split the code labels")
    fibers = []
    positions = []
    for gamma in order:
        members = sorted(groups[gamma])
        fibers.append(tuple(b for b, _ in members))
        positions.append(tuple(p for _, p in members))
    return _assemble(
        f, gv, tuple(order), tuple(fibers), tuple(positions), urs.big_code
    )


def view(urs: UrsCode, ell_eff: int) -> UrsCode:
    """The canonical unraveling of the same big code at order ell_eff.

    Subspace-built codes unravel along the prefix of their basis; power
    maps along any divisor of ell.  The view shares the big code object,
    so its syndrome is translatable rather than recomputed.
    """
    if ell_eff == urs.ell:
        return urs
    cached = urs._views.get(ell_eff)
    if cached is None:
        cached = _derive_view(urs, _canonical_submap(urs, ell_eff))
        urs._views[ell_eff] = cached
    return cached


def unravel_along(urs: UrsCode, sub_basis) -> UrsCode:
    """Unravel along an explicit subspace V of W (subspace-built codes).

    Different bases of size c give different groupings of the same code,
    which is how time-aligned versus channel-aligned burst patterns are
    both searchable.
    """
    if urs.gmap.kind != "subspace":
        raise ConfigurationError("unravel_along requires a subspace-built code")
    sub_basis = tuple(int(b) for b in sub_basis)
    w_span = set(_span(urs.field, list(urs.gmap.basis)))
    v_span = _span(urs.field, list(sub_basis))
    if any(v not in w_span for v in v_span):
        raise ConfigurationError("sub-basis does not span a subspace of W")
    return _derive_view(urs, subspace_poly(urs.field, sub_basis))


def urs_to_json(urs: UrsCode) -> dict:
    f = urs.field
    return {
        "field": f.to_json(),
        "g": urs.gmap.to_json(f),
        "n": urs.n,
        "k": urs.k,
        "a": urs.a,
        "column_labels": [element_hex(f, x) for x in urs.column_labels],
        "shapes": {
            "big": [urs.N, urs.K],
            "rows": [[rc.n, rc.k] for rc in urs.row_codes],
        },
    }


def urs_from_json(obj: dict) -> UrsCode:
    f = GF.from_json(obj["field"])
    gmap = CollapsingMap.from_json(f, obj["g"])
    labels = [parse_element(f, x) for x in obj["column_labels"]]
    return construct_urs(f, gmap, int(obj["n"]), int(obj["k"]), int(obj["a"]), labels)
