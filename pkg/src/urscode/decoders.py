"""URS decoding algorithms and the cascade policy combining them.

Every decoder reports big-code positions in its error vector and the
touched columns at the granularity it decoded at.  All decoders are
syndrome-driven: the cascade computes the big-code syndrome once and
translates it into each stage's view instead of recomputing it.

The accept/reject rules are deliberately strict: a stage returns
UNCORRECTABLE rather than guess whenever its linear system is ambiguous,
its locator does not split over the column labels, or the recovered
magnitudes fail to reproduce the full syndrome.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .gf import (
    ConfigurationError,
    gf_mat_vec,
    gf_solve,
    poly_eval,
    poly_mul,
    poly_pad,
    poly_reversed,
)
from .grs import (
    DecodeOutcome,
    DecodeStatus,
    decode_bounded,
    error_magnitudes,
    syndrome,
)
from .urs import UrsCode, rows_from_big_syndrome, view

__all__ = [
    "Stage",
    "DecodePolicy",
    "default_policy",
    "validate_policy",
    "decode_direct",
    "decode_independent",
    "decode_collaborative",
    "decode_fast_chipkill",
    "decode_stereotyped_plus_one",
    "erase_column_syndrome",
    "decode_cascade",
    "policy_to_json",
    "policy_from_json",
]


def _fail(decoder_id: str, detail: str, column_ell: int) -> DecodeOutcome:
    return DecodeOutcome(
        DecodeStatus.UNCORRECTABLE, None, frozenset(), decoder_id, column_ell, detail=detail
    )


def _clean(decoder_id: str, column_ell: int) -> DecodeOutcome:
    return DecodeOutcome(DecodeStatus.NO_ERROR, None, frozenset(), decoder_id, column_ell)


def _corrected(
    decoder_id: str, err: dict[int, int], cols: set[int], column_ell: int
) -> DecodeOutcome:
    return DecodeOutcome(
        DecodeStatus.CORRECTED, err, frozenset(cols), decoder_id, column_ell
    )


def _column_radius(vw: UrsCode) -> int:
    return vw.big_code.redundancy // (2 * vw.ell)


def _map_erased(urs: UrsCode, vw: UrsCode, erased_columns) -> list[int]:
    """Translate erased column indices from urs granularity to vw's."""
    cols = set()
    for c in erased_columns:
        if not 0 <= c < urs.n:
            raise ConfigurationError(f"erased column {c} out of range")
        for p in urs.positions[c]:
            cols.add(vw.position_column[p])
    return sorted(cols)


# -- direct decoding of the big code ------------------------------------------


def erase_column_syndrome(urs: UrsCode, synd: list[int], erased_columns) -> list[int]:
    """Forney syndrome for whole-column erasures.

    The erasure locator of column i is the degree-ell polynomial
    G - alpha_i (sparse whenever G is), reversal-adjusted; the syndrome is
    multiplied by the product over the erased columns mod x^(N-K).
    """
    f = urs.field
    nk = urs.big_code.redundancy
    cols = sorted(set(int(c) for c in erased_columns))
    if any(not 0 <= c < urs.n for c in cols):
        raise ConfigurationError("erased column out of range")
    if len(cols) * urs.ell > nk:
        raise ConfigurationError(
            f"erasing {len(cols)} columns needs {len(cols) * urs.ell} checks, have {nk}"
        )
    gam = [1]
    for c in cols:
        loc = list(urs.gmap.coeffs)
        loc[0] ^= urs.column_labels[c]  # G - alpha_c, monic with the fiber as roots
        gam = poly_mul(f, gam, poly_reversed(loc, urs.ell))
    return poly_pad(poly_mul(f, gam, list(synd))[:nk], nk)


def _direct_core(
    urs: UrsCode, synd: list[int], erased_columns, t_max: int | None
) -> DecodeOutcome:
    cols = sorted(set(int(c) for c in erased_columns))
    erased_pos = [p for c in cols for p in urs.positions[c]]
    forney = erase_column_syndrome(urs, synd, cols) if cols else None
    out = decode_bounded(
        urs.big_code,
        t_max=t_max,
        erasures=erased_pos,
        synd=synd,
        _forney=forney,
    )
    if out.status is not DecodeStatus.CORRECTED:
        return replace(out, decoder_id="direct", column_ell=urs.ell)
    touched = {urs.position_column[p] for p in out.error_vector}
    return _corrected("direct", out.error_vector, touched, urs.ell)


def decode_direct(urs: UrsCode, block, erased_columns=()) -> DecodeOutcome:
    """Bounded-distance decoding of the big code itself.

    Corrects up to floor((N-K - ell*erased)/2) symbol errors anywhere,
    plus the declared column erasures.
    """
    return _direct_core(urs, syndrome(urs.big_code, block), erased_columns, None)


# -- independent row decoding --------------------------------------------------


def _independent_core(
    vw: UrsCode,
    row_synds: list[list[int]],
    erased_cols: list[int],
    column_budget: int | None,
) -> DecodeOutcome:
    me = f"independent-l{vw.ell}"
    if column_budget is None:
        column_budget = _column_radius(vw)
    rho = len(erased_cols)
    corrections: list[dict[int, int]] = []
    for h, rc in enumerate(vw.row_codes):
        t_h = (rc.redundancy - rho) // 2
        if t_h < 0:
            raise ConfigurationError(f"row {h} cannot absorb {rho} erased columns")
        out = decode_bounded(rc, t_max=t_h, erasures=erased_cols, synd=row_synds[h])
        if out.status is DecodeStatus.UNCORRECTABLE:
            return _fail(me, f"row {h}: {out.detail}", vw.ell)
        corrections.append(out.error_vector or {})
    touched = set().union(*corrections) if corrections else set()
    if not touched:
        return _clean(me, vw.ell)
    if len(touched - set(erased_cols)) > column_budget:
        return _fail(
            me,
            f"corrections touch {len(touched - set(erased_cols))} columns, budget {column_budget}",
            vw.ell,
        )
    err: dict[int, int] = {}
    cols: set[int] = set()
    f = vw.field
    for c in sorted(touched):
        mixed = [corrections[h].get(c, 0) for h in range(vw.ell)]
        colerr = gf_mat_vec(f, vw.mix_invs[c], mixed)
        live = {p: v for p, v in zip(vw.positions[c], colerr) if v}
        if live:
            err.update(live)
            cols.add(c)
    return _corrected(me, err, cols, vw.ell)


def decode_independent(
    urs: UrsCode, block, ell: int | None = None, erased_columns=(), column_budget=None
) -> DecodeOutcome:
    """Unravel and decode every row on its own, then merge.

    Each row absorbs the erased columns as symbol erasures and corrects
    up to floor((n - k_h - erased)/2) more.  The matching-columns rule
    rejects any merged correction touching more than
    floor((N-K)/(2*ell)) non-erased columns.
    """
    vw = view(urs, ell) if ell is not None else urs
    synd = syndrome(urs.big_code, block)
    rows = rows_from_big_syndrome(vw, synd)
    erased = _map_erased(urs, vw, erased_columns)
    return _independent_core(vw, rows, erased, column_budget)


# -- collaborative (beyond-bound) decoding -------------------------------------


def _collaborative_core(
    vw: UrsCode, row_synds: list[list[int]], e_max: int | None
) -> DecodeOutcome:
    me = f"collaborative-l{vw.ell}"
    f = vw.field
    nk = vw.big_code.redundancy
    if e_max is None:
        e_max = nk // (vw.ell + 1)
    if not any(any(s) for s in row_synds):
        return _clean(me, vw.ell)
    for e in range(1, e_max + 1):
        rows = []
        rhs = []
        for h, rc in enumerate(vw.row_codes):
            s = row_synds[h]
            for m in range(e, rc.redundancy):
                rows.append([s[m - i] for i in range(1, e + 1)])
                rhs.append(s[m])
        if not rows:
            continue
        sol = gf_solve(f, rows, rhs)
        if sol is None:
            continue  # no degree-e column locator fits; widen
        tail, free = sol
        if free:
            return _fail(me, f"locator system has {free} free variables at e={e}", vw.ell)
        lam = poly_reversed([1] + tail, e)
        roots = [i for i, a in enumerate(vw.column_labels) if poly_eval(f, lam, a) == 0]
        if len(roots) != e:
            continue  # locator does not split over the column labels
        per_row = []
        for h, rc in enumerate(vw.row_codes):
            mags = error_magnitudes(rc, row_synds[h], roots)
            if mags is None:
                break
            per_row.append(mags)
        if len(per_row) != vw.ell:
            continue
        err: dict[int, int] = {}
        cols: set[int] = set()
        for c in roots:
            mixed = [per_row[h][c] for h in range(vw.ell)]
            colerr = gf_mat_vec(f, vw.mix_invs[c], mixed)
            live = {p: v for p, v in zip(vw.positions[c], colerr) if v}
            if live:
                err.update(live)
                cols.add(c)
        return _corrected(me, err, cols, vw.ell)
    return _fail(me, f"no consistent column locator up to e={e_max}", vw.ell)


def decode_collaborative(
    urs: UrsCode, block, ell: int | None = None, e_max: int | None = None
) -> DecodeOutcome:
    """Shared-locator decoding of all rows at once, beyond bound.

    Stacks every row's key equation into one affine system over the e
    locator coefficients and accepts the smallest e whose system has a
    unique solution, a locator splitting into e distinct column labels,
    and row magnitudes consistent with every syndrome symbol.  Reaches
    e <= floor((N-K)/(ell+1)) columns; ambiguity is a detected failure.
    """
    vw = view(urs, ell) if ell is not None else urs
    synd = syndrome(urs.big_code, block)
    return _collaborative_core(vw, rows_from_big_syndrome(vw, synd), e_max)


# -- fast single-column (chipkill) decoding ------------------------------------


def _fast_core(vw: UrsCode, row_synds: list[list[int]]) -> DecodeOutcome:
    me = "fast-chipkill"
    f = vw.field
    num = den = None
    d3_saw_error = False
    for h, rc in enumerate(vw.row_codes):
        if rc.redundancy != 2:
            continue
        c0, c1 = row_synds[h]
        if c0 == 0 and c1 == 0:
            continue
        if c0 == 0:
            return _fail(me, f"row {h}: parity zero but first moment set", vw.ell)
        if den is None:
            num, den = c1, c0
        elif f.mul(c1, den) != f.mul(num, c0):
            # cross-multiplication: rows must agree on c1/c0 without dividing
            return _fail(me, "distance-3 rows disagree on the error location", vw.ell)
        d3_saw_error = True
    parity_rows_hot = any(
        row_synds[h][0] for h, rc in enumerate(vw.row_codes) if rc.redundancy == 1
    )
    if not d3_saw_error:
        if parity_rows_hot:
            return _fail(me, "only distance-2 rows show errors; location unknown", vw.ell)
        return _clean(me, vw.ell)
    alpha = f.div(num, den)  # the decoder's single field inversion
    try:
        col = vw.column_labels.index(alpha)
    except ValueError:
        return _fail(me, "implied location is not a column label", vw.ell)
    mixed = [row_synds[h][0] for h in range(vw.ell)]
    colerr = gf_mat_vec(f, vw.mix_invs[col], mixed)
    err = {p: v for p, v in zip(vw.positions[col], colerr) if v}
    return _corrected(me, err, {col}, vw.ell)


def decode_fast_chipkill(urs: UrsCode, block) -> DecodeOutcome:
    """One-column correction from distance-2/3 rows with one inversion.

    Requires the code to unravel fully (every row redundancy 1 or 2, at
    least one 2).  A distance-3 row with syndrome c1*x + c0 pins the
    error column to c1/c0 with magnitude c0; distance-2 rows contribute
    their parity as the magnitude once the location is known.  Accepts
    iff all distance-3 rows agree (or are clean) and at least one of them
    located the column.
    """
    if not urs.fully_unraveled:
        raise ConfigurationError(
            "fast chipkill needs rows of distance 2 and 3 (redundancy 1 or 2)"
        )
    synd = syndrome(urs.big_code, block)
    return _fast_core(urs, rows_from_big_syndrome(urs, synd))


# -- stereotyped locators: one device plus one extra symbol ---------------------


def _plus_one_core(urs: UrsCode, synd: list[int]) -> DecodeOutcome:
    me = "plus-one"
    f = urs.field
    ell = urs.ell
    nk = urs.big_code.redundancy
    if nk < ell + 4:
        raise ConfigurationError(
            f"device+1 decoding needs N-K >= ell+4 = {ell + 4}, have {nk}"
        )
    if not urs.gmap.monic:
        raise ConfigurationError("device+1 decoding requires a monic collapsing map")
    if not any(synd):
        return _clean(me, ell)
    # Locator family (G(x) - alpha)(x - beta): coefficients are affine in
    # (alpha, beta, gamma := alpha*beta), so the key equation becomes a
    # linear system in three unknowns.
    g = poly_pad(list(urs.gmap.coeffs), ell + 1)
    e = ell + 1
    rows = []
    rhs = []
    for m in range(e, nk):
        base = m - e
        coef_beta = 0
        r = 0
        for d in range(ell + 1):
            if g[d]:
                coef_beta ^= f.mul(g[d], synd[base + d])
                r ^= f.mul(g[d], synd[base + 1 + d])
        rows.append([synd[base + 1], coef_beta, synd[base]])
        rhs.append(r)
    sol = gf_solve(f, rows, rhs)
    if sol is None:
        return _fail(me, "no device+1 locator fits the syndrome", ell)
    (alpha, beta, gamma), free = sol
    if free:
        return _fail(me, f"device+1 system has {free} free variables", ell)
    if gamma != f.mul(alpha, beta):
        return _fail(me, "nonlinear consistency gamma = alpha*beta failed", ell)
    try:
        col = urs.column_labels.index(alpha)
    except ValueError:
        return _fail(me, "device location is not a column label", ell)
    try:
        beta_pos = urs.big_code.labels.index(beta)
    except ValueError:
        return _fail(me, "extra-symbol location is not a code label", ell)
    if beta_pos in urs.positions[col]:
        return _fail(me, "extra symbol falls inside the located device", ell)
    positions = list(urs.positions[col]) + [beta_pos]
    mags = error_magnitudes(urs.big_code, synd, positions)
    if mags is None:
        return _fail(me, "magnitudes inconsistent with the syndrome", ell)
    err = {p: v for p, v in mags.items() if v}
    cols = {urs.position_column[p] for p in err}
    return _corrected(me, err, cols, ell)


def decode_stereotyped_plus_one(urs: UrsCode, block) -> DecodeOutcome:
    """Beyond-bound correction of one whole column plus one extra symbol.

    Searches locators of the stereotyped form (G(x) - alpha)(x - beta);
    needs N-K >= ell+4 syndrome symbols instead of the 2(ell+1) a generic
    locator of that degree would require.
    """
    return _plus_one_core(urs, syndrome(urs.big_code, block))


# -- cascade -------------------------------------------------------------------

_STAGE_KINDS = ("fast_chipkill", "independent", "collaborative", "direct", "plus_one")


@dataclass(frozen=True)
class Stage:
    """One cascade step: a decoder kind plus its view order and limits."""

    kind: str
    ell: int | None = None
    t_max: int | None = None
    column_budget: int | None = None

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        for name in ("ell", "t_max", "column_budget"):
            if getattr(self, name) is not None:
                out[name] = getattr(self, name)
        return out


@dataclass(frozen=True)
class DecodePolicy:
    """Ordered decoder stages; the first non-UNCORRECTABLE outcome wins."""

    stages: tuple[Stage, ...]
    metadata_bytes: int = 0

    def to_json(self) -> dict:
        return {
            "stages": [s.to_json() for s in self.stages],
            "metadata_bytes": self.metadata_bytes,
        }


def policy_to_json(policy: DecodePolicy) -> dict:
    return policy.to_json()


def policy_from_json(obj: dict) -> DecodePolicy:
    stages = tuple(
        Stage(
            s["kind"],
            s.get("ell"),
            s.get("t_max"),
            s.get("column_budget"),
        )
        for s in obj["stages"]
    )
    return DecodePolicy(stages, int(obj.get("metadata_bytes", 0)))


def default_policy(urs: UrsCode) -> DecodePolicy:
    """Fast single-column first, then independent and collaborative rows."""
    stages = []
    if urs.fully_unraveled:
        stages.append(Stage("fast_chipkill", urs.ell))
    try:
        view(urs, 2)
        pair_ell = 2
    except ConfigurationError:
        pair_ell = urs.ell
    stages.append(Stage("independent", pair_ell))
    stages.append(Stage("collaborative", pair_ell))
    return DecodePolicy(tuple(stages))


def validate_policy(urs: UrsCode, policy: DecodePolicy) -> None:
    for stage in policy.stages:
        if stage.kind not in _STAGE_KINDS:
            raise ConfigurationError(f"unknown decoder stage kind {stage.kind!r}")
        if stage.kind in ("fast_chipkill", "independent", "collaborative"):
            vw = view(urs, stage.ell) if stage.ell is not None else urs
            if stage.kind == "fast_chipkill" and not vw.fully_unraveled:
                raise ConfigurationError(
                    f"fast_chipkill stage needs a fully unraveled view, got ell={vw.ell}"
                )
        elif stage.kind == "plus_one":
            if urs.big_code.redundancy < urs.ell + 4:
                raise ConfigurationError("plus_one stage needs N-K >= ell+4")
            if not urs.gmap.monic:
                raise ConfigurationError("plus_one stage needs a monic collapsing map")


def decode_cascade(
    urs: UrsCode, block, policy: DecodePolicy | None = None, erased_columns=()
) -> DecodeOutcome:
    """Run the policy stages in order on one shared syndrome.

    The big-code syndrome is computed once and translated into each
    stage's view; stages that cannot use declared erasures (fast
    chipkill, collaborative, plus-one) are skipped when erasures are
    present.  The result records which stage fired.
    """
    if policy is None:
        policy = default_policy(urs)
    validate_policy(urs, policy)
    synd = syndrome(urs.big_code, block)
    if not any(synd):
        return DecodeOutcome(
            DecodeStatus.NO_ERROR, None, frozenset(), "cascade", urs.ell
        )
    erased = sorted(set(int(c) for c in erased_columns))
    for idx, stage in enumerate(policy.stages):
        if erased and stage.kind not in ("direct", "independent"):
            continue
        if stage.kind == "direct":
            out = _direct_core(urs, synd, erased, stage.t_max)
        elif stage.kind == "plus_one":
            out = _plus_one_core(urs, synd)
        else:
            vw = view(urs, stage.ell) if stage.ell is not None else urs
            rows = rows_from_big_syndrome(vw, synd)
            if stage.kind == "fast_chipkill":
                out = _fast_core(vw, rows)
            elif stage.kind == "independent":
                out = _independent_core(
                    vw, rows, _map_erased(urs, vw, erased), stage.column_budget
                )
            else:
                out = _collaborative_core(vw, rows, stage.t_max)
        if out.status is not DecodeStatus.UNCORRECTABLE:
            return replace(out, stage_index=idx)
    return _fail("cascade", "no stage produced a correction", urs.ell)
