"""Reliability analytics and fault-injection campaigns.

Closed-form failure and miscorrection quantities are computed as exact
rationals so the toy-code tests can demand equality with brute-force
enumeration, not closeness.  Campaigns are deterministic given (seed,
config): shard seeds derive from SHA-256, and aggregation is
order-independent.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .gf import ConfigurationError
from .grs import (
    DecodeStatus,
    GrsCode,
    encode_systematic,
    enumerate_codewords,
)
from .urs import UrsCode, urs_to_json, view
from .decoders import DecodePolicy, decode_cascade, default_policy

__all__ = [
    "bb_failure_rate",
    "bb_miscorrection_bound",
    "failure_weight",
    "collaborative_radius",
    "power_radius",
    "dense_miscorrection_rate",
    "analyze_urs",
    "wilson_interval",
    "FaultModel",
    "inject_fault",
    "SimReport",
    "run_campaign",
    "OracleDecode",
    "nearest_codeword_oracle",
]


# -- closed forms ---------------------------------------------------------------


def bb_failure_rate(q: int, N: int, K: int, ell: int) -> Fraction:
    """Failure probability of fast chipkill on one uniformly corrupted column.

    The mixed column error must vanish in the N-K-ell distance-3 rows but
    not everywhere: (q^-(N-K-ell) - q^-ell) / (1 - q^-ell).
    """
    if not N - K > ell > 0:
        raise ConfigurationError("need N-K > ell > 0")
    return Fraction(q ** (2 * ell - (N - K)) - 1, q**ell - 1)


def bb_miscorrection_bound(q: int, N: int, K: int, ell: int) -> Fraction:
    """Upper bound (N/ell) * q^-(N-K-ell) on miscorrecting a multi-column error."""
    if not N - K > ell > 0:
        raise ConfigurationError("need N-K > ell > 0")
    return Fraction(N // ell, q ** (N - K - ell))


def failure_weight(N: int, K: int, ell: int) -> int:
    """Minimum corrupted symbols in one column before fast chipkill can fail."""
    return N - K - ell + 1


def collaborative_radius(N: int, K: int, ell: int) -> int:
    """Columns decodable by the stacked-key-equation solver: floor((N-K)/(ell+1))."""
    return (N - K) // (ell + 1)


def power_radius(n: int, k: int, ell: int) -> int:
    """Power-decoding column radius floor(n(1 - (k/n)^(ell/(ell+1)))); analytics only."""
    return math.floor(n * (1.0 - (k / n) ** (ell / (ell + 1))))


def _ball_columns(n_cols: int, col_q: int, t: int) -> int:
    """Nonzero patterns touching at most t columns of width log_q(col_q)."""
    return sum(math.comb(n_cols, e) * (col_q - 1) ** e for e in range(1, t + 1))


def _due_patterns_confined(code: UrsCode, bb_ell: int, view_ell: int, t: int) -> int:
    """Exact count, over all devices, of fast-chipkill DUE patterns whose
    support fits in at most t view columns.

    DUE patterns are the single-column errors whose mixed vector is zero
    in every distance-3 row; they are enumerable because only the
    distance-2 coordinates are free.
    """
    bb = view(code, bb_ell)
    vw = view(code, view_ell)
    f = code.field
    d2 = [h for h, rc in enumerate(bb.row_codes) if rc.redundancy == 1]
    if not d2 or t <= 0:
        return 0
    total = 0
    for i in range(bb.n):
        free_cols = np.array(
            [[bb.mix_invs[i][r][h] for h in d2] for r in range(bb.ell)], dtype=np.int16
        )
        pats = np.zeros((1, bb.ell), dtype=np.int16)
        for j in range(len(d2)):
            scaled = np.stack(
                [
                    np.array([f.mul(u, int(c)) for c in free_cols[:, j]], dtype=np.int16)
                    for u in range(f.q)
                ]
            )
            pats = (pats[:, None, :] ^ scaled[None, :, :]).reshape(-1, bb.ell)
        vcols = np.array([vw.position_column[p] for p in bb.positions[i]])
        for pat in pats:
            support = {int(c) for c, v in zip(vcols, pat) if v}
            if 0 < len(support) <= t:
                total += 1
    return total


def dense_miscorrection_rate(
    q: int,
    N: int,
    K: int,
    column: tuple[int, int] | None = None,
    symbol_t: int | None = None,
    bbck_ell: int | None = None,
    code: UrsCode | None = None,
) -> tuple[Fraction, dict]:
    """Fraction of the q^(N-K) syndromes the configured decoder set accepts.

    This is the McEliece-Swanson-style dense-error miscorrection rate: a
    uniformly random block is (mis)corrected exactly when its syndrome is
    in the decodable set.  `column=(ell_view, t_col)` counts independent
    column decoding under the matching-columns budget; `symbol_t` counts
    direct symbol decoding; `bbck_ell` adds the fully-unraveled fast
    chipkill decoder, whose accepted set excludes its own detected
    failures.  Overlap between the within-bound set and the chipkill set
    is removed by inclusion-exclusion on column support; the count of
    chipkill-DUE patterns confined to the within-bound budget needs the
    concrete `code` and is otherwise taken as 0 (it is 0 for every toy
    shape used in the tests, and below 1e-25 relative for the DDR5
    shapes).

    Returns (rate, breakdown) with all the integer terms.
    """
    if column is not None and symbol_t is not None:
        raise ConfigurationError("configure either column or symbol decoding, not both")
    nk = N - K
    space = q**nk
    terms: dict = {"space": space, "zero_syndrome": 1}
    total = 1  # the zero syndrome decodes as NO_ERROR
    within = 0
    if column is not None:
        lv, t = column
        if N % lv or lv < 1:
            raise ConfigurationError("view width must divide N")
        if 2 * t * lv > nk:
            raise ConfigurationError("column budget exceeds unique-decoding bound")
        within = _ball_columns(N // lv, q**lv, t)
        terms["column"] = {"ell": lv, "t": t, "patterns": within}
    elif symbol_t is not None:
        if 2 * symbol_t > nk:
            raise ConfigurationError("symbol radius exceeds unique-decoding bound")
        within = _ball_columns(N, q, symbol_t)
        terms["symbol"] = {"t": symbol_t, "patterns": within}
    total += within
    if bbck_ell is not None:
        lb = bbck_ell
        if N % lb or not lb < nk <= 2 * lb:
            raise ConfigurationError("chipkill view needs ell < N-K <= 2*ell")
        abb = 2 * lb - nk
        accepted = (N // lb) * (q**lb - q**abb)
        terms["bbck"] = {
            "ell": lb,
            "accepted": accepted,
            "due_per_column": q**abb - 1,
        }
        total += accepted
        overlap = 0
        if within:
            if column is not None:
                lv, t = column
                if lb % lv:
                    raise ConfigurationError("chipkill width must be a multiple of the view width")
                confined = (N // lb) * _ball_columns(lb // lv, q**lv, t)
            else:
                lv, t = 1, symbol_t
                confined = (N // lb) * _ball_columns(lb, q, symbol_t)
            due_confined = (
                _due_patterns_confined(code, lb, lv, t) if code is not None else 0
            )
            overlap = confined - due_confined
            terms["overlap"] = {
                "confined": confined,
                "due_confined": due_confined,
                "exact": code is not None or abb == 0 or t == 0,
            }
        total -= overlap
    terms["decodable"] = total
    return Fraction(total, space), terms


def analyze_urs(urs: UrsCode) -> dict:
    """The analytic table for one code shape: DUE, weight, radii, SDC."""
    q = urs.field.q
    N, K, ell = urs.N, urs.K, urs.ell
    nk = N - K
    bb_enabled = nk > ell  # otherwise a device never exceeds the half-distance bound
    due = bb_failure_rate(q, N, K, ell) if bb_enabled else Fraction(0)
    weight = failure_weight(N, K, ell)
    radii = {}
    for le in (2, 4, 8):
        try:
            view(urs, le)
        except ConfigurationError:
            continue
        radii[le] = collaborative_radius(N, K, le)
    budget2 = nk // 4  # matching-columns budget for the ell=2 view
    sdc, breakdown = dense_miscorrection_rate(
        q,
        N,
        K,
        column=(2, budget2),
        bbck_ell=ell if bb_enabled else None,
        code=urs,
    )
    out = {
        "field_bits": urs.field.bits,
        "shape": [N, K],
        "ell": ell,
        "row_dims": list(urs.row_dims),
        "chipkill_due": float(due),
        "chipkill_due_exact": f"{due.numerator}/{due.denominator}",
        "weight": weight if (bb_enabled and weight <= ell) else None,
        "dq_correct": budget2,
        "collaborative_radius": {str(le): r for le, r in radii.items()},
        "power_radius_l2": power_radius(N // 2, K // 2, 2),
        "random_sdc": float(sdc),
        "random_sdc_exact": f"{sdc.numerator}/{sdc.denominator}",
        "bb_miscorrection_bound": float(bb_miscorrection_bound(q, N, K, ell))
        if bb_enabled
        else 0.0,
        "sdc_breakdown": {
            k: v for k, v in breakdown.items() if k not in ("space",)
        },
    }
    return out


# -- intervals -------------------------------------------------------------------

_Z95 = 1.959963984540054


def wilson_interval(successes: int, trials: int, z: float = _Z95) -> tuple[float, float]:
    """Wilson score interval; sane in the small-count regimes campaigns hit."""
    if trials == 0:
        return (0.0, 1.0)
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = p + z * z / (2 * trials)
    margin = z * math.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials))
    return ((center - margin) / denom, (center + margin) / denom)


# -- fault models ----------------------------------------------------------------


@dataclass(frozen=True)
class FaultModel:
    """What to inject per trial.  The injected error is never zero.

    kinds: random_symbols (e=errors), single_column, multi_column
    (c=columns, each uniformly nonzero over the column), column_plus_one,
    dq_burst (bursts aligned groups of `width` symbols), and
    erased_column_plus_errors (the erased column is also reported to the
    decoder).
    """

    kind: str
    seed: int = 0
    errors: int = 1
    columns: int = 1
    width: int = 2
    bursts: int = 1

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "seed": self.seed,
            "errors": self.errors,
            "columns": self.columns,
            "width": self.width,
            "bursts": self.bursts,
        }

    @staticmethod
    def from_json(obj: dict) -> "FaultModel":
        return FaultModel(
            obj["kind"],
            int(obj.get("seed", 0)),
            int(obj.get("errors", 1)),
            int(obj.get("columns", 1)),
            int(obj.get("width", 2)),
            int(obj.get("bursts", 1)),
        )


def _nonzero_vector(rng: random.Random, q: int, width: int) -> list[int]:
    while True:
        vec = [rng.randrange(q) for _ in range(width)]
        if any(vec):
            return vec


def inject_fault(
    urs: UrsCode, model: FaultModel, rng: random.Random
) -> tuple[dict[int, int], tuple[int, ...]]:
    """Draw one error vector (and erased columns, if any) from the model."""
    q = urs.field.q
    N = urs.N
    err: dict[int, int] = {}
    erased: tuple[int, ...] = ()
    if model.kind == "random_symbols":
        for p in rng.sample(range(N), model.errors):
            err[p] = rng.randrange(1, q)
    elif model.kind == "single_column":
        col = rng.randrange(urs.n)
        vec = _nonzero_vector(rng, q, urs.ell)
        err = {p: v for p, v in zip(urs.positions[col], vec) if v}
    elif model.kind == "multi_column":
        for col in rng.sample(range(urs.n), model.columns):
            vec = _nonzero_vector(rng, q, urs.ell)
            err.update({p: v for p, v in zip(urs.positions[col], vec) if v})
    elif model.kind == "column_plus_one":
        col = rng.randrange(urs.n)
        vec = _nonzero_vector(rng, q, urs.ell)
        err = {p: v for p, v in zip(urs.positions[col], vec) if v}
        outside = [p for p in range(N) if p not in urs.positions[col]]
        err[rng.choice(outside)] = rng.randrange(1, q)
    elif model.kind == "dq_burst":
        if N % model.width:
            raise ConfigurationError("burst width must divide N")
        for g in rng.sample(range(N // model.width), model.bursts):
            vec = _nonzero_vector(rng, q, model.width)
            for j, v in enumerate(vec):
                if v:
                    err[g * model.width + j] = v
    elif model.kind == "erased_column_plus_errors":
        col = rng.randrange(urs.n)
        erased = (col,)
        vec = _nonzero_vector(rng, q, urs.ell)
        err = {p: v for p, v in zip(urs.positions[col], vec) if v}
        outside = [p for p in range(N) if p not in urs.positions[col]]
        for p in rng.sample(outside, model.errors):
            err[p] = rng.randrange(1, q)
    else:
        raise ConfigurationError(f"unknown fault model kind {model.kind!r}")
    return err, erased


# -- campaigns --------------------------------------------------------------------


@dataclass(frozen=True)
class SimReport:
    config_hash: str
    seed: int
    shards: int
    trials: int
    no_error: int
    corrected_exact: int
    due: int
    sdc: int
    stage_counts: dict[str, int]

    def rates(self) -> dict:
        out = {}
        for name in ("corrected_exact", "due", "sdc"):
            count = getattr(self, name)
            lo, hi = wilson_interval(count, self.trials)
            out[name] = {"rate": count / self.trials, "ci95": [lo, hi]}
        return out

    def to_json(self) -> dict:
        return {
            "config_hash": self.config_hash,
            "seed": self.seed,
            "shards": self.shards,
            "trials": self.trials,
            "counts": {
                "no_error": self.no_error,
                "corrected_exact": self.corrected_exact,
                "due": self.due,
                "sdc": self.sdc,
            },
            "rates": self.rates(),
            "stage_counts": dict(sorted(self.stage_counts.items())),
        }

    @staticmethod
    def csv_header() -> str:
        return (
            "config_hash,seed,shards,trials,no_error,corrected_exact,due,sdc,"
            "corrected_rate,corrected_lo,corrected_hi,"
            "due_rate,due_lo,due_hi,sdc_rate,sdc_lo,sdc_hi"
        )

    def csv_row(self) -> str:
        r = self.rates()
        cells = [
            self.config_hash,
            str(self.seed),
            str(self.shards),
            str(self.trials),
            str(self.no_error),
            str(self.corrected_exact),
            str(self.due),
            str(self.sdc),
        ]
        for name in ("corrected_exact", "due", "sdc"):
            cells.append(repr(r[name]["rate"]))
            cells.append(repr(r[name]["ci95"][0]))
            cells.append(repr(r[name]["ci95"][1]))
        return ",".join(cells)


def _shard_seed(seed: int, shard: int) -> int:
    # Fixed published derivation: first 8 bytes of
    # SHA-256("urscode-campaign:<seed>:<shard>"), big-endian.
    digest = hashlib.sha256(f"urscode-campaign:{seed}:{shard}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _config_hash(urs: UrsCode, policy: DecodePolicy, model: FaultModel, trials, shards, base):
    blob = json.dumps(
        {
            "code": urs_to_json(urs),
            "policy": policy.to_json(),
            "model": model.to_json(),
            "trials": trials,
            "shards": shards,
            "base": base,
        },
        sort_keys=True,
    )
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def run_campaign(
    urs: UrsCode,
    policy: DecodePolicy | None,
    model: FaultModel,
    trials: int,
    shards: int = 1,
    base: str = "zero",
) -> SimReport:
    """Inject, decode, classify against ground truth; deterministic by seed.

    base="zero" injects onto the zero codeword (every decoder here is
    linear, so outcomes are distribution-identical to random data);
    base="random" encodes fresh random data per trial.  Classification:
    CORRECTED-and-equal -> corrected_exact, CORRECTED-and-unequal -> sdc,
    UNCORRECTABLE -> due; NO_ERROR means the injected error was itself a
    codeword difference and is tallied separately (it is not a decoder
    assertion, so it never counts as sdc).
    """
    if trials < 1:
        raise ConfigurationError("trials must be >= 1")
    if policy is None:
        policy = default_policy(urs)
    counts = {"no_error": 0, "corrected_exact": 0, "due": 0, "sdc": 0}
    stage_counts: dict[str, int] = {}
    done = 0
    for shard in range(shards):
        share = trials // shards + (1 if shard < trials % shards else 0)
        rng = random.Random(_shard_seed(model.seed, shard))
        for _ in range(share):
            err, erased = inject_fault(urs, model, rng)
            if base == "random":
                word = encode_systematic(
                    urs.big_code, [rng.randrange(urs.field.q) for _ in range(urs.K)]
                )
            else:
                word = [0] * urs.N
            block = list(word)
            for p, v in err.items():
                block[p] ^= v
            out = decode_cascade(urs, block, policy, erased)
            if out.status is DecodeStatus.NO_ERROR:
                counts["no_error"] += 1
            elif out.status is DecodeStatus.UNCORRECTABLE:
                counts["due"] += 1
            elif out.error_vector == err:
                counts["corrected_exact"] += 1
                stage_counts[out.decoder_id] = stage_counts.get(out.decoder_id, 0) + 1
            else:
                counts["sdc"] += 1
                stage_counts[out.decoder_id] = stage_counts.get(out.decoder_id, 0) + 1
        done += share
    assert done == trials
    return SimReport(
        _config_hash(urs, policy, model, trials, shards, base),
        model.seed,
        shards,
        trials,
        counts["no_error"],
        counts["corrected_exact"],
        counts["due"],
        counts["sdc"],
        stage_counts,
    )


# -- ground-truth oracle ------------------------------------------------------------


@dataclass(frozen=True)
class OracleDecode:
    distance: int
    ties: int
    codeword: tuple[int, ...]

    @property
    def unique(self) -> bool:
        return self.ties == 1


def nearest_codeword_oracle(code: GrsCode, block) -> OracleDecode:
    """Exhaustive minimum-distance decoding over all q^k codewords.

    Ground truth for tiny codes: certifies the algebraic decoders within
    bound and counts ambiguous beyond-bound blocks (ties).
    """
    if code.field.q**code.k > 1 << 20:
        raise ConfigurationError("oracle limited to q^k <= 2^20")
    words = enumerate_codewords(code)
    blk = np.asarray(block, dtype=np.int16)
    dists = np.count_nonzero(words ^ blk[None, :], axis=1)
    best = int(dists.min())
    ties = int(np.count_nonzero(dists == best))
    idx = int(dists.argmin())
    return OracleDecode(best, ties, tuple(int(x) for x in words[idx]))
