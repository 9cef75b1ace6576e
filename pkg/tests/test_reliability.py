import json
import random
from fractions import Fraction
from itertools import product

import pytest

from urscode.gf import ConfigurationError, field
from urscode.grs import (
    DecodeStatus,
    coset_representative,
    decode_bounded,
    make_grs,
    syndrome,
    syndrome_of_sparse,
)
from urscode.urs import construct_urs, subspace_poly, view
from urscode.decoders import DecodePolicy, Stage, decode_cascade, default_policy
from urscode.reliability import (
    FaultModel,
    OracleDecode,
    analyze_urs,
    bb_failure_rate,
    bb_miscorrection_bound,
    collaborative_radius,
    dense_miscorrection_rate,
    failure_weight,
    inject_fault,
    nearest_codeword_oracle,
    power_radius,
    run_campaign,
    wilson_interval,
)


# -- closed forms vs the published constants ---------------------------------------


def test_bb_failure_rate_ddr5_constants():
    assert abs(float(bb_failure_rate(256, 80, 65, 8)) - 1.39e-17) / 1.39e-17 < 0.01
    assert abs(float(bb_failure_rate(256, 80, 66, 8)) - 3.55e-15) / 3.55e-15 < 0.01
    assert bb_failure_rate(256, 80, 64, 8) == 0  # within-bound chipkill never fails
    with pytest.raises(ConfigurationError):
        bb_failure_rate(256, 80, 72, 8)  # N-K = ell


def test_bb_failure_rate_toy_exact_fraction():
    assert bb_failure_rate(16, 8, 5, 2) == Fraction(1, 17)


def test_bb_failure_rate_equals_exhaustive_enumeration(toy85):
    from urscode.decoders import decode_fast_chipkill

    fails = total = 0
    for col in range(4):
        for v in product(range(16), repeat=2):
            if not any(v):
                continue
            total += 1
            err = {p: x for p, x in zip(toy85.positions[col], v) if x}
            blk = [0] * 8
            for p, x in err.items():
                blk[p] = x
            out = decode_fast_chipkill(toy85, blk)
            if out.status is DecodeStatus.UNCORRECTABLE:
                fails += 1
            else:
                assert out.error_vector == err
    assert Fraction(fails, total) == bb_failure_rate(16, 8, 5, 2)


def test_bb_miscorrection_bound_values():
    assert bb_miscorrection_bound(256, 80, 65, 8) == Fraction(10, 256**7)
    assert float(bb_miscorrection_bound(256, 80, 65, 8)) == pytest.approx(10 * 2**-56)
    # four metadata bytes: N-K-ell drops to 4
    assert float(bb_miscorrection_bound(256, 80, 68, 8)) == pytest.approx(10 * 2**-32)


def test_bb_miscorrection_bound_monte_carlo(toy85):
    # multi-column errors against the fast decoder stay under (N/ell) q^-(N-K-ell)
    pol = DecodePolicy((Stage("fast_chipkill", 2),))
    rep = run_campaign(
        toy85, pol, FaultModel("multi_column", seed=123, columns=2), 200_000
    )
    bound = float(bb_miscorrection_bound(16, 8, 5, 2))
    assert rep.sdc / rep.trials <= bound
    _, hi = wilson_interval(rep.sdc, rep.trials)
    assert hi <= bound


def test_failure_weight_values_and_exhaustive(toy85):
    assert failure_weight(80, 65, 8) == 8
    assert failure_weight(80, 66, 8) == 7
    # no single-column error touching <= N-K-ell symbols ever fails
    from urscode.decoders import decode_fast_chipkill

    w_max = 8 - 5 - 2  # = 1
    for col in range(4):
        for j in range(2):
            for v in range(1, 16):
                blk = [0] * 8
                blk[toy85.positions[col][j]] = v
                out = decode_fast_chipkill(toy85, blk)
                assert out.status is DecodeStatus.CORRECTED
    assert failure_weight(8, 5, 2) == w_max + 1


def test_radii():
    assert collaborative_radius(80, 65, 2) == 5
    assert collaborative_radius(80, 65, 4) == 3
    assert collaborative_radius(80, 65, 8) == 1
    assert power_radius(40, 32, 2) >= (80 - 65) // 3  # dominates the simple bound
    assert power_radius(10, 8, 2) >= 1


# -- dense miscorrection ------------------------------------------------------------


def _accepted_syndromes(urs, policy):
    count = 0
    nk = urs.big_code.redundancy
    q = urs.field.q
    for idx in range(q**nk):
        s = []
        x = idx
        for _ in range(nk):
            s.append(x % q)
            x //= q
        blk = coset_representative(urs.big_code, s)
        out = decode_cascade(urs, blk, policy)
        count += out.status is not DecodeStatus.UNCORRECTABLE
    return count


def test_dense_rate_toy_bbck_only_exact(toy85):
    rate, terms = dense_miscorrection_rate(16, 8, 5, bbck_ell=2, code=toy85)
    accepted = _accepted_syndromes(toy85, DecodePolicy((Stage("fast_chipkill", 2),)))
    assert terms["decodable"] == accepted == 1 + 4 * 240
    assert rate == Fraction(accepted, 16**3)


def test_dense_rate_toy_column_plus_bbck_exact(toy84):
    rate, terms = dense_miscorrection_rate(
        16, 8, 4, column=(2, 1), bbck_ell=2, code=toy84
    )
    policy = DecodePolicy(
        (Stage("fast_chipkill", 2), Stage("independent", 2, column_budget=1))
    )
    accepted = _accepted_syndromes(toy84, policy)
    assert terms["decodable"] == accepted == 1 + 4 * 255
    assert rate == Fraction(accepted, 16**4)
    assert terms["overlap"]["exact"]


def test_dense_rate_symbol_kind_exact():
    f8 = field(3)
    code = make_grs(f8, 6, 3)
    rate, terms = dense_miscorrection_rate(8, 6, 3, symbol_t=1)
    accepted = 0
    for idx in range(8**3):
        s = [(idx >> (3 * m)) & 7 for m in range(3)]
        out = decode_bounded(code, coset_representative(code, s), t_max=1)
        accepted += out.status is not DecodeStatus.UNCORRECTABLE
    assert terms["decodable"] == accepted == 1 + 6 * 7
    assert rate == Fraction(accepted, 8**3)


def test_dense_rate_ddr5_table_values(meta8, meta16):
    r0, _ = dense_miscorrection_rate(256, 80, 64, column=(2, 4))
    r8, _ = dense_miscorrection_rate(256, 80, 65, column=(2, 3), bbck_ell=8, code=meta8)
    r16, t16 = dense_miscorrection_rate(
        256, 80, 66, column=(2, 3), bbck_ell=8, code=meta16
    )
    floor, _ = dense_miscorrection_rate(256, 80, 66, bbck_ell=8)
    assert abs(float(r0) - 4.95e-15) / 4.95e-15 < 0.01
    assert abs(float(r8) - 1.41e-16) / 1.41e-16 < 0.01
    assert abs(float(r16) - 3.61e-14) / 3.61e-14 < 0.03
    assert abs(float(floor) - 3.55e-14) / 3.55e-14 < 0.03
    assert t16["overlap"]["exact"]


def test_dense_rate_guards():
    with pytest.raises(ConfigurationError):
        dense_miscorrection_rate(16, 8, 5, column=(2, 1), symbol_t=1)
    with pytest.raises(ConfigurationError):
        dense_miscorrection_rate(16, 8, 4, column=(2, 2))  # 2*2*2 > 4
    with pytest.raises(ConfigurationError):
        dense_miscorrection_rate(16, 8, 5, bbck_ell=1)  # N-K > 2*ell


def test_ambiguous_single_column_count_matches_alias_formula(toy85):
    # q^(2*ell + K - N) - 1 ambiguous single-column errors per device,
    # and the same syndromes alias every other device
    per_device = {}
    syn_map = {}
    for col in range(4):
        for v in product(range(16), repeat=2):
            if not any(v):
                continue
            err = {p: x for p, x in zip(toy85.positions[col], v) if x}
            syn_map.setdefault(
                tuple(syndrome_of_sparse(toy85.big_code, err)), set()
            ).add(col)
    for s, cols in syn_map.items():
        if len(cols) > 1:
            for c in cols:
                per_device.setdefault(c, set()).add(s)
    expect = 16 ** (2 * 2 + 5 - 8) - 1  # = 15
    for col in range(4):
        assert len(per_device[col]) == expect
    shared = set.intersection(*per_device.values())
    assert len(shared) == expect  # the very same errors alias every device


def test_analyze_fields(meta0, meta8):
    a = analyze_urs(meta8)
    assert a["shape"] == [80, 65] and a["weight"] == 8 and a["dq_correct"] == 3
    assert a["collaborative_radius"] == {"2": 5, "4": 3, "8": 1}
    a0 = analyze_urs(meta0)
    assert a0["chipkill_due"] == 0.0 and a0["weight"] is None and a0["dq_correct"] == 4


# -- intervals ------------------------------------------------------------------------


def test_wilson_interval_basics():
    lo, hi = wilson_interval(0, 100)
    assert lo == pytest.approx(0.0, abs=1e-12) and 0.03 < hi < 0.05
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi
    assert wilson_interval(0, 0) == (0.0, 1.0)
    lo, hi = wilson_interval(100, 100)
    assert hi == pytest.approx(1.0) and lo > 0.95


def test_wilson_coverage_over_repeated_campaigns(toy85):
    # analytic DUE rate 1/17; at least 93% of deterministic repeated
    # campaigns must cover it with their Wilson 95% interval
    pol = DecodePolicy((Stage("fast_chipkill", 2),))
    cover = 0
    for seed in range(40):
        rep = run_campaign(toy85, pol, FaultModel("single_column", seed=seed), 1500)
        lo, hi = wilson_interval(rep.due, rep.trials)
        cover += lo <= 1 / 17 <= hi
    assert cover / 40 >= 0.93


# -- fault models and campaigns --------------------------------------------------------


def test_inject_fault_shapes(meta8):
    rng = random.Random(0)
    for kind, kwargs, check in [
        ("random_symbols", {"errors": 3}, lambda e, er: len(e) == 3),
        ("single_column", {}, lambda e, er: len({meta8.position_column[p] for p in e}) == 1),
        ("multi_column", {"columns": 4}, lambda e, er: len({meta8.position_column[p] for p in e}) <= 4),
        ("column_plus_one", {}, lambda e, er: len({meta8.position_column[p] for p in e}) == 2),
        ("dq_burst", {"width": 2, "bursts": 3}, lambda e, er: len({p // 2 for p in e}) <= 3),
        ("erased_column_plus_errors", {"errors": 2}, lambda e, er: len(er) == 1),
    ]:
        model = FaultModel(kind, **kwargs)
        for _ in range(50):
            err, erased = inject_fault(meta8, model, rng)
            assert err and all(v for v in err.values())
            assert check(err, erased)
    with pytest.raises(ConfigurationError):
        inject_fault(meta8, FaultModel("nope"), rng)


def test_campaign_within_bound_is_perfect(meta8):
    rep = run_campaign(
        meta8, None, FaultModel("random_symbols", seed=5, errors=1), 300
    )
    assert rep.corrected_exact == rep.trials
    assert rep.no_error + rep.corrected_exact + rep.due + rep.sdc == rep.trials


def test_campaign_single_column_meta8(meta8):
    rep = run_campaign(meta8, None, FaultModel("single_column", seed=6), 1000)
    assert rep.corrected_exact == 1000  # failure rate 1.38e-17
    assert rep.stage_counts.get("fast-chipkill") == 1000


def test_campaign_deterministic_and_sharded(toy85):
    model = FaultModel("multi_column", seed=99, columns=2)
    a = run_campaign(toy85, None, model, 4000, shards=4)
    b = run_campaign(toy85, None, model, 4000, shards=4)
    assert a == b
    assert json.dumps(a.to_json(), sort_keys=True) == json.dumps(
        b.to_json(), sort_keys=True
    )
    assert a.csv_row() == b.csv_row()
    assert a.config_hash != run_campaign(toy85, None, model, 4001).config_hash


def test_campaign_random_base_matches_zero_base_statistically(toy85):
    # the random-data base draws extra rng values, so only the rates agree
    model = FaultModel("single_column", seed=3)
    z = run_campaign(toy85, None, model, 3000, base="zero")
    r = run_campaign(toy85, None, model, 3000, base="random")
    for rep in (z, r):
        lo, hi = wilson_interval(rep.due, rep.trials)
        assert lo <= 1 / 17 <= hi
        assert rep.sdc == 0
    assert r == run_campaign(toy85, None, model, 3000, base="random")


def test_campaign_erasure_model(meta16):
    # erased device plus one stray symbol: the post-erasure one-DQ budget
    rep = run_campaign(
        meta16,
        None,
        FaultModel("erased_column_plus_errors", seed=8, errors=1),
        200,
    )
    assert rep.corrected_exact == 200


def test_sdc_honesty(toy85):
    # sdc is only counted for asserted corrections, never for DUE
    pol = DecodePolicy((Stage("fast_chipkill", 2),))
    rep = run_campaign(toy85, pol, FaultModel("multi_column", seed=1, columns=2), 5000)
    assert rep.no_error + rep.corrected_exact + rep.due + rep.sdc == rep.trials
    assert rep.sdc > 0 and rep.due > 0
    assert sum(rep.stage_counts.values()) == rep.corrected_exact + rep.sdc


# -- nearest-codeword oracle -------------------------------------------------------------


def test_oracle_agrees_with_decoder_sampled(f16):
    code = make_grs(f16, 8, 4)
    rng = random.Random(7)
    from urscode.grs import encode_systematic

    for _ in range(200):
        w = encode_systematic(code, [rng.randrange(16) for _ in range(4)])
        blk = list(w)
        for p in rng.sample(range(8), 2):
            blk[p] ^= rng.randrange(1, 16)
        ora = nearest_codeword_oracle(code, blk)
        assert ora.unique and list(ora.codeword) == w
        out = decode_bounded(code, blk)
        fixed = list(blk)
        for p, v in (out.error_vector or {}).items():
            fixed[p] ^= v
        assert fixed == w


def test_oracle_tie_means_decoder_detects(f16):
    code = make_grs(f16, 8, 4)
    rng = random.Random(8)
    found = 0
    for _ in range(500):
        blk = [0] * 8
        for p in rng.sample(range(8), 3):
            blk[p] = rng.randrange(1, 16)
        ora = nearest_codeword_oracle(code, blk)
        if ora.ties > 1:
            found += 1
            assert decode_bounded(code, blk).status is DecodeStatus.UNCORRECTABLE
    assert found > 0


def test_oracle_size_guard(f256):
    with pytest.raises(ConfigurationError):
        nearest_codeword_oracle(make_grs(f256, 10, 4), [0] * 10)
