from __future__ import annotations

import csv
import dataclasses
import io
import math

import numpy as np
import pytest

from fdpc.channels import ChannelRng, awgn_transmit, bec_transmit, random_message
from fdpc.codec import encode
from fdpc.construction import CodeSpec
from fdpc.decode_bec import decode_bec_mppl
from fdpc.decode_soft import SoftConfig, decode_soft_mppl
from fdpc.harness import (
    CSV_FIELDS,
    BecConfig,
    SimConfig,
    channel_parameter,
    prepare,
    records_to_csv,
    run_grid,
    run_point,
    run_trials,
)

SPEC256 = CodeSpec.from_seed(8, 2, 1)
SPEC_T3 = CodeSpec.from_seed(3, 2, 5)


def bec_cfg(**kw):
    base = dict(code=SPEC256, channel="bec", grid=(0.16,), decoder=BecConfig(), trials=3000, seed=4)
    base.update(kw)
    return SimConfig(**base)


def test_trivial_channels():
    rec = run_point(bec_cfg(trials=50, max_errors=0), 1.0)
    assert rec.bler == 1.0 and rec.trials == 50
    cfg = SimConfig(SPEC256, "awgn", (math.inf,), SoftConfig(), trials=50)
    assert channel_parameter(cfg, math.inf) == 0.0
    rec = run_point(cfg, math.inf)
    assert rec.block_errors == 0 and rec.bit_errors == 0


def test_validation():
    with pytest.raises(ValueError):
        bec_cfg(trials=0)
    with pytest.raises(ValueError):
        bec_cfg(grid=())
    with pytest.raises(ValueError):
        bec_cfg(grid=(1.5,))
    with pytest.raises(ValueError):
        bec_cfg(decoder=SoftConfig())
    with pytest.raises(ValueError):
        bec_cfg(channel="bsc")
    empty = CodeSpec(2, 1, (), tuple(range(15)))
    assert prepare(empty).encoder.k == 0
    with pytest.raises(ValueError):
        bec_cfg(code=empty)


def test_trials_match_direct_decoding():
    cfg = SimConfig(SPEC_T3, "bec", (0.3,), BecConfig(max_list=8), trials=300, seed=11, max_errors=0)
    p = prepare(SPEC_T3)
    res = run_trials(cfg, 0.3, 0, 300)
    for t in range(300):
        r = ChannelRng(11, t)
        c = encode(p.encoder, random_message(p.encoder.k, r))
        d = decode_bec_mppl(bec_transmit(c, 0.3, r), p.h, max_list=8)
        wrong = not d.decoded or not np.array_equal(d.codeword, c)
        assert bool(res[t, 0]) == wrong
        assert res[t, 4] == d.iterations and res[t, 5] == d.final_list

    cfg = SimConfig(SPEC_T3, "awgn", (3.0,), SoftConfig(max_stages=5), trials=100, seed=2, max_errors=0)
    res = run_trials(cfg, 3.0, 0, 100)
    sigma = channel_parameter(cfg, 3.0)
    for t in range(100):
        r = ChannelRng(2, t)
        c = encode(p.encoder, random_message(p.encoder.k, r))
        d = decode_soft_mppl(awgn_transmit(c, sigma, r), p.h, cfg.decoder)
        wrong = not d.decoded or not np.array_equal(d.codeword, c)
        assert bool(res[t, 0]) == wrong and res[t, 4] == d.iterations


def test_early_stop_lands_on_exact_trial():
    cfg = bec_cfg(trials=20000, max_errors=30, chunk=500)
    rec = run_point(cfg, 0.17)
    full = run_trials(cfg, 0.17, 0, 20000)
    stop = int(np.flatnonzero(np.cumsum(full[:, 0]) == 30)[0]) + 1
    assert rec.trials == stop and rec.block_errors == 30
    assert rec.iterations == full[:stop, 4].sum()


def test_chunking_and_workers_do_not_change_records():
    cfg = bec_cfg(grid=(0.15, 0.18), trials=6000, max_errors=40, chunk=1000)
    a = run_grid(cfg)
    b = run_grid(dataclasses.replace(cfg, chunk=333))
    c = run_grid(dataclasses.replace(cfg, workers=2, chunk=700))
    assert a == b == c
    assert records_to_csv(a).split("\n")[1].rsplit(",", 1)[0] == records_to_csv(c).split("\n")[1].rsplit(",", 1)[0]


def test_record_invariants_and_monotonicity():
    cfg = bec_cfg(grid=(0.12, 0.15, 0.18, 0.21), trials=4000, max_errors=0)
    recs = run_grid(cfg)
    for r in recs:
        assert r.bler >= r.ber
        assert r.undetected + r.not_unique <= r.block_errors <= r.trials
        assert r.avg_list >= 0 and r.avg_iters >= 0
    for lo, hi in zip(recs, recs[1:]):
        sd = math.sqrt(lo.bler * (1 - lo.bler) / lo.trials + hi.bler * (1 - hi.bler) / hi.trials)
        assert hi.bler >= lo.bler - 3 * sd


def test_relative_error_after_stop():
    rec = run_point(bec_cfg(trials=200000, max_errors=100), 0.16)
    assert rec.block_errors == 100
    assert math.sqrt((1 - rec.bler) / rec.block_errors) <= 0.1


def test_csv_format():
    recs = run_grid(bec_cfg(grid=(0.2,), trials=500))
    rows = list(csv.DictReader(io.StringIO(records_to_csv(recs))))
    assert tuple(rows[0]) == CSV_FIELDS
    assert float(rows[0]["bler"]) == recs[0].bler
    assert int(rows[0]["trials"]) == recs[0].trials


def test_describe_lists_everything():
    text = bec_cfg().describe()
    for token in ("perm_seed_1=", "k=195", "seed=4", "max_errors=200", "max_list=1024"):
        assert token in text
