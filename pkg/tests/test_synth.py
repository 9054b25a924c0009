import hashlib
import json
from decimal import Decimal
from fractions import Fraction

import pytest

from conftest import small_scenario
from tokenforensics.chain_store import ingest_dir
from tokenforensics.counterfeit import apply_filters, confirmed_tokens, load_targets, scan
from tokenforensics.graphs import replay_balances
from tokenforensics.pipeline import DataError, run_synth
from tokenforensics.scams import DetectorConfig, detect_airdrop, detect_scams
from tokenforensics.scams.airdrop import airdrop_evidences
from tokenforensics.synth import BLOCK_SECONDS, ScenarioConfig, ScenarioError, generate

WEI = 10**18


def hot_campaign(**kw):
    # 24 victims at 1,125,000 tokens per ETH, paying 3.125 ETH each (75 ETH in total)
    return ScenarioConfig.from_mapping(dict(
        seed=11, targets=["HOT"],
        airdrop=[dict(victims=24, rate="1125000", eth_per_victim="3.125", target="HOT")],
        **kw,
    ))


def ingest_synth(synth, tmp_path):
    synth.write(tmp_path)
    return ingest_dir(tmp_path), load_targets(tmp_path / "targets.json")


def test_all_zero_config_gives_empty_valid_files(tmp_path):
    synth = generate(ScenarioConfig())
    led, targets = ingest_synth(synth, tmp_path)
    assert targets == []
    assert led.counts()["transactions"] == 0 and not led.rejections
    t = synth.truth
    assert (t.counterfeits, t.airdrop, t.arbitrage, t.undetectable, t.laundering) == ([], [], [], [], {})
    assert t.expected["airdrop_eth_total_wei"] == "0" and t.expected["airdrop_tokens"] == []


def test_hot_campaign_total_and_rate(tmp_path):
    synth = generate(hot_campaign())
    (camp,) = synth.truth.airdrop
    assert int(camp["eth_total_wei"]) == 24 * int(Decimal("3.125") * WEI) == 75 * WEI
    led, _ = ingest_synth(synth, tmp_path)
    found = detect_airdrop(led, camp["token"])
    assert found.rate == 1_125_000 and len(found.evidences) == 24


def test_planted_airdrops_meet_all_conditions_exactly(small_synth, small_dir):
    led = ingest_dir(small_dir)
    for camp in small_synth.truth.airdrop:
        evs = airdrop_evidences(led, camp["token"], DetectorConfig())
        assert sorted(e.tx_hash for e in evs) == sorted(camp["txs"])
        assert all(e.eth_forward_to == camp["collector"] and e.token_distributor == camp["distributor"] for e in evs)
        assert {e.rate_tokens_per_eth for e in evs} == {Fraction(camp["rate"])}


def test_two_runs_hash_identically():
    def digests():
        return {n: hashlib.sha256(t.encode()).hexdigest() for n, t in generate(small_scenario()).all_files().items()}
    assert digests() == digests()


def test_seed_changes_output():
    a = generate(small_scenario(seed=1)).all_files()
    b = generate(small_scenario(seed=2)).all_files()
    assert a["transactions.jsonl"] != b["transactions.jsonl"]


@pytest.mark.parametrize("bad", [
    dict(airdrop=[dict(victims=3, decimals=78)]),
    dict(arbitrage=[dict(victims=3, decimals=-1)]),
    dict(arbitrage=[dict(victims=3, secondary_fraction=0.7, no_return_fraction=0.7)]),
    dict(noise_transactions=-5),
    dict(laundering_depth=2, exchanges=0),
])
def test_inconsistent_config_rejected_before_writing(tmp_path, bad):
    cfg = small_scenario(**({"overlap_victims": 0} | bad))
    with pytest.raises(ScenarioError):
        generate(cfg)
    scenario = tmp_path / "bad.json"
    scenario.write_text(json.dumps(cfg.to_json()))
    out = tmp_path / "out"
    with pytest.raises(DataError):
        run_synth(scenario, out)
    assert not out.exists()


def test_unknown_scenario_key():
    with pytest.raises(ScenarioError, match="airdrops"):
        ScenarioConfig.from_mapping({"airdrops": []})


def test_timestamps_strictly_increase(small_dir):
    blocks = ingest_dir(small_dir).blocks()
    assert all(a.number < b.number and a.timestamp < b.timestamp for a, b in zip(blocks, blocks[1:]))


def test_balances_never_negative(small_dir):
    led = ingest_dir(small_dir)
    for rec in led.tokens():
        rep = replay_balances(led, rec.address)
        assert not rep.violations
        assert sum(rep.balances.values()) == rep.minted - rep.burned


def test_arbitrage_deltas_in_range(small_synth, small_dir):
    led = ingest_dir(small_dir)
    evs = [e for c in small_synth.truth.arbitrage for e in c["evidences"]]
    assert evs
    for e in evs:
        assert 60 <= e["delta_seconds"] <= 7_000
        assert led.tx_timestamp(e["transfer_tx"]) - led.tx_timestamp(e["eth_tx"]) == e["delta_seconds"]
        assert e["delta_seconds"] % BLOCK_SECONDS == 0


def test_no_return_victims_get_nothing(small_synth, small_dir):
    led = ingest_dir(small_dir)
    assert small_synth.truth.undetectable
    for u in small_synth.truth.undetectable:
        tx = led.tx(u["eth_tx"])
        assert tx.sender == u["victim"] and tx.value_wei == int(u["eth_amount_wei"])
        assert led.transfers_to(u["victim"]) == ()


def test_noise_does_not_perturb_plants():
    quiet = generate(small_scenario(noise_transactions=0)).truth
    loud = generate(small_scenario(noise_transactions=900)).truth
    for key in ("counterfeits", "airdrop", "arbitrage", "undetectable", "laundering"):
        assert getattr(quiet, key) == getattr(loud, key), key


def test_round_trip_matches_ground_truth(small_synth, small_dir):
    led = ingest_dir(small_dir)
    targets = load_targets(small_dir / "targets.json")
    res = apply_filters(scan(led, targets), led.labels)
    truth = small_synth.truth
    assert set(confirmed_tokens(res.all())) == truth.planted_tokens("confirmed")
    official = set(led.labels.official_token_allowlist) | {t.address for t in targets}
    det = detect_scams(led, confirmed_tokens(res.all()), official)
    exp = truth.expected
    assert sorted(f.token for f in det.airdrops) == exp["airdrop_tokens"]
    assert sorted({e.token for e in det.arbitrage}) == exp["arbitrage_tokens"]
    s = det.summary
    assert str(s.airdrop.eth_total_wei) == exp["airdrop_eth_total_wei"]
    assert str(s.arbitrage.eth_total_wei) == exp["arbitrage_eth_total_wei"]
    assert (len(s.airdrop.victims), len(s.arbitrage.victims)) == (exp["airdrop_victims"], exp["arbitrage_victims"])
    assert s.victims_in_both == exp["victims_in_both"] == 2
    assert (s.secondary_victims, s.type2_victims) == (exp["secondary_victims"], exp["type2_victims"])
    flagged = {e.victim for e in det.arbitrage}
    assert not flagged & {u["victim"] for u in truth.undetectable}


def test_ground_truth_json_round_trip(small_synth):
    data = json.loads(small_synth.all_files()["ground_truth.json"])
    assert type(small_synth.truth).from_json(data) == small_synth.truth


def test_scenario_file_toml(tmp_path):
    p = tmp_path / "s.toml"
    p.write_text('seed = 5\ntargets = 2\nnoise_transactions = 10\n\n[counterfeits]\n"combo/combo" = 2\n')
    cfg = ScenarioConfig.load(p)
    assert cfg.seed == 5 and cfg.counterfeits == {"combo/combo": 2}
    assert len(generate(cfg).truth.counterfeits) == 4
