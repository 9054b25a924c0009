import re

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import ChainFixture, addr
from tokenforensics.chain_store import LabelSet, ingest_dir
from tokenforensics.counterfeit import (
    CounterfeitCandidate,
    MatchClass,
    MatchStatus,
    TargetToken,
    Verdict,
    apply_filters,
    classify_match,
    confirmed_tokens,
    lexical_table,
    load_targets,
    normalize,
    scan,
)
from tokenforensics.synth import ScenarioConfig, generate

I, C, U = MatchStatus.IDENTICAL, MatchStatus.COMBO, MatchStatus.UNRELATED

USDT = TargetToken(addr("usdt"), "Tether USD", "USDT", 1)
HT = TargetToken(addr("ht"), "HuobiToken", "HT", 4)
HEDG = TargetToken(addr("hedg"), "", "HEDG", 7)


def fullwidth_oracle(s: str) -> str:
    # the full-width ASCII block is a fixed offset from basic Latin
    return "".join(chr(ord(c) - 0xFEE0) if 0xFF01 <= ord(c) <= 0xFF5E else c for c in s)


def boundary_oracle(text: str, ident: str) -> bool:
    return re.search(rf"(?<![^\W_]){re.escape(ident)}(?![^\W_])", text) is not None


# -- normalize ----------------------------------------------------------------

def test_normalize_examples():
    assert normalize("USDT ") == "usdt"
    assert normalize("Tether  USD") == "tether usd"
    assert normalize("\tTether　USD\n") == "tether usd"


def test_normalize_fullwidth_matches_offset_oracle():
    wide = "ＵＳＤＴ"
    assert fullwidth_oracle(wide) == "USDT"
    assert normalize(wide) == fullwidth_oracle(wide).lower() == "usdt"


@given(st.text(max_size=40))
def test_normalize_idempotent(s):
    assert normalize(normalize(s)) == normalize(s)


# -- classify_match -----------------------------------------------------------

def test_identity_case():
    assert classify_match("Tether USD", "USDT", USDT) == MatchClass(I, I)


@pytest.mark.parametrize("symbol", ["HT Coin", "HT_huobi", "Token HT"])
def test_short_symbol_combo_forms(symbol):
    assert classify_match("HuobiToken", symbol, HT) == MatchClass(I, C)


def test_short_symbol_needs_boundary():
    assert classify_match("Lightning", "LIGHTNING", HT) == MatchClass(U, U)
    assert boundary_oracle("xhtz", "ht") is False and "ht" in "xhtz"
    assert classify_match("", "XHTZ", HT).symbol_status is U


def test_long_identifier_plain_containment():
    assert classify_match("Tether USD Classic", "USDTX", USDT) == MatchClass(C, C)


def test_similar_but_not_contained_symbol_is_unrelated():
    assert classify_match("Hedgie", "HDG", HEDG) == MatchClass(U, U)


def test_empty_target_dimension_is_unrelated():
    assert classify_match("", "HEDG", HEDG) == MatchClass(U, I)


def test_target_requires_an_identifier():
    with pytest.raises(ValueError):
        TargetToken(addr("x"), " ", "", 1)


@given(st.text(alphabet="abcdefghtuzsd _-", max_size=12), st.text(alphabet="abcdefghtuzsd _-", max_size=8))
def test_classification_is_case_invariant(name, symbol):
    base = classify_match(name, symbol, HT)
    assert classify_match(name.upper(), symbol.swapcase(), HT) == base
    upper_target = TargetToken(HT.address, HT.name.upper(), HT.symbol.lower(), HT.cap_rank)
    assert classify_match(name, symbol, upper_target) == base


@given(st.text(alphabet="abhtz _.", max_size=10))
def test_short_combo_agrees_with_regex_oracle(symbol):
    n = normalize(symbol)
    status = classify_match("", symbol, HT).symbol_status
    if n == "ht":
        assert status is I
    else:
        assert (status is C) == boundary_oracle(n, "ht")


# -- scan ---------------------------------------------------------------------

def test_scan_excludes_targets_themselves():
    f = ChainFixture()
    f.token("usdt", "Tether USD", "USDT")
    target = TargetToken(f.records["token_metadata"][0]["address"], "Tether USD", "USDT", 1)
    assert scan(f.ledger(), [target]) == []


def test_scan_single_type1():
    f = ChainFixture()
    creator = addr("scammer")
    tok = f.token("fake", "Tether USD", "USDT", creator=creator)
    f.token("other", "Acme", "ACM")
    (c,) = scan(f.ledger(), [USDT])
    assert c.token == tok and c.match == MatchClass(I, I) and c.creator == creator


def test_scan_rejects_empty_targets():
    with pytest.raises(ValueError):
        scan(ChainFixture().ledger(), [])


def test_scan_one_candidate_per_matched_target():
    f = ChainFixture()
    tok = f.token("both", "Tether USD", "HT")
    cands = scan(f.ledger(), [HT, USDT])
    assert [(c.token, c.target.symbol) for c in cands] == [(tok, "USDT"), (tok, "HT")]


def test_scan_recovers_fifty_planted(tmp_path):
    cfg = ScenarioConfig.from_mapping(dict(
        seed=99, targets=5, creators=4,
        counterfeits={"identical/identical": 3, "combo/combo": 2, "identical/combo": 2, "combo/unrelated": 2, "unrelated/identical": 1},
    ))
    synth = generate(cfg)
    synth.write(tmp_path)
    led = ingest_dir(tmp_path)
    targets = load_targets(tmp_path / "targets.json")
    got = {(c.token, c.target.address) for c in scan(led, targets)}
    assert len(synth.truth.counterfeits) == 50
    assert got == {(c["token"], c["target"]) for c in synth.truth.counterfeits}


def test_scan_deterministic_across_threads(small_dir):
    led = ingest_dir(small_dir)
    targets = load_targets(small_dir / "targets.json")
    assert scan(led, targets, threads=1) == scan(led, targets, threads=8)


# -- filters ------------------------------------------------------------------

def cand(token, target=USDT, match=MatchClass(I, I), creator=None):
    return CounterfeitCandidate(addr(token), target, match, addr(creator) if creator else None)


def test_filter_rules():
    labels = LabelSet(
        migrated_token_allowlist=frozenset({addr("migrated")}),
        trusted_creators=frozenset({addr("team")}),
        official_token_allowlist=frozenset({addr("official")}),
    )
    cs = [
        cand("migrated", creator="team"),
        cand("test", creator="team"),
        cand("official"),
        cand("xhtz", HT, MatchClass(U, C)),
        cand("real", creator="crook"),
        cand("ht-coin-named", HT, MatchClass(C, C)),
        cand("long-symbol", USDT, MatchClass(U, C)),
    ]
    res = apply_filters(cs, labels)
    verdicts = {c.token: c.filter_verdict for c in res.all()}
    assert verdicts == {
        addr("migrated"): Verdict.FILTERED_RULE1,
        addr("test"): Verdict.FILTERED_RULE2,
        addr("official"): Verdict.FILTERED_RULE3,
        addr("xhtz"): Verdict.NEEDS_REVIEW,
        addr("real"): Verdict.CONFIRMED,
        addr("ht-coin-named"): Verdict.CONFIRMED,
        addr("long-symbol"): Verdict.CONFIRMED,
    }
    assert confirmed_tokens(res.all()) == sorted([addr("real"), addr("ht-coin-named"), addr("long-symbol")])


def test_partition_is_complete(small_synth, small_dir):
    led = ingest_dir(small_dir)
    cands = scan(led, load_targets(small_dir / "targets.json"))
    res = apply_filters(cands, led.labels)
    bins = [res.confirmed, res.filtered, res.needs_review]
    assert sum(map(len, bins)) == len(cands)
    keys = [(c.token, c.target.address) for b in bins for c in b]
    assert len(set(keys)) == len(keys)
    for c in res.confirmed:
        assert c.token not in led.labels.migrated_token_allowlist | led.labels.official_token_allowlist
        assert c.creator not in led.labels.trusted_creators
    expected = {(c["token"], c["target"]): c["expected_verdict"] for c in small_synth.truth.counterfeits}
    assert {(c.token, c.target.address): c.filter_verdict.value for c in res.all()} == expected


def test_lexical_table_counts_best_match_per_token():
    cs = [
        cand("a", match=MatchClass(I, I)),
        cand("a", HT, MatchClass(U, C)),
        cand("b", match=MatchClass(U, I)),
        cand("c", match=MatchClass(C, U)),
        cand("d", match=MatchClass(I, C)),
    ]
    t = lexical_table(cs)
    assert t["both"] == {"combo": 0, "identical": 1}
    assert t["symbol"] == {"combo": 1, "identical": 1}
    assert t["name"] == {"combo": 1, "identical": 1}
    assert t["all"] == 4
