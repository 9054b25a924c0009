from decimal import Decimal
from fractions import Fraction

from helpers import ChainFixture, addr, txh
from tokenforensics.scams import (
    AirdropEvidence,
    AirdropFinding,
    ArbitrageEvidence,
    aggregate,
    classify_victim_history,
    detect_arbitrage,
    eth_to_usd,
    wei_to_eth,
)

ETH = 10**18
RATE = Decimal("233.64")


def eth(x: str) -> int:
    return int(Decimal(x) * ETH)


def airdrop_finding(token, amounts_wei, collector, distributor):
    evs = tuple(
        AirdropEvidence(txh(f"{token}/{i}"), addr(f"{token}/victim{i}"), w, w, Fraction(1), collector, distributor)
        for i, w in enumerate(amounts_wei)
    )
    return AirdropFinding(token, Fraction(1), evs)


def arb(victim, eth_tx, wei, receiver, transfer, token, dist):
    return ArbitrageEvidence(victim, txh(eth_tx), wei, receiver, (txh(transfer), 0), token, dist, 60)


# -- money ------------------------------------------------------------------

def test_airdrop_row_conversion():
    # 970.8 ETH split unevenly over ten findings
    parts = ["120.5", "99.9", "0.4", "250", "100", "100", "100", "100", "50", "50"]
    assert sum(Decimal(p) for p in parts) == Decimal("970.8")
    findings = [airdrop_finding(addr(f"tok{i}"), [eth(p)], addr("c"), addr("c")) for i, p in enumerate(parts)]
    s = aggregate(findings, [], None, RATE)
    assert wei_to_eth(s.airdrop.eth_total_wei) == Decimal("970.8")
    assert abs(s.airdrop.usd_total - Decimal("226817.71")) <= Decimal("0.50")
    assert s.airdrop.usd_total == Decimal("226817.71")


def test_sum_row_conversion():
    usd = eth_to_usd(Decimal("73300.9"), RATE)
    assert abs(usd - Decimal("17126022.30")) <= Decimal("1.00")


def test_half_up_to_cents():
    assert eth_to_usd(Decimal("0.005"), Decimal("1")) == Decimal("0.01")
    assert eth_to_usd(Decimal("0.004999"), Decimal("1")) == Decimal("0.00")


def test_empty_summary_is_zero():
    s = aggregate([], [], None, RATE)
    j = s.to_json()
    assert j["total"]["eth_total_wei"] == "0" and j["total"]["usd_total"] == "0.00"
    assert j["airdrop"]["scam_addresses"]["sum"] == 0 and j["arbitrage"]["victims"] == 0


# -- roles --------------------------------------------------------------------

def test_shared_receiver_and_distributor_counted_once_in_union():
    shared = addr("shared")
    creators = {addr("tokA"): addr("creatorA"), addr("tokB"): addr("creatorA")}
    findings = [
        airdrop_finding(addr("tokA"), [ETH, ETH], shared, shared),
        airdrop_finding(addr("tokB"), [ETH], addr("other"), shared),
    ]
    s = aggregate(findings, [], None, RATE, creators)
    roles = {k: set(v) for k, v in s.airdrop.roles.items()}
    # oracle: plain set arithmetic over the inputs
    expect = {
        "token_contract": {addr("tokA"), addr("tokB")},
        "token_creator": {addr("creatorA")},
        "eth_received": {shared, addr("other")},
        "token_distributor": {shared},
    }
    assert roles == expect
    union = set().union(*expect.values())
    j = s.to_json()["airdrop"]
    assert j["scam_addresses"] == {"token_contract": 2, "token_creator": 1, "eth_received": 2, "token_distributor": 1, "sum": len(union)}
    assert j["roles_per_address"] == round(6 / len(union), 4)


def test_arbitrage_payment_counted_once():
    tok, s, d = addr("tok"), addr("S"), addr("D")
    evs = [
        arb(addr("v"), "pay", 2 * ETH, s, "ret1", tok, d),
        arb(addr("v"), "pay", 2 * ETH, s, "ret2", tok, d),
        arb(addr("w"), "pay2", ETH, s, "ret3", tok, d),
    ]
    summ = aggregate([], evs, None, RATE)
    assert summ.arbitrage.eth_total_wei == 3 * ETH
    assert summ.arbitrage.transactions == 3
    assert len(summ.arbitrage.victims) == 2


def test_victims_in_both_types():
    tok = addr("tok")
    f = airdrop_finding(tok, [ETH, ETH], addr("c"), addr("c"))
    shared_victim = f.evidences[0].victim
    evs = [arb(shared_victim, "p", ETH, addr("S"), "r", addr("tok2"), addr("D"))]
    assert aggregate([f], evs, None, RATE).victims_in_both == 1


# -- victim history -------------------------------------------------------------

def history_ledger():
    f = ChainFixture()
    dist, scam = addr("D"), addr("S")
    official = f.token("usdt", "Tether USD", "USDT", supply=10**30, holder=dist)
    fake = f.token("fake", "Tether USD", "USDT", supply=10**30, holder=dist)
    return f, official, fake, dist, scam


def test_repeat_victim_counted():
    f, official, fake, dist, scam = history_ledger()
    many, once = addr("many"), addr("once")
    for i in range(19):
        f.tx(10_000 * (i + 1), many, scam, ETH)
        h = f.tx(10_000 * (i + 1) + 100, dist, fake)
        f.transfer(h, fake, dist, many, ETH)
    f.tx(500_000, once, scam, ETH)
    h = f.tx(500_100, dist, fake)
    f.transfer(h, fake, dist, once, ETH)
    led = f.ledger()
    stats = classify_victim_history(led, detect_arbitrage(led, fake), {official})
    assert stats.per_victim[many].scam_sends == 19 and stats.per_victim[many].secondary
    assert not stats.per_victim[once].secondary
    assert stats.secondary_victims == [many]


def test_type2_victim_bait_then_bigger_payment():
    f, official, fake, dist, scam = history_ledger()
    v = addr("victim")
    f.tx(1_000, v, scam, ETH)
    bait = f.tx(1_200, dist, official)
    f.transfer(bait, official, dist, v, 10 * ETH)
    f.tx(4_600, v, scam, eth("115.18"))
    ret = f.tx(5_000, dist, fake)
    f.transfer(ret, fake, dist, v, ETH)
    led = f.ledger()
    evs = detect_arbitrage(led, fake)
    stats = classify_victim_history(led, evs, {official})
    h = stats.per_victim[v]
    assert h.type2 and h.sent_again and h.repeat_greater and h.first_bait_time == 1_200
    assert stats.type2_sent_again_fraction == 1.0 and stats.type2_repeat_greater_fraction == 1.0


def test_official_token_from_stranger_is_not_bait():
    f, official, fake, dist, scam = history_ledger()
    v, stranger = addr("victim"), addr("stranger")
    f.tx(1_000, v, scam, ETH)
    h = f.tx(900, dist, official)
    f.transfer(h, official, dist, stranger, ETH)
    gift = f.tx(1_100, stranger, official)
    f.transfer(gift, official, stranger, v, ETH)
    ret = f.tx(1_500, dist, fake)
    f.transfer(ret, fake, dist, v, ETH)
    led = f.ledger()
    stats = classify_victim_history(led, detect_arbitrage(led, fake), {official})
    assert not stats.per_victim[v].type2
