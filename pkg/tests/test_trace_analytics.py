"""Outcome and probe parsing plus the empirical metrics, on synthetic data."""

import math

import pytest
from hypothesis import given, settings, strategies as st

from paybid.trace_analytics import (
    IN_THE_BLACK,
    IN_THE_RED,
    WON_AUCTION,
    BidEvent,
    active_bidder_fraction,
    aggression_table,
    bidder_stats,
    bidpack_cost,
    detect_duels,
    parse_outcome_rows,
    parse_probe_line,
    parse_trace_file,
    profit_margin,
    reconstruct_bids,
)

EXAMPLE_ROW = ("259070\t10011706\t300-bids-voucher\t300 Bids Voucher\t180\t31.26"
               "\t31.26\t6\t60\tSchonmir1500\t106\t0\t13:29 PDT 12-12-2009\t1\t0\t0\t0")
EXAMPLE_PROBE = "ct=15|cs=1|ra=0|cw=Schonmir1500|cp=3126|bh=521:Schonmir1500:1:3126:0:#|lui=4#1#0#0"


def outcome_row(aid, item, desc, retail, price, final, inc, fee, winner, placed,
                free=0, click=0, fixed=0, endprice=0):
    return (f"{aid}\t1\t{item}\t{desc}\t{retail}\t{price}\t{final}\t{inc}\t{fee}"
            f"\t{winner}\t{placed}\t{free}\tts\t{click}\t0\t{fixed}\t{endprice}")


def bid(n, user, t, price=None, bidtype=1):
    return BidEvent(bidnumber=n, username=user, bidtype=bidtype,
                    price_cents=price if price is not None else 6 * n,
                    yourbid=0, timestamp=t)


# ---------------------------------------------------------------------------
# outcomes parsing


def test_example_outcome_row_field_for_field():
    rec = parse_outcome_rows([EXAMPLE_ROW])[0]
    assert rec.auction_id == 259070
    assert rec.product_id == 10011706
    assert rec.item == "300-bids-voucher"
    assert rec.description == "300 Bids Voucher"
    assert rec.retail_cents == 18000
    assert rec.price_cents == 3126
    assert rec.finalprice_cents == 3126
    assert rec.bidincrement_cents == 6
    assert rec.bidfee_cents == 60
    assert rec.winner == "Schonmir1500"
    assert rec.placedbids == 106
    assert rec.freebids == 0
    assert rec.endtime_str == "13:29 PDT 12-12-2009"
    assert rec.flg_click_only is True
    assert rec.flg_beginnerauction is False
    assert rec.flg_fixedprice is False
    assert rec.flg_endprice is False


def test_outcome_rows_empty_and_header():
    assert parse_outcome_rows([]) == []
    header = "auction_id\tproduct_id\titem\tdesc\tretail\tprice\tfinalprice\t" \
             "bidincrement\tbidfee\twinner\tplacedbids\tfreebids\tendtime_str\t" \
             "flg_click_only\tflg_beginnerauction\tflg_fixedprice\tflg_endprice"
    recs = parse_outcome_rows([header, EXAMPLE_ROW], has_header=True)
    assert len(recs) == 1


def test_outcome_rows_comma_delimiter():
    recs = parse_outcome_rows([EXAMPLE_ROW.replace("\t", ",")], delimiter=",")
    assert recs[0].auction_id == 259070


def test_malformed_rows_are_skipped_with_diagnostics():
    diagnostics = []
    bad_retail = EXAMPLE_ROW.replace("\t180\t", "\tn/a\t")
    short = "1\t2\t3"
    bad_flag = EXAMPLE_ROW.replace("\t1\t0\t0\t0", "\t2\t0\t0\t0")
    recs = parse_outcome_rows([bad_retail, short, EXAMPLE_ROW, bad_flag],
                              diagnostics=diagnostics)
    assert len(recs) == 1
    assert len(diagnostics) == 3
    # sub-cent retail amounts are data corruption, not rounding noise
    diagnostics.clear()
    subcent = EXAMPLE_ROW.replace("\t31.26\t31.26\t", "\t31.267\t31.26\t")
    assert parse_outcome_rows([subcent], diagnostics=diagnostics) == []
    assert diagnostics


# ---------------------------------------------------------------------------
# probe parsing


def test_example_probe_line_decodes():
    p = parse_probe_line(EXAMPLE_PROBE, observed_at=1260000000.0)
    assert p.ct == 15
    assert p.cs == 1
    assert p.ra == 0
    assert p.cw == "Schonmir1500"
    assert p.cp == 3126
    assert p.lui == (4, 1, 0, 0)
    assert len(p.bids) == 1
    event = p.bids[0]
    assert event.bidnumber == 521
    assert event.username == "Schonmir1500"
    assert event.bidtype == 1
    assert event.price_cents == 3126
    assert not event.yourbid
    assert event.timestamp == 1260000000.0


def test_probe_line_roundtrips_byte_exactly():
    assert parse_probe_line(EXAMPLE_PROBE).serialize() == EXAMPLE_PROBE


def test_probe_unknown_keys_survive_roundtrip():
    line = "ct=9|cs=20|ra=1|zz=opaque|cp=100|bh=|lui=1#2#3#4"
    p = parse_probe_line(line)
    assert p.cs == 20
    assert p.bids == ()
    assert p.serialize() == line


def test_probe_many_bids_share_the_probe_timestamp():
    body = "".join(f"{n}:u{n}:1:{6 * n}:0:#" for n in range(1, 11))
    p = parse_probe_line(f"ct=1|cs=1|bh={body}|lui=0#0#0#0", observed_at=77.0)
    assert len(p.bids) == 10
    assert all(b.timestamp == 77.0 for b in p.bids)
    assert [b.bidnumber for b in p.bids] == list(range(1, 11))


def test_probe_rejects_too_many_or_unordered_bids():
    body = "".join(f"{n}:u:1:{6 * n}:0:#" for n in range(1, 12))
    with pytest.raises(ValueError):
        parse_probe_line(f"ct=1|bh={body}|lui=0#0#0#0")
    with pytest.raises(ValueError):
        parse_probe_line("ct=1|bh=5:a:1:30:0:#4:b:1:24:0:#|lui=0#0#0#0")


def test_probe_malformed_tuple_names_the_index():
    with pytest.raises(ValueError) as err:
        parse_probe_line("ct=1|bh=5:a:1:30:0:#7:b:oops:42:0:#|lui=0#0#0#0")
    assert "tuple 1" in str(err.value)


def test_trace_file_lines_carry_observed_at():
    lines = [
        "1260000000\tct=15|cs=1|ra=0|cw=a|cp=6|bh=1:a:1:6:0:#|lui=0#0#0#0",
        "1260000010\tct=12|cs=1|ra=0|cw=b|cp=12|bh=2:b:1:12:0:#|lui=0#0#0#0",
    ]
    probes = parse_trace_file(lines)
    assert [p.observed_at for p in probes] == [1260000000.0, 1260000010.0]


# ---------------------------------------------------------------------------
# bid stream reconstruction


def test_reconstruct_deduplicates_and_keeps_first_sighting():
    def probe(nums, t):
        body = "".join(f"{n}:u{n}:1:{6 * n}:0:#" for n in nums)
        return parse_probe_line(f"ct=1|cs=1|bh={body}|lui=0#0#0#0", observed_at=t)

    bids, missing = reconstruct_bids([probe([1, 2, 3], 10.0), probe([2, 3, 4, 5], 20.0)])
    assert [b.bidnumber for b in bids] == [1, 2, 3, 4, 5]
    assert missing == 0
    assert [b.timestamp for b in bids] == [10.0, 10.0, 10.0, 20.0, 20.0]

    bids, missing = reconstruct_bids([probe([10], 10.0), probe([25], 20.0)])
    assert missing == 14

    with pytest.raises(ValueError):
        reconstruct_bids([probe([5, 6], 10.0), probe([3], 20.0)])


# ---------------------------------------------------------------------------
# profit margins


def test_example_row_margin():
    report = profit_margin(parse_outcome_rows([EXAMPLE_ROW]))
    entry = report.per_auction[0]
    assert entry.bids_estimate == 521
    assert entry.profit_cents == 16386
    assert entry.margin == pytest.approx(0.9103333333333333, abs=1e-12)
    assert report.aggregate_margin == pytest.approx(0.9103333333333333, abs=1e-12)


def test_margin_exclusions_and_aggregate():
    rows = [
        outcome_row(4, "tv", "TV", 100, 0, 0, 6, 60, "", 0),              # never sold
        outcome_row(5, "tv", "TV", 100, 20, 29.99, 0, 60, "x", 3, fixed=1),
        outcome_row(6, "tv", "TV", 100, 12, 12, 6, 60, "y", 9),
        outcome_row(7, "tv", "TV", 100, 6, 6, 6, 60, "z", 9),
    ]
    report = profit_margin(parse_outcome_rows(rows))
    assert report.skipped_no_sale == 1
    assert report.skipped_fixed_price == 1
    assert report.included == 2
    by_id = {e.auction_id: e for e in report.per_auction}
    assert by_id[6].bids_estimate == 200
    assert by_id[6].profit_cents == 200 * 60 + 1200 - 10000
    # aggregate is total profit over total retail, not a mean of ratios
    total_profit = sum(e.profit_cents for e in report.per_auction)
    assert report.aggregate_margin == pytest.approx(total_profit / 20000.0, abs=1e-12)


def test_margin_without_fee_assumption():
    report = profit_margin(parse_outcome_rows([EXAMPLE_ROW]), assumed_bidfee_cents=0)
    assert report.per_auction[0].profit_cents == 3126 - 18000


def test_margin_zero_increment_on_ascending_record_is_an_error():
    rows = [outcome_row(8, "tv", "TV", 100, 12, 12, 0, 60, "y", 9)]
    report = profit_margin(parse_outcome_rows(rows))
    assert report.included == 0
    assert report.errors


# ---------------------------------------------------------------------------
# activity over time


def test_active_fraction_all_bids_at_the_end():
    late = [bid(i + 1, f"u{i % 4}", 3540.0 + i) for i in range(10)]
    series = active_bidder_fraction(late, auction_end=3600.0, sample_interval=600,
                                    window=900, auction_start=0.0)
    assert series[-1] == (0.0, 1.0)
    assert all(frac == 0.0 for _, frac in series[:-1])
    assert len(series) == 7


def test_active_fraction_uniform_arrivals():
    # ten distinct bidders, one bid every 6 minutes; a 15 minute window can
    # hold at most three of them, so no sample should pass 0.3
    uniform = [bid(i + 1, f"u{i}", 360.0 * i) for i in range(10)]
    series = active_bidder_fraction(uniform, auction_end=3600.0, sample_interval=600,
                                    window=900, auction_start=0.0)
    assert series == [(3600.0, 0.1), (3000.0, 0.2), (2400.0, 0.3), (1800.0, 0.3),
                      (1200.0, 0.2), (600.0, 0.3), (0.0, 0.2)]


def test_active_fraction_requires_bids():
    with pytest.raises(ValueError):
        active_bidder_fraction([], auction_end=100.0)


# ---------------------------------------------------------------------------
# per-bidder statistics


def test_aggression_interleaved_fixture():
    bids = [bid(i + 1, "u1" if i % 2 == 0 else "u2", 2.0 * i) for i in range(20)]
    stats = {s.username: s for s in bidder_stats(bids, 30000, 720, "u2")}
    # u1 opened the auction, so one of its ten bids has no response time;
    # both bidders still average exactly 2 seconds per timed bid
    assert stats["u1"].timed_bids == 9
    assert stats["u2"].timed_bids == 10
    for s in stats.values():
        assert s.bids == 10
        assert s.avg_response_time == pytest.approx(2.0, abs=1e-12)
        assert s.aggression == pytest.approx(5.0, abs=1e-12)


def test_aggression_scales_with_rate():
    # same bid count, half the spacing, twice the aggression
    fast = [bid(i + 1, "u1" if i % 2 == 0 else "u2", 1.0 * i) for i in range(20)]
    stats = {s.username: s for s in bidder_stats(fast, 30000, 720, "u2")}
    assert stats["u2"].aggression == pytest.approx(10.0, abs=1e-12)


def test_opening_only_bidder_has_no_aggression():
    bids = [bid(1, "opener", 0.0)] + [bid(i + 2, "x" if i % 2 else "y", 2.0 + i)
                                      for i in range(4)]
    stats = {s.username: s for s in bidder_stats(bids, 30000, 36, "x")}
    opener = stats["opener"]
    assert opener.all_bids_untimed
    assert opener.avg_response_time is None
    assert opener.aggression == 0.0


def test_outcome_classes():
    bids = [bid(i + 1, "winner" if i % 2 else "loser", 1.0 * i) for i in range(10)]
    stats = {s.username: s for s in bidder_stats(bids, retail_cents=10000,
                                                 finalprice_cents=60,
                                                 winner="winner")}
    w, l = stats["winner"], stats["loser"]
    assert WON_AUCTION in w.outcome_classes
    assert IN_THE_BLACK in w.outcome_classes      # 5 bids at 60c plus 60c final
    assert IN_THE_RED not in w.outcome_classes
    assert IN_THE_RED in l.outcome_classes
    assert WON_AUCTION not in l.outcome_classes

    # an expensive win lands in the red even while winning
    pricey = {s.username: s for s in bidder_stats(bids, retail_cents=200,
                                                  finalprice_cents=60,
                                                  winner="winner")}
    assert IN_THE_RED in pricey["winner"].outcome_classes
    assert WON_AUCTION in pricey["winner"].outcome_classes


def test_bidder_stats_require_timestamps():
    with pytest.raises(ValueError):
        bidder_stats([BidEvent(1, "u", 1, 6, 0, timestamp=None)], 100, 6, "u")


# ---------------------------------------------------------------------------
# duels


def test_duel_detected_in_terminal_alternation():
    mixed = [bid(i + 1, ["a", "b", "c"][i % 3], float(i)) for i in range(8)]
    tail = [bid(9 + i, "x" if i % 2 == 0 else "y", 8.0 + i) for i in range(12)]
    duel = detect_duels(mixed + tail, min_len=10)
    assert duel is not None
    assert duel.length == 12
    assert set(duel.participants) == {"x", "y"}
    assert duel.start_index == 8


def test_duel_requires_minimum_length():
    mixed = [bid(i + 1, ["a", "b", "c"][i % 3], float(i)) for i in range(9)]
    tail = [bid(10 + i, "x" if i % 2 == 0 else "y", 9.0 + i) for i in range(6)]
    assert detect_duels(mixed + tail, min_len=10) is None
    assert detect_duels(mixed + tail, min_len=6).length == 6


def test_duel_broken_by_repeat_bidder():
    # x bidding twice in a row breaks strict alternation
    tail = [bid(i + 1, "x" if i % 2 == 0 else "y", float(i)) for i in range(12)]
    tail[5] = bid(6, "x", 5.0)
    assert detect_duels(tail, min_len=10) is None


def test_whole_auction_duel():
    tail = [bid(i + 1, "x" if i % 2 == 0 else "y", float(i)) for i in range(14)]
    duel = detect_duels(tail, min_len=10)
    assert duel.length == 14
    assert duel.start_index == 0


# ---------------------------------------------------------------------------
# bid pack economics


def test_bidpack_cost_from_outcomes_only():
    rows = [
        outcome_row(1, "300-bids-voucher", "300 Bids Voucher", 180, 31.26, 31.26, 6, 60,
                    "alice", 100, free=10),
        outcome_row(2, "camera-x", "Nice Camera", 300, 50, 50, 6, 60, "bob", 40),
        outcome_row(3, "50-bids-pack", "50 Bids Voucher", 30, 6, 6, 6, 60, "alice", 5),
    ]
    report = bidpack_cost(parse_outcome_rows(rows))
    assert len(report.buyers) == 1
    buyer = report.buyers[0]
    assert buyer.username == "alice"
    assert buyer.packs_won == 2
    # paid bids only: 3126 + 90 * 60 and 600 + 5 * 60
    assert buyer.cost_cents == 3126 + 90 * 60 + 600 + 5 * 60
    assert buyer.value_cents == 21000
    assert report.cost_ratio == pytest.approx(buyer.cost_cents / 21000.0, abs=1e-12)


def test_bidpack_custom_matcher():
    rows = [outcome_row(2, "camera-x", "Nice Camera", 300, 50, 50, 6, 60, "bob", 40)]
    report = bidpack_cost(parse_outcome_rows(rows),
                          matcher=lambda rec: "camera" in rec.item)
    assert report.buyers[0].username == "bob"


def test_bidpack_traces_add_losing_bids():
    rows = [
        outcome_row(1, "300-bids-voucher", "300 Bids Voucher", 180, 31.26, 31.26, 6, 60,
                    "alice", 100, free=10),
        outcome_row(2, "100-bids-voucher", "100 Bids Voucher", 60, 0.18, 0.18, 6, 60,
                    "carol", 3),
    ]
    records = parse_outcome_rows(rows)
    # alice lost auction 2 after 2 bids there; auction 2's winner placed 1
    traces = {2: [bid(1, "alice", 1.0), bid(2, "alice", 2.0), bid(3, "carol", 3.0)]}
    report = bidpack_cost(records, traces=traces)
    buyers = {b.username: b for b in report.buyers}
    assert report.traced_auctions == 1
    assert buyers["alice"].cost_cents == 3126 + 90 * 60 + 2 * 60
    # carol's trace shows 1 paid bid for her win
    assert buyers["carol"].cost_cents == 18 + 1 * 60


# ---------------------------------------------------------------------------
# aggression table


def test_aggression_table_buckets():
    hot = [bid(i + 1, "hot" if i % 2 == 0 else "cold", 1.0 * i) for i in range(12)]
    calm = [bid(i + 1, "slow" if i % 2 == 0 else "slower", 40.0 * i) for i in range(12)]
    lone = [bid(1, "single", 0.0)] + [bid(2 + i, "fast", 1.0 + i) for i in range(4)] \
        + [bid(6, "single", 30.0)]
    rows = [
        outcome_row(1, "tv", "TV", 300, 0.72, 0.72, 6, 60, "hot", 6),
        outcome_row(2, "tv", "TV", 300, 0.72, 0.72, 6, 60, "slow", 6),
        outcome_row(3, "tv", "TV", 300, 0.24, 0.24, 6, 60, "fast", 4),
    ]
    records = parse_outcome_rows(rows)
    stats = {
        1: bidder_stats(hot, 30000, 72, "hot"),
        2: bidder_stats(calm, 30000, 72, "slow"),
        3: bidder_stats(lone, 30000, 24, "fast"),
    }
    table = {entry["aggressive_bidders"]: entry
             for entry in aggression_table(stats, records, threshold=3.0)}
    assert table[">=2"]["auctions"] == 1
    assert table["0"]["auctions"] == 1
    assert table["1"]["auctions"] == 1
    # revenue percentage: (estimated fees + final price) / retail, in percent
    assert table[">=2"]["mean_revenue_pct_of_retail"] == pytest.approx(
        (12 * 60 + 72) / 30000 * 100, abs=1e-9)
    assert table["1"]["mean_revenue_pct_of_retail"] == pytest.approx(
        (4 * 60 + 24) / 30000 * 100, abs=1e-9)


# ---------------------------------------------------------------------------
# property tests


@settings(max_examples=60, deadline=None)
@given(nums=st.lists(st.integers(min_value=1, max_value=3000), min_size=1,
                     max_size=60, unique=True))
def test_missing_count_arithmetic(nums):
    nums = sorted(nums)
    chunks = [nums[i:i + 10] for i in range(0, len(nums), 10)]
    probes = []
    for i, chunk in enumerate(chunks):
        body = "".join(f"{n}:u:1:{6 * n}:0:#" for n in chunk)
        probes.append(parse_probe_line(f"ct=1|cs=1|bh={body}|lui=0#0#0#0",
                                       observed_at=float(i)))
    bids, missing = reconstruct_bids(probes)
    assert len(bids) == len(nums)
    assert missing == (nums[-1] - nums[0] + 1) - len(nums)


@settings(max_examples=60, deadline=None)
@given(count=st.integers(min_value=2, max_value=40),
       gap=st.floats(min_value=0.25, max_value=60.0))
def test_aggression_formula_on_even_spacing(count, gap):
    bids = [bid(i + 1, "solo", gap * i) for i in range(count)]
    others = [bid(count + 1, "other", gap * count)]
    stats = {s.username: s for s in bidder_stats(bids + others, 10**6, 6, "other")}
    solo = stats["solo"]
    # opener excluded: count - 1 timed bids, each gap seconds after the last
    assert solo.avg_response_time == pytest.approx(gap, rel=1e-9)
    assert solo.aggression == pytest.approx(count / gap, rel=1e-9)
