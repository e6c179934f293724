"""Parsing and metrics for scraped auction outcome tables and bid traces.

Two raw formats are handled. An outcomes table has one row per finished
auction with 17 tab-separated fields (ids, item text, retail / final prices
in dollars, increment and fee in cents, winner, bid counts, end time, flags).
A trace file has one probe per line, "<epoch seconds>\\t<probe>", where the
probe is a |-separated list of key=value pairs as served by the auction site;
the bh field carries up to the ten latest bids as colon-terminated tuples
joined by '#'.

All money becomes integer cents on the way in. Parsing never guesses: rows or
tuples that do not match the grammar are rejected (or skipped with a
diagnostic where the caller opts in), and derived metrics refuse inputs that
would make them silently wrong, such as bid events without timestamps.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field, replace
from decimal import Decimal, InvalidOperation
from typing import Callable, Iterable, Optional, Sequence

__all__ = [
    "AuctionOutcomeRecord",
    "BidEvent",
    "ProbeLine",
    "BidderAuctionStats",
    "AuctionMargin",
    "MarginReport",
    "Duel",
    "BidpackBuyer",
    "BidpackReport",
    "WON_AUCTION",
    "IN_THE_BLACK",
    "IN_THE_RED",
    "parse_outcome_rows",
    "parse_probe_line",
    "parse_trace_file",
    "reconstruct_bids",
    "profit_margin",
    "active_bidder_fraction",
    "bidder_stats",
    "detect_duels",
    "bidpack_cost",
    "aggression_table",
]

log = logging.getLogger(__name__)

WON_AUCTION = "won_auction"
IN_THE_BLACK = "in_the_black"
IN_THE_RED = "in_the_red"

_OUTCOME_FIELDS = 17


def _dollars_to_cents(text: str, what: str) -> int:
    try:
        d = Decimal(text)
    except InvalidOperation as exc:
        raise ValueError(f"{what}: not a dollar amount: {text!r}") from exc
    cents = d * 100
    if cents != cents.to_integral_value():
        raise ValueError(f"{what}: sub-cent dollar amount: {text!r}")
    return int(cents)


def _flag(text: str, what: str) -> bool:
    if text == "0":
        return False
    if text == "1":
        return True
    raise ValueError(f"{what}: flag must be 0 or 1, got {text!r}")


@dataclass(frozen=True)
class AuctionOutcomeRecord:
    """One finished auction from the outcomes table. Money in integer cents."""

    auction_id: int
    product_id: int
    item: str
    description: str
    retail_cents: int
    price_cents: int
    finalprice_cents: int
    bidincrement_cents: int
    bidfee_cents: int
    winner: str
    placedbids: int
    freebids: int
    endtime_str: str
    flg_click_only: bool
    flg_beginnerauction: bool
    flg_fixedprice: bool
    flg_endprice: bool


def _record_from_fields(fields: Sequence[str]) -> AuctionOutcomeRecord:
    if len(fields) != _OUTCOME_FIELDS:
        raise ValueError(f"expected {_OUTCOME_FIELDS} fields, got {len(fields)}")
    return AuctionOutcomeRecord(
        auction_id=int(fields[0]),
        product_id=int(fields[1]),
        item=fields[2],
        description=fields[3],
        retail_cents=_dollars_to_cents(fields[4], "retail"),
        price_cents=_dollars_to_cents(fields[5], "price"),
        finalprice_cents=_dollars_to_cents(fields[6], "finalprice"),
        bidincrement_cents=int(fields[7]),
        bidfee_cents=int(fields[8]),
        winner=fields[9],
        placedbids=int(fields[10]),
        freebids=int(fields[11]),
        endtime_str=fields[12],
        flg_click_only=_flag(fields[13], "flg_click_only"),
        flg_beginnerauction=_flag(fields[14], "flg_beginnerauction"),
        flg_fixedprice=_flag(fields[15], "flg_fixedprice"),
        flg_endprice=_flag(fields[16], "flg_endprice"),
    )


def parse_outcome_rows(
    lines: Iterable[str],
    delimiter: str = "\t",
    has_header: bool = False,
    diagnostics: Optional[list] = None,
) -> list:
    """Parse outcome rows; malformed rows are skipped and diagnosed.

    diagnostics, when given, receives one message per rejected row. Without
    it rejects are logged as warnings. A short row, a non-numeric amount, or
    a bad flag rejects only that row, never the whole file.
    """
    records = []
    reader = csv.reader(lines, delimiter=delimiter)
    for lineno, row in enumerate(reader, start=1):
        if has_header and lineno == 1:
            continue
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        try:
            records.append(_record_from_fields(row))
        except ValueError as exc:
            message = f"line {lineno}: {exc}"
            if diagnostics is not None:
                diagnostics.append(message)
            else:
                log.warning("skipping outcome row, %s", message)
    return records


@dataclass(frozen=True)
class BidEvent:
    """One bid as reported in a probe's bh field."""

    bidnumber: int
    username: str
    bidtype: int  # 1 = player, 2 = automated bidder
    price_cents: int
    yourbid: int
    timestamp: Optional[float] = None


def _parse_bh(raw: str) -> tuple:
    if raw == "":
        return ()
    bids = []
    pieces = raw.split("#")
    if pieces[-1] != "":
        raise ValueError("bh field does not end with its '#' terminator")
    for i, piece in enumerate(pieces[:-1]):
        parts = piece.split(":")
        if len(parts) != 6 or parts[5] != "":
            raise ValueError(f"malformed bid tuple {i} in bh field: {piece!r}")
        try:
            bids.append(BidEvent(
                bidnumber=int(parts[0]),
                username=parts[1],
                bidtype=int(parts[2]),
                price_cents=int(parts[3]),
                yourbid=int(parts[4]),
            ))
        except ValueError as exc:
            raise ValueError(f"malformed bid tuple {i} in bh field: {piece!r}") from exc
    if len(bids) > 10:
        raise ValueError(f"bh field lists {len(bids)} bids, the feed never sends more than 10")
    for a, b in zip(bids, bids[1:]):
        if b.bidnumber <= a.bidnumber:
            raise ValueError("bid numbers within one bh field must increase strictly")
    return tuple(bids)


def _render_bh(bids: Sequence[BidEvent]) -> str:
    return "".join(
        f"{b.bidnumber}:{b.username}:{b.bidtype}:{b.price_cents}:{b.yourbid}:#" for b in bids
    )


@dataclass(frozen=True)
class ProbeLine:
    """One status probe: ordered raw key=value pairs plus typed views.

    entries preserves the exact bytes and order seen on the wire, so
    serialize() round-trips. cs is the auction state (1 running, 20 ended),
    cp the current price in cents, cw the current winner, ct a countdown,
    ra an autobid flag, lui a '#'-joined integer vector; unknown keys are
    carried through untouched.
    """

    entries: tuple
    observed_at: Optional[float] = None
    ct: Optional[int] = None
    cs: Optional[int] = None
    ra: Optional[int] = None
    cw: Optional[str] = None
    cp: Optional[int] = None
    bids: tuple = ()
    lui: Optional[tuple] = None

    def serialize(self) -> str:
        return "|".join(f"{k}={v}" for k, v in self.entries)

    @classmethod
    def build(cls, ct=None, cs=None, ra=None, cw=None, cp=None,
              bids: Sequence[BidEvent] = (), lui: Optional[Sequence[int]] = None,
              observed_at: Optional[float] = None) -> "ProbeLine":
        """Assemble a probe from typed values with the canonical key order."""
        entries = []
        if ct is not None:
            entries.append(("ct", str(ct)))
        if cs is not None:
            entries.append(("cs", str(cs)))
        if ra is not None:
            entries.append(("ra", str(ra)))
        if cw is not None:
            entries.append(("cw", cw))
        if cp is not None:
            entries.append(("cp", str(cp)))
        entries.append(("bh", _render_bh(bids)))
        if lui is not None:
            entries.append(("lui", "#".join(str(x) for x in lui)))
        stamped = tuple(
            BidEvent(b.bidnumber, b.username, b.bidtype, b.price_cents, b.yourbid, observed_at)
            for b in bids
        )
        return cls(entries=tuple(entries), observed_at=observed_at, ct=ct, cs=cs,
                   ra=ra, cw=cw, cp=cp, bids=stamped,
                   lui=tuple(lui) if lui is not None else None)


def parse_probe_line(line: str, observed_at: Optional[float] = None) -> ProbeLine:
    """Parse one |-separated probe. Unknown keys pass through untouched."""
    if line == "":
        raise ValueError("empty probe line")
    entries = []
    typed: dict = {}
    for chunk in line.split("|"):
        if "=" not in chunk:
            raise ValueError(f"probe chunk without '=': {chunk!r}")
        key, value = chunk.split("=", 1)
        entries.append((key, value))
        if key in ("ct", "cs", "ra", "cp"):
            typed[key] = int(value)
        elif key == "cw":
            typed[key] = value
        elif key == "bh":
            typed["bids"] = tuple(
                replace(b, timestamp=observed_at) for b in _parse_bh(value)
            )
        elif key == "lui":
            typed["lui"] = tuple(int(x) for x in value.split("#")) if value else ()
    return ProbeLine(entries=tuple(entries), observed_at=observed_at, **typed)


def parse_trace_file(lines: Iterable[str], diagnostics: Optional[list] = None) -> list:
    """Parse '<epoch>\\t<probe>' lines into ProbeLine objects, in file order."""
    probes = []
    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\n")
        if not line.strip():
            continue
        try:
            stamp_text, _, probe_text = line.partition("\t")
            if not probe_text:
                raise ValueError("missing tab between timestamp and probe")
            stamp = float(stamp_text)
            probes.append(parse_probe_line(probe_text, observed_at=stamp))
        except ValueError as exc:
            message = f"line {lineno}: {exc}"
            if diagnostics is not None:
                diagnostics.append(message)
            else:
                log.warning("skipping trace line, %s", message)
    return probes


def reconstruct_bids(probes: Sequence[ProbeLine]):
    """Merge overlapping probes into one bid history.

    Probes must already be in observation order. A bid keeps the timestamp of
    the first probe that showed it. Returns (bids sorted by bid number,
    missing count), where missing counts the interior bid numbers no probe
    ever showed. A probe revealing a brand new bid with a number below the
    highest already seen means the feed skipped backwards; that is an error,
    not a gap.
    """
    last_stamp = None
    for p in probes:
        if p.observed_at is None:
            raise ValueError("probes must carry observation timestamps")
        if last_stamp is not None and p.observed_at < last_stamp:
            raise ValueError("probes must be sorted by observation time")
        last_stamp = p.observed_at
    seen: dict = {}
    max_seen = None
    for p in probes:
        for b in p.bids:
            if b.bidnumber in seen:
                continue
            if max_seen is not None and b.bidnumber < max_seen:
                raise ValueError(
                    f"bid {b.bidnumber} first appeared after bid {max_seen}, "
                    "the trace is inconsistent")
            seen[b.bidnumber] = b
            if max_seen is None or b.bidnumber > max_seen:
                max_seen = b.bidnumber
    if not seen:
        return [], 0
    numbers = sorted(seen)
    missing = (numbers[-1] - numbers[0] + 1) - len(numbers)
    return [seen[k] for k in numbers], missing


# ---------------------------------------------------------------------------
# Metrics on outcome tables


@dataclass(frozen=True)
class AuctionMargin:
    auction_id: int
    bids_estimate: int
    profit_cents: int
    margin: float


@dataclass(frozen=True)
class MarginReport:
    per_auction: list
    aggregate_margin: float
    included: int
    skipped_fixed_price: int
    skipped_no_sale: int
    errors: list


def profit_margin(records: Sequence[AuctionOutcomeRecord],
                  assumed_bidfee_cents: Optional[int] = 60) -> MarginReport:
    """Auctioneer profit relative to retail, per auction and in aggregate.

    The bid count is recovered from price / increment, each bid is charged
    the assumed fee (pass None to trust each row's own fee column), and the
    winner also pays the final price. Fixed-price rows and rows that never
    sold (price 0) are excluded; a zero increment on a normal auction is an
    error recorded per row. The aggregate margin is total profit over total
    retail, not a mean of per-auction margins.
    """
    per_auction = []
    errors: list = []
    skipped_fixed = 0
    skipped_no_sale = 0
    profit_total = 0
    retail_total = 0
    for r in records:
        if r.flg_fixedprice:
            skipped_fixed += 1
            continue
        if r.price_cents == 0:
            skipped_no_sale += 1
            continue
        if r.bidincrement_cents <= 0:
            errors.append(f"auction {r.auction_id}: zero bid increment on a normal auction")
            continue
        if r.retail_cents <= 0:
            errors.append(f"auction {r.auction_id}: nonpositive retail price")
            continue
        fee = r.bidfee_cents if assumed_bidfee_cents is None else assumed_bidfee_cents
        bids = round(r.price_cents / r.bidincrement_cents)
        profit = bids * fee + r.finalprice_cents - r.retail_cents
        per_auction.append(AuctionMargin(
            auction_id=r.auction_id,
            bids_estimate=bids,
            profit_cents=profit,
            margin=profit / r.retail_cents,
        ))
        profit_total += profit
        retail_total += r.retail_cents
    aggregate = profit_total / retail_total if retail_total > 0 else math.nan
    return MarginReport(
        per_auction=per_auction,
        aggregate_margin=aggregate,
        included=len(per_auction),
        skipped_fixed_price=skipped_fixed,
        skipped_no_sale=skipped_no_sale,
        errors=errors,
    )


# ---------------------------------------------------------------------------
# Metrics on reconstructed bid histories


def _require_timestamps(bids: Sequence[BidEvent]) -> None:
    if not bids:
        raise ValueError("need at least one bid")
    for b in bids:
        if b.timestamp is None:
            raise ValueError(f"bid {b.bidnumber} has no timestamp")


def active_bidder_fraction(
    bids: Sequence[BidEvent],
    auction_end: float,
    sample_interval: float = 60.0,
    window: float = 900.0,
    auction_start: Optional[float] = None,
) -> list:
    """Share of all distinct bidders seen within a sliding window.

    Sampled on a grid aligned to the auction end and walking backwards every
    sample_interval seconds until auction_start (or the first bid) is passed.
    Each sample (t, f) reports the fraction f of all distinct bidders in the
    history that bid inside (t - window, t]. Returned in chronological order,
    so the largest seconds-before-end comes first.
    """
    _require_timestamps(bids)
    if sample_interval <= 0 or window <= 0:
        raise ValueError("sample interval and window must be positive")
    stamps = [b.timestamp for b in bids]
    begin = min(stamps) if auction_start is None else auction_start
    everyone = {b.username for b in bids}
    total = len(everyone)
    samples = []
    offset = 0.0
    while auction_end - offset >= begin:
        at = auction_end - offset
        recent = {b.username for b in bids if at - window < b.timestamp <= at}
        samples.append((offset, len(recent) / total))
        offset += sample_interval
    samples.reverse()
    return samples


@dataclass(frozen=True)
class BidderAuctionStats:
    """One bidder's activity within one auction.

    Response times are measured from the immediately preceding bid by anyone;
    the auction's opening bid has no predecessor and is excluded, flagged via
    all_bids_untimed when that leaves a bidder with no timed bids at all.
    Aggression is bids per second of average response time; bidders whose
    timed bids all landed in the same instant come out infinite.
    """

    username: str
    bids: int
    timed_bids: int
    avg_response_time: Optional[float]
    aggression: float
    spend_cents: int
    outcome_classes: frozenset
    all_bids_untimed: bool


def bidder_stats(
    bids: Sequence[BidEvent],
    retail_cents: int,
    finalprice_cents: int,
    winner: str,
    assumed_bidfee_cents: int = 60,
) -> list:
    """Per-bidder counts, response times, aggression, and outcome classes.

    A bidder may belong to several classes at once: winning the auction,
    being in the black (won and fees plus final price still under retail),
    and being in the red (spent more than the value received, which covers
    every losing bidder). Bidders appear in order of their first bid.
    """
    _require_timestamps(bids)
    order = sorted(bids, key=lambda b: b.bidnumber)
    counts: dict = {}
    rt_sums: dict = {}
    rt_counts: dict = {}
    appearance: list = []
    prev_stamp = None
    for b in order:
        if b.username not in counts:
            counts[b.username] = 0
            rt_sums[b.username] = 0.0
            rt_counts[b.username] = 0
            appearance.append(b.username)
        counts[b.username] += 1
        if prev_stamp is not None:
            rt_sums[b.username] += b.timestamp - prev_stamp
            rt_counts[b.username] += 1
        prev_stamp = b.timestamp
    out = []
    for user in appearance:
        nbids = counts[user]
        timed = rt_counts[user]
        if timed == 0:
            avg: Optional[float] = None
            aggression = 0.0
        else:
            avg = rt_sums[user] / timed
            aggression = nbids / avg if avg > 0 else math.inf
        spend = nbids * assumed_bidfee_cents
        won = user == winner
        classes = set()
        if won:
            classes.add(WON_AUCTION)
            if spend + finalprice_cents < retail_cents:
                classes.add(IN_THE_BLACK)
        net_loss = spend + (finalprice_cents if won else 0) - (retail_cents if won else 0)
        if net_loss > 0:
            classes.add(IN_THE_RED)
        out.append(BidderAuctionStats(
            username=user,
            bids=nbids,
            timed_bids=timed,
            avg_response_time=avg,
            aggression=aggression,
            spend_cents=spend,
            outcome_classes=frozenset(classes),
            all_bids_untimed=timed == 0,
        ))
    return out


@dataclass(frozen=True)
class Duel:
    length: int
    participants: tuple  # (last bidder, the other one)
    start_index: int


def detect_duels(bids: Sequence[BidEvent], min_len: int = 10) -> Optional[Duel]:
    """Find a two-bidder strictly alternating suffix of the bid history.

    Walks backwards from the final bid; the suffix must alternate between
    exactly two usernames with no repeats. Returns None when the suffix is
    shorter than min_len (or when the last two bids share a bidder, which
    the strict-alternation reading rules out).
    """
    if min_len < 2:
        raise ValueError("a duel needs at least two bids")
    order = sorted(bids, key=lambda b: b.bidnumber)
    if len(order) < 2:
        return None
    last = order[-1].username
    prev = order[-2].username
    if last == prev:
        return None
    length = 2
    i = len(order) - 3
    while i >= 0 and order[i].username == order[i + 2].username:
        length += 1
        i -= 1
    if length < min_len:
        return None
    return Duel(length=length, participants=(last, prev), start_index=len(order) - length)


# ---------------------------------------------------------------------------
# Bidpack accounting


@dataclass(frozen=True)
class BidpackBuyer:
    username: str
    packs_won: int
    cost_cents: int
    value_cents: int


@dataclass(frozen=True)
class BidpackReport:
    buyers: list
    total_cost_cents: int
    total_value_cents: int
    cost_ratio: float
    traced_auctions: int


def _default_bidpack_matcher(record: AuctionOutcomeRecord) -> bool:
    return "bids-voucher" in record.item.lower() or "bids voucher" in record.description.lower()


def bidpack_cost(
    records: Sequence[AuctionOutcomeRecord],
    traces: Optional[dict] = None,
    matcher: Optional[Callable[[AuctionOutcomeRecord], bool]] = None,
    assumed_bidfee_cents: Optional[int] = 60,
) -> BidpackReport:
    """What bidpack winners actually paid for their bids, against face value.

    From outcomes alone a winner's cost is the final price plus their own
    paid bids times the fee. Passing traces (auction_id -> bid history) does
    two things: the winner's bid count comes from the trace instead of the
    placedbids column, and bids the tracked winners burned in bidpack
    auctions they LOST are added, which is the part the outcomes table cannot
    see. Value counts the retail face of packs actually won.
    """
    match = matcher if matcher is not None else _default_bidpack_matcher
    packs = [r for r in records if match(r)]
    if not packs:
        raise ValueError("no bidpack auctions in the outcome records")
    traces = traces or {}
    winners = sorted({r.winner for r in packs})
    cost: dict = {u: 0 for u in winners}
    value: dict = {u: 0 for u in winners}
    packs_won: dict = {u: 0 for u in winners}
    traced = 0
    for r in packs:
        fee = r.bidfee_cents if assumed_bidfee_cents is None else assumed_bidfee_cents
        trace = traces.get(r.auction_id)
        if trace is not None:
            traced += 1
            by_user: dict = {}
            for b in trace:
                by_user[b.username] = by_user.get(b.username, 0) + 1
            for u in winners:
                if u == r.winner:
                    continue
                lost_bids = by_user.get(u, 0)
                cost[u] += lost_bids * fee
            winner_bids = by_user.get(r.winner, 0)
        else:
            winner_bids = max(r.placedbids - r.freebids, 0)
        cost[r.winner] += r.finalprice_cents + winner_bids * fee
        value[r.winner] += r.retail_cents
        packs_won[r.winner] += 1
    buyers = [
        BidpackBuyer(username=u, packs_won=packs_won[u], cost_cents=cost[u], value_cents=value[u])
        for u in winners
    ]
    total_cost = sum(cost.values())
    total_value = sum(value.values())
    return BidpackReport(
        buyers=buyers,
        total_cost_cents=total_cost,
        total_value_cents=total_value,
        cost_ratio=total_cost / total_value if total_value else math.nan,
        traced_auctions=traced,
    )


# ---------------------------------------------------------------------------
# Aggression summary across auctions


def aggression_table(
    stats_by_auction: dict,
    records: Sequence[AuctionOutcomeRecord],
    threshold: float = 3.0,
    assumed_bidfee_cents: Optional[int] = 60,
) -> list:
    """Bucket auctions by how many aggressive bidders they attracted.

    stats_by_auction maps auction_id to the bidder_stats list of that
    auction. Buckets are 0, 1, and 2-or-more bidders at or above the
    aggression threshold; each bucket reports how many auctions it holds and
    the mean auctioneer revenue as a percentage of retail.
    """
    by_id = {r.auction_id: r for r in records}
    buckets: dict = {0: [], 1: [], 2: []}
    for auction_id, stats in stats_by_auction.items():
        record = by_id.get(auction_id)
        if record is None or record.retail_cents <= 0 or record.bidincrement_cents <= 0:
            continue
        fee = record.bidfee_cents if assumed_bidfee_cents is None else assumed_bidfee_cents
        bids = round(record.price_cents / record.bidincrement_cents)
        revenue = bids * fee + record.finalprice_cents
        hot = sum(1 for s in stats if s.aggression >= threshold)
        buckets[min(hot, 2)].append(revenue / record.retail_cents)
    out = []
    for key, label in ((0, "0"), (1, "1"), (2, ">=2")):
        vals = buckets[key]
        out.append({
            "aggressive_bidders": label,
            "auctions": len(vals),
            "mean_revenue_pct_of_retail": 100.0 * sum(vals) / len(vals) if vals else math.nan,
        })
    return out
