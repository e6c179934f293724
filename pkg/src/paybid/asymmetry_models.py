"""Closed forms and chain builders for auctions with asymmetric bidders.

Every model here perturbs the symmetric equilibrium along one axis: players
who underestimate how many rivals they face, coalitions that stop competing
internally, a shill who bids for free, one player with a committed exit
option, groups with different bid fees or different valuations. Each model is
expressed as a TwoGroupChain (solved by the engine exactly) and, where a
closed form exists, also as an explicit formula so the two can cross-check
each other.

Perception asymmetries follow one convention throughout: a player who believes
the world is a symmetric auction with population m best-responds with the
symmetric solution of that perceived game,

    beta = 1 - (fee / pot)^(1/(m-1)),    opening bid exponent 1/m,

where pot is the amount at stake for the bid in question. What actually
happens is then governed by the true population and the true tie lottery.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy import optimize, stats

from .core_model import AuctionSpec, beta_from_mu, max_bids, symmetric_beta
from .markov_engine import TwoGroupChain, evolve_recurrence

__all__ = [
    "GroupProfile",
    "PopulationBelief",
    "ShillPolicy",
    "CommittedPolicy",
    "ChickenPayoffs",
    "UnderestimateResult",
    "UncertainBeta",
    "ShillOutcome",
    "CommittedOutcome",
    "FullInfoEquilibrium",
    "two_group_chain",
    "underestimate_uniform",
    "underestimate_chain",
    "ascending_underestimate_revenue",
    "mixed_estimates_chain",
    "uncertain_population_beta",
    "bidfee_asymmetry_chain",
    "valuation_asymmetry_chain",
    "collusion_chain",
    "shill_chain",
    "shill_profit",
    "committed_player_profit",
    "chicken_payoffs",
    "full_info_equilibrium",
]

log = logging.getLogger(__name__)


def _first_bid_scale(beta_later: float, perceived_n: int) -> float:
    """Opening-bid probability implied by the later-bid probability.

    Both solve the same indifference condition, only the exponent changes:
    1 - beta_first = (1 - beta_later)^((m-1)/m) for perceived population m.
    """
    if beta_later <= 0.0:
        return 0.0
    if beta_later >= 1.0:
        return 1.0
    return -math.expm1(math.log1p(-beta_later) * (perceived_n - 1) / perceived_n)


# ---------------------------------------------------------------------------
# Generic perceived-symmetric-world builder


@dataclass(frozen=True)
class GroupProfile:
    """One group of players who all best-respond to the same perceived game.

    fee / value default to the true auction parameters. perceived_population
    defaults to the true population. Members believe everyone else is like
    them, so the perceived game is symmetric and their bid probability is the
    symmetric solution for the perceived population at their own fee and
    value.
    """

    size: int
    fee: Optional[float] = None
    value: Optional[float] = None
    perceived_population: Optional[int] = None

    def __post_init__(self):
        if self.size < 0:
            raise ValueError("group size must be nonnegative")
        if self.fee is not None and self.fee <= 0:
            raise ValueError("fee must be positive")
        if self.perceived_population is not None and self.perceived_population < 2:
            raise ValueError("perceived population must be at least 2")


def _resolve(profile: GroupProfile, spec: AuctionSpec) -> tuple[float, float, int]:
    fee = spec.fee if profile.fee is None else profile.fee
    value = spec.value if profile.value is None else profile.value
    perceived = spec.population if profile.perceived_population is None else profile.perceived_population
    return fee, value, perceived


def two_group_chain(spec: AuctionSpec, profile_a: GroupProfile, profile_b: GroupProfile,
                    label: str = "") -> TwoGroupChain:
    """Assemble a chain from two perceived-symmetric-world profiles.

    Bid probabilities are leader independent here; models where the lead
    changes a player's incentive (collusion, shills, fee-aware players) build
    their chains by hand instead.
    """
    if profile_a.size + profile_b.size != spec.population:
        raise ValueError("group sizes must add up to the auction population")
    price = 0.0 if spec.is_ascending else spec.price
    increment = spec.increment if spec.is_ascending else 0.0
    notes = []

    def make_beta(profile: GroupProfile):
        fee, value, perceived = _resolve(profile, spec)

        def beta(q: int, leader: Optional[str]) -> float:
            if spec.is_ascending:
                pot = value - increment * (q - 1)
            else:
                pot = value - price
            if pot <= fee:
                return 0.0
            mu_perceived = 1.0 - fee / pot
            eligible = perceived if leader is None else perceived - 1
            return beta_from_mu(mu_perceived, eligible)

        return beta, fee, value

    beta_a, fee_a, value_a = make_beta(profile_a)
    beta_b, fee_b, value_b = make_beta(profile_b)
    for name, fee, value in (("A", fee_a, value_a), ("B", fee_b, value_b)):
        pot0 = value - (0.0 if spec.is_ascending else price)
        if pot0 <= fee:
            notes.append(f"degenerate: group {name} never bids (fee covers the whole pot)")
    horizon = None
    if spec.is_ascending:
        # Bids beyond index Q+1 would stake less than the fee even for the
        # most optimistic perception, since the pot does not depend on beliefs.
        horizon = int(max_bids(spec)) + 1
    return TwoGroupChain(
        group_a_size=profile_a.size,
        group_b_size=profile_b.size,
        beta_a=beta_a,
        beta_b=beta_b,
        fee_a=fee_a,
        fee_b=fee_b,
        increment=increment,
        price=price,
        tie_rule="uniform",
        horizon=horizon,
        time_homogeneous=not spec.is_ascending,
        label=label,
        notes=tuple(notes),
    )


# ---------------------------------------------------------------------------
# Population misestimation


class UnderestimateResult(NamedTuple):
    mu: float
    expected_revenue: float


def _check_bias(spec: AuctionSpec, k: int) -> None:
    n = spec.population
    if not isinstance(k, int):
        raise TypeError("population bias k must be an integer")
    if not (1 - n < k <= n - 2):
        raise ValueError(f"population bias k must satisfy {1 - n} < k <= {n - 2}")


def underestimate_uniform(spec: AuctionSpec, k: int) -> UnderestimateResult:
    """All n players believe the population is n - k; fixed-price closed form.

    Each player uses the symmetric solution of the perceived (n-k)-player
    game, so the true continuation probability per bid is

        mu = 1 - (b / (v-p))^((n-1)/(n-k-1)),

    and the success-conditioned revenue is b / (1-mu) + p. Underestimation
    (k > 0) inflates revenue without bound as k approaches n - 2;
    overestimation (k < 0) deflates it below the item value.
    """
    if spec.is_ascending:
        raise ValueError("closed form applies to fixed-price auctions, "
                         "use ascending_underestimate_revenue for ascending ones")
    _check_bias(spec, k)
    n = spec.population
    w = spec.fee / (spec.value - spec.price)
    exponent = (n - 1) / (n - k - 1)
    mu = 1.0 - w ** exponent
    revenue = spec.fee * w ** (-exponent) + spec.price
    return UnderestimateResult(mu=mu, expected_revenue=revenue)


def underestimate_chain(spec: AuctionSpec, k: int) -> TwoGroupChain:
    """Chain form of uniform misestimation, for cross-checking the closed form.

    The population is split into two identical halves so the two-group engine
    can carry a one-group model.
    """
    _check_bias(spec, k)
    n = spec.population
    perceived = n - k
    half = n // 2
    return two_group_chain(
        spec,
        GroupProfile(size=half, perceived_population=perceived),
        GroupProfile(size=n - half, perceived_population=perceived),
        label=f"underestimate k={k}",
    )


def ascending_underestimate_revenue(spec: AuctionSpec, k: int) -> float:
    """Success-conditioned revenue of an ascending auction under uniform bias.

    With mu_j the true probability that bid j gets placed after bid j-1,

        E[R | success] = (b + s) * sum_{t=1}^{Q+1} prod_{j=2}^{t} mu_j,

    since each bid brings the fee plus one increment of the final price. The
    empty product makes the t = 1 term 1. At k = 0 the sum telescopes back
    to v exactly.
    """
    if not spec.is_ascending:
        raise ValueError("ascending auctions only")
    _check_bias(spec, k)
    n = spec.population
    exponent = (n - 1) / (n - k - 1)
    limit = int(max_bids(spec)) + 1
    total = 0.0
    running = 1.0
    for t in range(1, limit + 1):
        if t >= 2:
            pot = spec.value - spec.increment * (t - 1)
            mu = 1.0 - (spec.fee / pot) ** exponent if pot > spec.fee else 0.0
            running *= max(mu, 0.0)
            if running == 0.0:
                break
        total += running
    return (spec.fee + spec.increment) * total


def mixed_estimates_chain(spec: AuctionSpec, k: int) -> TwoGroupChain:
    """Half the players perceive n - k rivals, half perceive n + k.

    The two biases do not cancel: revenue is convex in the perceived
    population error, so the optimists dominate. No closed form is exposed;
    solve the returned chain.
    """
    n = spec.population
    if n % 2 != 0:
        raise ValueError("mixed-bias model needs an even population")
    if not isinstance(k, int):
        raise TypeError("population bias k must be an integer")
    if not (0 <= k <= n - 2):
        raise ValueError(f"population bias k must satisfy 0 <= k <= {n - 2}")
    return two_group_chain(
        spec,
        GroupProfile(size=n // 2, perceived_population=n - k),
        GroupProfile(size=n // 2, perceived_population=n + k),
        label=f"mixed bias +-{k}",
    )


# ---------------------------------------------------------------------------
# Uncertain population size


@dataclass(frozen=True)
class PopulationBelief:
    """Discrete belief over the number of players in the auction."""

    sizes: tuple
    weights: tuple

    def __post_init__(self):
        if len(self.sizes) != len(self.weights) or not self.sizes:
            raise ValueError("sizes and weights must be nonempty and of equal length")
        if len(set(self.sizes)) != len(self.sizes):
            raise ValueError("belief sizes must be distinct")
        for m in self.sizes:
            if not isinstance(m, int) or m < 1:
                raise ValueError("belief sizes must be integers >= 1")
        for z in self.weights:
            if z < 0:
                raise ValueError("belief weights must be nonnegative")
        if abs(sum(self.weights) - 1.0) > 1e-9:
            raise ValueError("belief weights must sum to 1")

    @property
    def mean(self) -> float:
        return float(sum(m * z for m, z in zip(self.sizes, self.weights)))


@dataclass(frozen=True)
class UncertainBeta:
    beta_known: float
    beta_uncertain: float
    residual: float


def uncertain_population_beta(spec: AuctionSpec, belief: PopulationBelief) -> UncertainBeta:
    """Later-bid probability when players know only a distribution over n.

    The indifference condition averages the no-rebid probability over the
    belief: sum_i z_i (1 - beta)^(i-1) = b / (v-p). Because x^(i-1) is convex
    in i, a mean-preserving spread forces beta above the known-population
    solution, so uncertainty alone raises revenue.
    """
    if spec.is_ascending:
        raise ValueError("fixed-price auctions only")
    if abs(belief.mean - spec.population) > 1e-9:
        raise ValueError(
            f"belief mean {belief.mean} must equal the true population {spec.population}")
    w = spec.fee / (spec.value - spec.price)
    z1 = sum(z for m, z in zip(belief.sizes, belief.weights) if m == 1)
    if z1 >= w:
        raise ValueError("too much belief mass on being alone, no indifference point exists")
    sizes = np.array(belief.sizes, dtype=float)
    weights = np.array(belief.weights, dtype=float)

    def residual_at(beta: float) -> float:
        return float(np.sum(weights * (1.0 - beta) ** (sizes - 1.0)) - w)

    beta2 = optimize.brentq(residual_at, 0.0, 1.0, xtol=1e-16, rtol=8.9e-16)
    beta1 = symmetric_beta(spec, 2)
    return UncertainBeta(beta_known=beta1, beta_uncertain=float(beta2),
                         residual=residual_at(float(beta2)))


# ---------------------------------------------------------------------------
# Bid-fee asymmetry


def bidfee_asymmetry_chain(spec: AuctionSpec, k: int, fee_a: float,
                           fee_b: Optional[float] = None) -> TwoGroupChain:
    """k players pay fee_a per bid, the rest pay fee_b, only the k know both.

    Group B believes everyone pays fee_b and plays that symmetric solution.
    Group A knows the split and mixes so that the indifference of whoever
    placed the last bid holds exactly; its probability therefore depends on
    which group currently leads. In equilibrium every continuation happens
    with probability 1 - fee_a/(v-p) regardless of the leader, which makes
    the expected auction length (v-p)/fee_a, independent of fee_b.
    """
    if spec.is_ascending:
        raise ValueError("fixed-price auctions only")
    n = spec.population
    if not (1 <= k <= n - 1):
        raise ValueError(f"group size k must satisfy 1 <= k <= {n - 1}")
    if fee_b is None:
        fee_b = spec.fee
    if fee_a <= 0 or fee_b <= 0:
        raise ValueError("fees must be positive")
    pot = spec.value - spec.price
    if fee_b >= pot or fee_a >= pot:
        raise ValueError("fees must stay below the amount at stake")
    ratio = fee_a / fee_b
    w = fee_b / pot
    notes = []
    if fee_a > fee_b:
        notes.append("corner equilibrium: group A pays the higher fee and its "
                     "probabilities are clamped at 0 where the formula turns negative")

    raw_a_leads = 1.0 - ratio ** (1.0 / (k - 1)) * w ** (1.0 / (n - 1)) if k >= 2 else 0.0
    raw_b_leads = 1.0 - ratio ** (1.0 / k) * w ** (1.0 / (n - 1))
    beta_a_leads = max(raw_a_leads, 0.0)
    beta_b_leads = max(raw_b_leads, 0.0)
    beta_a_first = _first_bid_scale(beta_b_leads, n)
    beta_b_later = 1.0 - w ** (1.0 / (n - 1))
    beta_b_first = _first_bid_scale(beta_b_later, n)

    def beta_a(q: int, leader: Optional[str]) -> float:
        if leader is None:
            return beta_a_first
        return beta_a_leads if leader == "A" else beta_b_leads

    def beta_b(q: int, leader: Optional[str]) -> float:
        return beta_b_first if leader is None else beta_b_later

    return TwoGroupChain(
        group_a_size=k,
        group_b_size=n - k,
        beta_a=beta_a,
        beta_b=beta_b,
        fee_a=fee_a,
        fee_b=fee_b,
        increment=0.0,
        price=spec.price,
        tie_rule="uniform",
        time_homogeneous=True,
        label=f"fee asymmetry k={k} fee_a={fee_a} fee_b={fee_b}",
        notes=tuple(notes),
    )


# ---------------------------------------------------------------------------
# Valuation asymmetry


def valuation_asymmetry_chain(spec: AuctionSpec, k: int, value_multiplier: float) -> TwoGroupChain:
    """k players value the item at multiplier * v, everyone knows it.

    Each group mixes so that members of the other group are indifferent,
    which pins both probabilities independently of the leader. A multiplier
    below b/(v-p) shrinkage point shuts the low-value group out entirely;
    that corner is clamped and flagged rather than rejected so sweeps can
    cross it.
    """
    if spec.is_ascending:
        raise ValueError("fixed-price auctions only")
    n = spec.population
    if not (1 <= k <= n - 1):
        raise ValueError(f"group size k must satisfy 1 <= k <= {n - 1}")
    if value_multiplier <= 0:
        raise ValueError("value multiplier must be positive")
    chain = two_group_chain(
        spec,
        GroupProfile(size=k, value=value_multiplier * spec.value),
        GroupProfile(size=n - k),
        label=f"valuation asymmetry k={k} multiplier={value_multiplier}",
    )
    return chain


# ---------------------------------------------------------------------------
# Collusion


_COORDINATION = ("many_bidders", "single_bidder")


def collusion_chain(spec: AuctionSpec, k: int, coordination: str = "many_bidders") -> TwoGroupChain:
    """A ring of k players stops competing against itself.

    Outsiders do not notice and play the symmetric solution. Ring members
    never outbid a fellow member. In the many_bidders variant each member
    still bids independently when an outsider leads; in the single_bidder
    variant the ring acts through one hand per round, matching the collective
    pressure mu_A = 1 - w^(k/(n-1)) of k would-be bidders.
    """
    if spec.is_ascending:
        raise ValueError("fixed-price auctions only")
    if coordination not in _COORDINATION:
        raise ValueError(f"coordination must be one of {_COORDINATION}")
    n = spec.population
    if not (2 <= k <= n - 1):
        raise ValueError(f"ring size k must satisfy 2 <= k <= {n - 1}")
    w = spec.fee / (spec.value - spec.price)
    beta_later = 1.0 - w ** (1.0 / (n - 1))
    beta_first = _first_bid_scale(beta_later, n)

    def beta_b(q: int, leader: Optional[str]) -> float:
        return beta_first if leader is None else beta_later

    if coordination == "many_bidders":
        tie_rule = "uniform"

        def beta_a(q: int, leader: Optional[str]) -> float:
            if leader is None:
                return beta_first
            return 0.0 if leader == "A" else beta_later

    else:
        tie_rule = "single_ticket"
        ticket_later = 1.0 - w ** (k / (n - 1.0))
        ticket_first = 1.0 - w ** (k / float(n))

        def beta_a(q: int, leader: Optional[str]) -> float:
            if leader is None:
                return ticket_first
            return 0.0 if leader == "A" else ticket_later

    return TwoGroupChain(
        group_a_size=k,
        group_b_size=n - k,
        beta_a=beta_a,
        beta_b=beta_b,
        fee_a=spec.fee,
        fee_b=spec.fee,
        increment=0.0,
        price=spec.price,
        tie_rule=tie_rule,
        time_homogeneous=True,
        label=f"collusion k={k} {coordination}",
    )


# ---------------------------------------------------------------------------
# Shill bidding


@dataclass(frozen=True)
class ShillPolicy:
    """House bidder: enters with probability entry_prob, then bids at every
    opportunity until it has placed bid_budget bids, then stops for good.
    identities is how many ordinary players the legitimate bidders believe
    the shill to be (2 lets it outbid itself)."""

    entry_prob: float
    bid_budget: int
    identities: int = 1

    def __post_init__(self):
        if not (0.0 <= self.entry_prob <= 1.0):
            raise ValueError("entry probability must be in [0, 1]")
        if self.bid_budget < 0:
            raise ValueError("bid budget must be nonnegative")
        if self.identities not in (1, 2):
            raise ValueError("the shill plays one or two identities")


@dataclass(frozen=True)
class ShillOutcome:
    expected_profit: float
    win_prob_shill: float
    entered_profit: float
    entered_win_prob: float
    notes: tuple = ()


def shill_chain(spec: AuctionSpec, policy: ShillPolicy) -> TwoGroupChain:
    """Chain of one entered shill (group A) against n legitimate players.

    While the shill is still spending its budget the legitimate players
    best-respond to a symmetric world of n plus however many identities the
    shill wears; once the budget is gone the extra identities stop bidding
    and the remaining game is the plain n-player one, so the perceived
    population drops back to n. The shill bids with probability one until
    its budget runs out. With one identity it never outbids itself (a
    leading group of one has no eligible member); with two identities the
    single_ticket rule lets it top its own bid.
    """
    if policy.bid_budget < 1:
        raise ValueError("a chain needs a shill that bids at least once")
    n = spec.population
    budget = policy.bid_budget
    increment = spec.increment if spec.is_ascending else 0.0
    price = 0.0 if spec.is_ascending else spec.price

    def legit_beta(q: int, leader: Optional[str]) -> float:
        pot = spec.value - (increment * (q - 1) if spec.is_ascending else price)
        if pot <= spec.fee:
            return 0.0
        mu = 1.0 - spec.fee / pot
        perceived = n + policy.identities if q <= budget else n
        eligible = perceived if leader is None else perceived - 1
        return beta_from_mu(mu, eligible)

    def shill_beta(q: int, leader: Optional[str]) -> float:
        return 1.0 if q <= budget else 0.0

    horizon = None
    if spec.is_ascending:
        horizon = int(max_bids(spec)) + 1 + budget + 2
    return TwoGroupChain(
        group_a_size=1,
        group_b_size=n,
        beta_a=shill_beta,
        beta_b=legit_beta,
        fee_a=0.0,
        fee_b=spec.fee,
        increment=increment,
        price=price,
        tie_rule="uniform" if policy.identities == 1 else "single_ticket",
        horizon=horizon,
        time_homogeneous=False,
        label=f"shill budget={budget} identities={policy.identities}",
    )


def shill_profit(spec: AuctionSpec, policy: ShillPolicy) -> ShillOutcome:
    """Auctioneer's expected extra profit from planting a shill.

    Legitimate players cannot tell the shill from real rivals and play the
    symmetric solution for the inflated population. The shill's own fees and
    any price it "pays" are house money, so profit counts legitimate fees,
    plus the final price when a legitimate player wins, minus the item handed
    over in that case; when the shill wins the house keeps the item. With a
    zero budget or zero entry probability nothing changes and the extra
    profit is exactly zero.
    """
    if policy.bid_budget == 0 or policy.entry_prob == 0.0:
        return ShillOutcome(0.0, 0.0, 0.0, 0.0, notes=("shill never bids",))
    series = evolve_recurrence(shill_chain(spec, policy))
    legit_fees = spec.fee * series.bids_by_b
    legit_wins = series.win_prob_b
    if spec.is_ascending:
        price_paid = spec.increment * float((series.steps * series.end_b).sum())
    else:
        price_paid = spec.price * legit_wins
    entered_profit = legit_fees + price_paid - spec.value * legit_wins
    entered_win = series.win_prob_a
    return ShillOutcome(
        expected_profit=policy.entry_prob * entered_profit,
        win_prob_shill=policy.entry_prob * entered_win,
        entered_profit=entered_profit,
        entered_win_prob=entered_win,
    )


# ---------------------------------------------------------------------------
# Committed player with a retail backstop


@dataclass(frozen=True)
class CommittedPolicy:
    """One player who will own the item no matter what.

    The item retails at retail_multiplier * v and fees already paid are
    credited against the retail purchase, so after losing the auction the
    player tops up to exactly the retail price. While the auction runs the
    player bids whenever winning right now would still cost less than retail:
    (own bids + 1) * b + current price + increment < retail.
    """

    retail_multiplier: float

    def __post_init__(self):
        if self.retail_multiplier <= 0:
            raise ValueError("retail multiplier must be positive")


@dataclass(frozen=True)
class CommittedOutcome:
    player_profit: float
    auctioneer_profit: float
    committed_win_prob: float
    expected_total_bids: float
    notes: tuple = ()


def committed_player_profit(spec: AuctionSpec, policy: CommittedPolicy) -> CommittedOutcome:
    """Exact dynamic program for the committed player against n-1 symmetric rivals.

    State: who leads (the committed player or a regular), total bids t, and
    the committed player's own bid count c. Regulars play the symmetric
    n-player solution throughout; the committed player bids with probability
    one whenever the stop rule allows. Losing paths cost the player exactly
    retail - v because the fee credit makes every top-up land on the retail
    price; winning paths cost strictly less, so the loss never exceeds
    (multiplier - 1) * v.

    With multiplier <= 1 the backstop already beats the auction and committed
    play is vacuous; both profits are reported as zero with a note.
    """
    alpha = policy.retail_multiplier
    v = spec.value
    b = spec.fee
    retail = alpha * v
    if alpha <= 1.0:
        return CommittedOutcome(0.0, 0.0, 0.0, 0.0,
                                notes=("backstop at or below the item value, nothing to commit to",))
    n = spec.population
    fee_c = float(spec.fee_cents)
    retail_c = alpha * spec.value_cents
    if spec.is_ascending:
        inc_c = float(spec.increment_cents)

        def price_at(t: int) -> float:
            return spec.increment * t
    else:
        inc_c = 0.0

        def price_at(t: int) -> float:
            return spec.price

    def stop_rule_allows(cs: np.ndarray, t: int) -> np.ndarray:
        # Bid q = t+1 as the (c+1)-th own bid wins at price_at(t+1); keep
        # bidding only while that outlay stays strictly below retail. Cents
        # arithmetic keeps the comparison exact.
        price_now_c = inc_c * (t + 1) if spec.is_ascending else float(spec.price_cents)
        return (cs + 1.0) * fee_c + price_now_c < retail_c

    if not stop_rule_allows(np.zeros(1), 0)[0]:
        return CommittedOutcome(0.0, 0.0, 0.0, 0.0,
                                notes=("even one bid would overshoot the retail backstop",))

    def mean_inv_one_plus(eligible: int, beta: float) -> float:
        # E[1 / (1 + J)] with J ~ Binomial(eligible, beta): the committed
        # player's chance of winning the tie lottery against J challengers.
        if eligible <= 0:
            return 1.0
        js = np.arange(eligible + 1)
        pmf = stats.binom.pmf(js, eligible, beta)
        return float(np.sum(pmf / (1.0 + js)))

    c_cap = int(math.ceil(retail_c / fee_c)) + 2
    cs = np.arange(c_cap, dtype=float)
    p_led = np.zeros(c_cap)      # committed player leads, indexed by own bids
    p_other = np.zeros(c_cap)    # a regular leads

    beta1 = symmetric_beta(spec, 1)
    share_first = mean_inv_one_plus(n - 1, beta1)
    p_led[1] = share_first
    p_other[0] = 1.0 - share_first

    player = 0.0
    auctioneer = 0.0
    win_committed = 0.0
    expected_bids = 0.0
    t = 1
    hard_cap = 10_000_000
    remaining = 1.0
    while t < hard_cap:
        try:
            beta = symmetric_beta(spec, t + 1, first_bid=False)
        except ValueError:
            beta = 0.0
        # Committed player leads with c own bids: the n-1 regulars may rebid.
        absorb_led = (1.0 - beta) ** (n - 1)
        won = p_led * absorb_led
        win_mass = float(np.sum(won))
        if win_mass > 0.0:
            player += float(np.sum(won * (v - cs * b - price_at(t))))
            auctioneer += win_mass * (b * t + price_at(t) - v)
            win_committed += win_mass
            expected_bids += t * win_mass
        flow_led_to_other = p_led * (1.0 - absorb_led)
        # A regular leads: the committed player joins the lottery only while
        # the stop rule allows, against n-2 regular challengers.
        allows = stop_rule_allows(cs, t)
        absorb_other = (1.0 - beta) ** (n - 2)
        share = mean_inv_one_plus(n - 2, beta)
        blocked = p_other * (~allows)
        lost = blocked * absorb_other
        lost_mass = float(np.sum(lost))
        if lost_mass > 0.0:
            # Fee credit tops the player up to exactly the retail price; the
            # auctioneer sells a second item at retail minus that credit.
            player += lost_mass * (v - retail)
            auctioneer += float(np.sum(lost * (b * t + price_at(t) - v + (retail - cs * b) - v)))
            expected_bids += t * lost_mass
        active = p_other * allows
        to_led = active * share
        if to_led[-1] > 0.0:
            raise ArithmeticError("committed bid count exceeded its cap")
        new_led = np.zeros(c_cap)
        new_led[1:] = to_led[:-1]
        new_other = blocked * (1.0 - absorb_other) + active * (1.0 - share) + flow_led_to_other
        p_led = new_led
        p_other = new_other
        t += 1
        remaining = float(p_led.sum() + p_other.sum())
        if remaining < 1e-15:
            break
    if remaining >= 1e-12:
        log.warning("committed-player recursion stopped with live mass %.3e", remaining)

    return CommittedOutcome(
        player_profit=player,
        auctioneer_profit=auctioneer,
        committed_win_prob=win_committed,
        expected_total_bids=expected_bids,
        notes=(),
    )


# ---------------------------------------------------------------------------
# Chicken endgame payoffs


@dataclass(frozen=True)
class ChickenPayoffs:
    """2x2 endgame between two bidders who both sank spend into the auction.

    Each can quit now (forfeiting the sunk spend) or play till the end. If
    both persist they burn alpha * v each; if one quits the survivor nets
    gamma * v. Entries are (row payoff, column payoff) with rows and columns
    ordered (quit, play)."""

    quit_quit: tuple
    quit_play: tuple
    play_quit: tuple
    play_play: tuple

    def as_array(self) -> np.ndarray:
        return np.array([
            [self.quit_quit, self.quit_play],
            [self.play_quit, self.play_play],
        ])


def chicken_payoffs(value: float, alpha: float, gamma: float, spent: float) -> ChickenPayoffs:
    """Payoff matrix of the two-player quit-or-persist endgame.

    spent is each player's sunk spend so far (a nonnegative amount, entered
    as the loss it turns into on quitting)."""
    if value <= 0:
        raise ValueError("item value must be positive")
    if spent < 0:
        raise ValueError("sunk spend cannot be negative")
    lose = -spent
    return ChickenPayoffs(
        quit_quit=(lose, lose),
        quit_play=(lose, gamma * value),
        play_quit=(gamma * value, lose),
        play_play=(-alpha * value, -alpha * value),
    )


# ---------------------------------------------------------------------------
# Full-information mixed equilibrium


@dataclass(frozen=True)
class FullInfoEquilibrium:
    betas: np.ndarray
    interior: bool
    residuals: np.ndarray
    notes: tuple = ()


def full_info_equilibrium(values: Sequence[float], fees: Sequence[float],
                          price: float = 0.0) -> FullInfoEquilibrium:
    """Stationary mixed equilibrium when all values and fees are public.

    Player i's indifference requires that nobody outbids them:

        prod_{j != i} (1 - beta_j) = b_i / (v_i - p).

    Taking eta_i = ln(1 - beta_i) and zeta_i = ln(b_i / (v_i - p)) turns this
    into the linear system sum(eta) - eta_i = zeta_i, solved by
    eta_i = sum(zeta)/(n-1) - zeta_i. A valid mixture needs eta_i <= 0; when
    some player's parameters push eta_i above 0 there is no interior
    equilibrium and the raw (out-of-range) solution is returned with the
    interior flag cleared.
    """
    values = np.asarray(values, dtype=float)
    fees = np.asarray(fees, dtype=float)
    if values.shape != fees.shape or values.ndim != 1:
        raise ValueError("values and fees must be equal-length vectors")
    n = len(values)
    if n < 3:
        raise ValueError("need at least three players, the two-player system is degenerate")
    pots = values - price
    if np.any(fees <= 0):
        raise ValueError("fees must be positive")
    if np.any(fees >= pots):
        raise ValueError("every fee must stay below the player's amount at stake")
    zeta = np.log(fees / pots)
    eta = zeta.sum() / (n - 1) - zeta
    interior = bool(np.all(eta <= 1e-12))
    betas = -np.expm1(eta)
    total = eta.sum()
    residuals = np.exp(total - eta) - fees / pots
    notes = () if interior else ("no interior equilibrium for these parameters",)
    return FullInfoEquilibrium(betas=betas, interior=interior, residuals=residuals, notes=notes)
