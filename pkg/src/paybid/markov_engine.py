"""Absorbing Markov chain over two bidder groups.

Asymmetric auctions in this package reduce to two groups, A and B, whose
members share a bid probability within the group. The chain state is which
group holds the lead; W_A and W_B are the absorbing "auction over" states. One
transition is one bid: every eligible player (non-leaders only, the current
leader sits out) flips its coin, and if at least one wants to bid a uniformly
random one among them gets the bid in. If nobody bids the current leader wins.

The opening bid is handled outside the chain: there is no leader yet, so the
eligible counts and exponents differ. first_bid_distribution gives the state
the chain starts from, conditioned on the auction succeeding.

Two tie rules are supported. "uniform" is the lottery described above.
"single_ticket" lets group A put at most one ticket into the lottery (the
group acts through one hand per round); availability and probability of that
ticket are whatever beta_a returns for the round. Formally single_ticket is
the uniform rule with the eligible A count forced to one.

Bid probabilities are callables beta(q, leader) so that ascending auctions,
where the amount at stake shrinks with the bid index q, fit the same engine.
leader is "A", "B", or None for the opening bid.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np
from scipy import stats

__all__ = [
    "BetaFn",
    "TransitionRow",
    "TwoGroupChain",
    "AbsorptionSummary",
    "OccupancySeries",
    "NonAbsorbingChainError",
    "build_transitions",
    "first_bid_distribution",
    "absorption_closed_form",
    "evolve_recurrence",
    "expected_revenue_from_series",
]

log = logging.getLogger(__name__)

BetaFn = Callable[[int, Optional[str]], float]

_TIE_RULES = ("uniform", "single_ticket")


class TransitionRow(NamedTuple):
    """One row of the transition kernel: destination probabilities of a state."""

    to_a: float
    to_b: float
    absorb: float


class NonAbsorbingChainError(ValueError):
    """Raised when the chain cannot reach an absorbing state."""


def _check_prob(name: str, x: float) -> float:
    if not (0.0 <= x <= 1.0) or math.isnan(x):
        raise ValueError(f"{name} must be a probability in [0, 1], got {x}")
    return float(x)


def _lottery_row(elig_a: int, elig_b: int, beta_a: float, beta_b: float) -> TransitionRow:
    """Transition row for elig_a + elig_b independent coins and a uniform draw.

    With i heads from A and j from B the bid goes to group A with probability
    i / (i + j). The no-head event absorbs. Expectations are taken over the
    two independent binomials on a small pmf grid.
    """
    beta_a = _check_prob("beta_a", beta_a)
    beta_b = _check_prob("beta_b", beta_b)
    pa = stats.binom.pmf(np.arange(elig_a + 1), elig_a, beta_a) if elig_a > 0 else np.ones(1)
    pb = stats.binom.pmf(np.arange(elig_b + 1), elig_b, beta_b) if elig_b > 0 else np.ones(1)
    i = np.arange(len(pa), dtype=float)[:, None]
    j = np.arange(len(pb), dtype=float)[None, :]
    joint = pa[:, None] * pb[None, :]
    total = i + j
    total[0, 0] = 1.0  # avoid 0/0; the (0,0) cell is the absorbing event
    frac_a = i / total
    frac_b = j / total
    frac_a[0, 0] = 0.0
    frac_b[0, 0] = 0.0
    to_a = float(np.sum(joint * frac_a))
    to_b = float(np.sum(joint * frac_b))
    # Closed form for P(no bid); more accurate than the pmf grid cell. A
    # group with no eligible members cannot block absorption no matter its
    # probability.
    log_absorb = 0.0
    certain_bid = False
    for elig, beta in ((elig_a, beta_a), (elig_b, beta_b)):
        if elig > 0:
            if beta >= 1.0:
                certain_bid = True
            else:
                log_absorb += elig * math.log1p(-beta)
    absorb = 0.0 if certain_bid else math.exp(log_absorb)
    return TransitionRow(to_a=to_a, to_b=to_b, absorb=absorb)


def _eligible_counts(k_a: int, k_b: int, leader: Optional[str], tie_rule: str) -> tuple[int, int]:
    if leader not in ("A", "B", None):
        raise ValueError(f"leader must be 'A', 'B', or None, got {leader!r}")
    if leader == "A" and k_a <= 0:
        raise ValueError("group A cannot lead, it has no members")
    if leader == "B" and k_b <= 0:
        raise ValueError("group B cannot lead, it has no members")
    elig_b = k_b - 1 if leader == "B" else k_b
    if tie_rule == "single_ticket":
        # One hand per round for group A; whether the ticket is live is encoded
        # in beta_a (builders set it to 0 when the group cannot bid).
        elig_a = 1
    else:
        elig_a = k_a - 1 if leader == "A" else k_a
    return elig_a, elig_b


def build_transitions(
    k_a: int,
    k_b: int,
    beta_a,
    beta_b,
    tie_rule: str = "uniform",
    q: int = 2,
    leader: Optional[str] = "B",
) -> TransitionRow:
    """Transition row out of the state where `leader` holds the lead.

    k_a and k_b are the group sizes. beta_a / beta_b may be plain floats or
    callables of (q, leader). The leader's own group loses one eligible coin.
    """
    if tie_rule not in _TIE_RULES:
        raise ValueError(f"unknown tie rule {tie_rule!r}, expected one of {_TIE_RULES}")
    if k_a < 0 or k_b < 0 or k_a + k_b < 1:
        raise ValueError("group sizes must be nonnegative and not both zero")
    ba = beta_a(q, leader) if callable(beta_a) else beta_a
    bb = beta_b(q, leader) if callable(beta_b) else beta_b
    elig_a, elig_b = _eligible_counts(k_a, k_b, leader, tie_rule)
    return _lottery_row(elig_a, elig_b, ba, bb)


@dataclass
class TwoGroupChain:
    """A fully specified two-group auction chain.

    Fees are per-bid dollar amounts charged to whichever group places the bid.
    Exactly one of increment / price should be nonzero except for the 100%-off
    case where both are 0. time_homogeneous marks chains whose rows do not
    depend on q, which unlocks the closed-form absorption solve.
    """

    group_a_size: int
    group_b_size: int
    beta_a: BetaFn
    beta_b: BetaFn
    fee_a: float
    fee_b: float
    increment: float = 0.0
    price: float = 0.0
    tie_rule: str = "uniform"
    horizon: Optional[int] = None
    time_homogeneous: bool = False
    label: str = ""
    notes: tuple = ()

    def __post_init__(self):
        if self.tie_rule not in _TIE_RULES:
            raise ValueError(f"unknown tie rule {self.tie_rule!r}")
        if self.group_a_size < 0 or self.group_b_size < 0:
            raise ValueError("group sizes must be nonnegative")
        if self.group_a_size + self.group_b_size < 1:
            raise ValueError("chain needs at least one player")
        if self.increment < 0 or self.price < 0:
            raise ValueError("increment and price must be nonnegative")
        if self.increment > 0 and self.price > 0:
            raise ValueError("a chain is either ascending or fixed price, not both")
        if self.horizon is not None and self.horizon < 1:
            raise ValueError("horizon must be at least 1")

    @property
    def population(self) -> int:
        return self.group_a_size + self.group_b_size

    def transitions(self, q: int, leader: str) -> TransitionRow:
        return build_transitions(
            self.group_a_size,
            self.group_b_size,
            self.beta_a,
            self.beta_b,
            tie_rule=self.tie_rule,
            q=q,
            leader=leader,
        )

    def opening_row(self) -> TransitionRow:
        """Outcome split of the opening bid: (goes to A, goes to B, no bid)."""
        return build_transitions(
            self.group_a_size,
            self.group_b_size,
            self.beta_a,
            self.beta_b,
            tie_rule=self.tie_rule,
            q=1,
            leader=None,
        )


def first_bid_distribution(chain: TwoGroupChain, conditioned: bool = True):
    """Initial state distribution (P(A leads), P(B leads)) after bid one.

    With conditioned=True (the default) the no-bid event is removed and the
    two probabilities sum to one. Raises if no player ever makes the opening
    bid.
    """
    row = chain.opening_row()
    mass = row.to_a + row.to_b
    if mass <= 0.0:
        raise NonAbsorbingChainError("no opening bid is possible in this chain")
    if not conditioned:
        return np.array([row.to_a, row.to_b])
    return np.array([row.to_a / mass, row.to_b / mass])


@dataclass
class AbsorptionSummary:
    """Closed-form absorption quantities of a time-homogeneous chain.

    expected_visits[i, j] is the expected number of bids placed by group j
    when the chain starts with group i leading (the fundamental matrix).
    absorption_probs[i, j] is the probability of ending in W_j from start i.
    Aggregates use start_distribution, the success-conditioned opening split.
    """

    expected_visits: np.ndarray
    absorption_probs: np.ndarray
    start_distribution: np.ndarray
    expected_bids: float
    bids_by_group: np.ndarray
    win_probs: np.ndarray
    expected_revenue: float


def absorption_closed_form(chain: TwoGroupChain, q: int = 2) -> AbsorptionSummary:
    """Solve a time-homogeneous chain exactly.

    The transient part is the 2x2 matrix T with rows (from A-led, from B-led);
    the fundamental matrix N = (I - T)^-1 is inverted symbolically, so the
    only failure mode is a vanishing determinant, reported as non-absorbing.
    The expected revenue charges each group its fee per bid and adds the fixed
    price (the chain must be time homogeneous, so there is no increment part
    unless the increment happens to enter the betas as a constant).
    """
    if not chain.time_homogeneous:
        raise ValueError("closed form needs a time-homogeneous chain, use evolve_recurrence")
    row_a = chain.transitions(q, "A") if chain.group_a_size > 0 else TransitionRow(0.0, 0.0, 1.0)
    row_b = chain.transitions(q, "B") if chain.group_b_size > 0 else TransitionRow(0.0, 0.0, 1.0)
    if row_a.absorb <= 0.0 and row_b.absorb <= 0.0:
        raise NonAbsorbingChainError("chain never absorbs (no state can end the auction)")
    det = (1.0 - row_a.to_a) * (1.0 - row_b.to_b) - row_a.to_b * row_b.to_a
    if det <= 1e-300:
        raise NonAbsorbingChainError("chain never absorbs (fundamental matrix is singular)")
    n_mat = np.array([
        [1.0 - row_b.to_b, row_a.to_b],
        [row_b.to_a, 1.0 - row_a.to_a],
    ]) / det
    absorb = np.array([row_a.absorb, row_b.absorb])
    absorption_probs = n_mat * absorb[None, :]
    start = first_bid_distribution(chain, conditioned=True)
    bids_by_group = start @ n_mat
    expected_bids = float(bids_by_group.sum())
    win_probs = start @ absorption_probs
    fees = np.array([chain.fee_a, chain.fee_b])
    revenue = float(bids_by_group @ fees) + chain.price + chain.increment * expected_bids
    return AbsorptionSummary(
        expected_visits=n_mat,
        absorption_probs=absorption_probs,
        start_distribution=start,
        expected_bids=expected_bids,
        bids_by_group=bids_by_group,
        win_probs=win_probs,
        expected_revenue=revenue,
    )


@dataclass
class OccupancySeries:
    """Occupancy trajectory of a chain, one entry per bid index.

    p_a[t-1] is the probability that after t bids the auction is still live
    with group A leading; end_a[t-1] the probability it ended at exactly t
    bids with A winning. residual is the transient mass left when iteration
    stopped (0 for chains that terminate within the horizon).
    """

    steps: np.ndarray
    p_a: np.ndarray
    p_b: np.ndarray
    end_a: np.ndarray
    end_b: np.ndarray
    residual: float
    max_conservation_error: float
    chain: TwoGroupChain

    @property
    def win_prob_a(self) -> float:
        return float(self.end_a.sum())

    @property
    def win_prob_b(self) -> float:
        return float(self.end_b.sum())

    @property
    def bids_by_a(self) -> float:
        return float(self.p_a.sum())

    @property
    def bids_by_b(self) -> float:
        return float(self.p_b.sum())

    @property
    def expected_bids(self) -> float:
        return float(self.p_a.sum() + self.p_b.sum())


_MAX_STEPS = 10_000_000


def evolve_recurrence(
    chain: TwoGroupChain,
    horizon: Optional[int] = None,
    residual_tol: float = 1e-12,
    max_steps: int = _MAX_STEPS,
) -> OccupancySeries:
    """Propagate the occupancy recurrence forward from the opening bid.

        P_A(t+1) = P_A(t) row_A.to_a + P_B(t) row_B.to_a    (same for B)
        end_X(t) = P_X(t) * row_X.absorb(q = t+1)

    Iteration stops at the horizon (chain's own, or the argument), or when the
    live mass drops below residual_tol, or after max_steps. For fixed-price
    chains the rows are evaluated once and reused.
    """
    if horizon is None:
        horizon = chain.horizon
    if horizon is not None and horizon < 1:
        raise ValueError("horizon must be at least 1")
    start = first_bid_distribution(chain, conditioned=True)
    p_now = np.array(start, dtype=float)
    p_a_hist: list[float] = []
    p_b_hist: list[float] = []
    end_a_hist: list[float] = []
    end_b_hist: list[float] = []
    max_err = 0.0
    ended = 0.0
    cached_rows = None
    t = 1
    while True:
        p_a_hist.append(p_now[0])
        p_b_hist.append(p_now[1])
        q_next = t + 1
        if chain.time_homogeneous and cached_rows is not None:
            row_a, row_b = cached_rows
        else:
            row_a = chain.transitions(q_next, "A") if chain.group_a_size > 0 else TransitionRow(0.0, 0.0, 1.0)
            row_b = chain.transitions(q_next, "B") if chain.group_b_size > 0 else TransitionRow(0.0, 0.0, 1.0)
            if chain.time_homogeneous:
                cached_rows = (row_a, row_b)
        e_a = p_now[0] * row_a.absorb
        e_b = p_now[1] * row_b.absorb
        end_a_hist.append(e_a)
        end_b_hist.append(e_b)
        ended += e_a + e_b
        p_next = np.array([
            p_now[0] * row_a.to_a + p_now[1] * row_b.to_a,
            p_now[0] * row_a.to_b + p_now[1] * row_b.to_b,
        ])
        max_err = max(max_err, abs(ended + p_next.sum() - 1.0))
        p_now = p_next
        live = p_now.sum()
        t += 1
        if horizon is not None and t > horizon:
            break
        if live < residual_tol:
            break
        if t > max_steps:
            log.warning("recurrence stopped at max_steps=%d with residual %.3e", max_steps, live)
            break
    if max_err > 1e-9:
        raise ArithmeticError(f"occupancy mass leaked by {max_err:.3e}, chain rows are inconsistent")
    steps = np.arange(1, len(p_a_hist) + 1)
    return OccupancySeries(
        steps=steps,
        p_a=np.array(p_a_hist),
        p_b=np.array(p_b_hist),
        end_a=np.array(end_a_hist),
        end_b=np.array(end_b_hist),
        residual=float(p_now.sum()),
        max_conservation_error=max_err,
        chain=chain,
    )


def expected_revenue_from_series(
    series: OccupancySeries,
    fee_a: Optional[float] = None,
    fee_b: Optional[float] = None,
) -> float:
    """Expected revenue implied by an occupancy series.

    Fee revenue charges each group its per-bid fee for every expected visit.
    The price part is s * E[final bid count] for ascending chains and the
    fixed price times the probability of finishing (1 minus residual) for
    fixed-price chains.
    """
    chain = series.chain
    if fee_a is None:
        fee_a = chain.fee_a
    if fee_b is None:
        fee_b = chain.fee_b
    fees = fee_a * series.bids_by_a + fee_b * series.bids_by_b
    finished = series.end_a + series.end_b
    price_part = chain.price * float(finished.sum())
    increment_part = chain.increment * float((series.steps * finished).sum())
    return fees + price_part + increment_part
