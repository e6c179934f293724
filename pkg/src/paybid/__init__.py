"""Equilibrium analysis, Monte Carlo simulation, and trace analytics for
pay-per-bid auctions."""

__version__ = "0.1.0"

from .core_model import (
    AuctionSpec,
    EquilibriumPoint,
    UNBOUNDED,
    max_bids,
    success_probability,
    symmetric_beta,
    symmetric_expected_revenue,
    symmetric_mu,
)
from .markov_engine import (
    AbsorptionSummary,
    NonAbsorbingChainError,
    OccupancySeries,
    TransitionRow,
    TwoGroupChain,
    absorption_closed_form,
    build_transitions,
    evolve_recurrence,
    expected_revenue_from_series,
    first_bid_distribution,
)
from .asymmetry_models import (
    ChickenPayoffs,
    CommittedPolicy,
    FullInfoEquilibrium,
    GroupProfile,
    PopulationBelief,
    ShillPolicy,
    ascending_underestimate_revenue,
    bidfee_asymmetry_chain,
    chicken_payoffs,
    collusion_chain,
    committed_player_profit,
    full_info_equilibrium,
    mixed_estimates_chain,
    shill_chain,
    shill_profit,
    two_group_chain,
    uncertain_population_beta,
    underestimate_chain,
    underestimate_uniform,
    valuation_asymmetry_chain,
)
from .simulator import (
    AuctionTrial,
    PlayerPolicy,
    estimate,
    simulate_chain,
    simulate_committed,
    simulate_one,
    simulate_shill,
    symmetric_policies,
)
