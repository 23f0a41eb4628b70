"""Asset pricing when an AI singularity can displace the marginal investor."""

from .exact import RecursionResult, Table1Row, ThetaChain, build_theta_chain, exact_pd_ai, table1_grid
from .model import (
    BASELINE,
    AssetKind,
    GammaPair,
    ModelParams,
    ParameterError,
    PDQuote,
    UndefinedRatioError,
    closed_form_pd,
    existence_factor,
    growth_factors,
    pd_ratio,
)
from .montecarlo import MCPrice, PathConfig, mc_price, simulate_path
from .transfers import (
    TransferOutcome,
    TransferParams,
    existence_frontier,
    figure2_panels,
    pd_with_transfers,
    phi_effective,
    post_transfer_consumption,
)
from .veto import (
    Market,
    VetoParams,
    VetoReport,
    delta_u,
    gamma_threshold,
    value_develop,
    value_veto,
    veto_report,
)

__version__ = "0.1.0"
