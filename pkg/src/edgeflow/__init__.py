"""Semi-supervised learning, active sensing and Hodge analysis for edge flows."""

from .active import (SelectionResult, select, select_random,
                     select_recursive_bisection, select_rrqr)
from .experiments import (ExperimentResult, SynthConfig, pearson, random_labels,
                          relative_l2, run_sweep, synth_flow)
from .graph import (FlowNetwork, GraphError, build_network, curl, curl_matrix,
                    divergence, flow_mat_to_vec, flow_vec_to_mat, gradient,
                    incidence_matrix, line_graph)
from .hodge import (ExchangeMarket, HodgeComponents, MarketError, arbitrage_gain,
                    hodge_decompose, make_market, price_arbitrage_free,
                    read_market, triangle_gains)
from .spectral import (SpectralBasis, compute_basis, from_spectral,
                       spectral_ratio, to_spectral)
from .ssl import (LabelSet, SSLConfig, baseline_line_graph, baseline_zero_fill,
                  infer_divergence_free, vertex_ssl_harmonic)

__version__ = "0.1.0"
