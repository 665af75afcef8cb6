"""Weighted-sum-rate beamforming toolkit for multicell MIMO.

Model-driven solvers (alternating with bisected multipliers, and the
matrix-inverse-free spectral-stepsize variant), a deep-unfolded per-user
stepsize network with hybrid supervised/unsupervised training, a hexagonal
wrap-around channel simulator, and a benchmarking CLI.
"""

from .channel import (
    ChannelSet,
    NetworkConfig,
    generate_rayleigh,
    generate_scenario,
    load_dataset,
    save_dataset,
)
from .deepfp import (
    EigenStub,
    StepsizeNet,
    TrainConfig,
    complex_relu,
    init_stepsize_net,
    load_model,
    loss_supervised,
    loss_unsupervised,
    predict_stepsize,
    save_model,
    train,
    unfold_forward,
)
from .linalg import (
    frobenius_norm_sq,
    hermitian_inverse,
    largest_eigenvalue,
    logdet_hermitian_pd,
)
from .objective import (
    f_n_eval,
    f_q_eval,
    f_r_eval,
    interference_cov_F,
    power_scale,
    total_cov_D,
    user_rate,
    wsr,
)
from .solvers import (
    SolveTrace,
    bisect_eta,
    fastfp_solve,
    fp_solve,
    initial_beamformers,
    update_Gamma,
    update_Y,
    wmmse_sc_solve,
)

__version__ = "0.1.0"
