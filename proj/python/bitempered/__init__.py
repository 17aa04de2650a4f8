"""Bi-tempered logistic loss: tempered log/exp, tempered softmax, Bregman
divergences, and the bi-tempered loss with analytic gradients."""

from ._core import (
    LossOutput,
    NormalizationResult,
    PropernessArm,
    PropernessReport,
    bitempered_loss,
    bitempered_loss_batch,
    bregman_alternate,
    bregman_special,
    bregman_tempered,
    escort_distribution,
    exp_t,
    exp_t_vec,
    lambda_binary_search,
    lambda_fixed_point,
    log_t,
    log_t_vec,
    normalize_activations,
    properness_gap,
    tempered_generator,
    tempered_softmax,
    tsallis_divergence,
    tsallis_loss,
)

__all__ = [
    "LossOutput",
    "NormalizationResult",
    "PropernessArm",
    "PropernessReport",
    "bitempered_loss",
    "bitempered_loss_batch",
    "bregman_alternate",
    "bregman_special",
    "bregman_tempered",
    "escort_distribution",
    "exp_t",
    "exp_t_vec",
    "lambda_binary_search",
    "lambda_fixed_point",
    "log_t",
    "log_t_vec",
    "normalize_activations",
    "properness_gap",
    "tempered_generator",
    "tempered_softmax",
    "tsallis_divergence",
    "tsallis_loss",
]
