"""Linear-chain CRF tagger: features, exact inference kernels, training."""

from .features import (
    EncodedSequence,
    FeatureConfig,
    FeatureExtractor,
    FeatureVector,
    pad_sequence,
)
from .model import (
    CrfParams,
    ModelConfig,
    TrainConfig,
    TrainResult,
    decode,
    emission_scores,
    gold_path_score,
    init_params,
    load_model,
    neg_log_likelihood_and_grad,
    params_from_config,
    predict_post,
    predict_tokens,
    save_model,
    train,
)
from . import kernels

__all__ = [
    "EncodedSequence",
    "FeatureConfig",
    "FeatureExtractor",
    "FeatureVector",
    "pad_sequence",
    "CrfParams",
    "ModelConfig",
    "TrainConfig",
    "TrainResult",
    "decode",
    "emission_scores",
    "gold_path_score",
    "init_params",
    "load_model",
    "neg_log_likelihood_and_grad",
    "params_from_config",
    "predict_post",
    "predict_tokens",
    "save_model",
    "train",
    "kernels",
]
