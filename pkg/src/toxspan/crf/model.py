"""Linear-chain CRF over {TOXIC, NONTOXIC, PAD} with exact training.

Emission scores come from hashed sparse features (plus optional dense
embeddings) through zero, one, or two tanh layers; transitions are a full
L x L matrix with separate start/stop scores.  Training maximizes the exact
conditional log-likelihood with Adam; gradients are model expectations from
forward-backward minus empirical counts, backpropagated through the
emission stack.
"""

from __future__ import annotations

import logging
import struct
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import DataError, NumericalError, ValidationError
from ..spans import CharIndexSet, Label, token_labels_to_index_set
from ..tokenizer import Token, tokenize
from . import kernels
from .features import (
    EncodedSequence,
    FeatureConfig,
    FeatureExtractor,
    FeatureVector,
    pad_sequence,
)

logger = logging.getLogger(__name__)

N_LABELS = 3


@dataclass(frozen=True)
class ModelConfig:
    """Architecture switches; the feature side must match the extractor."""

    hash_bits: int = 20
    window: int = 2
    emb_dim: int = 0
    hidden_layers: int = 0
    hidden_width: int = 16

    def __post_init__(self) -> None:
        if self.hidden_layers not in (0, 1, 2):
            raise ValidationError("hidden_layers must be 0, 1 or 2")
        if self.hidden_layers and self.hidden_width < 1:
            raise ValidationError("hidden_width must be >= 1")
        if self.emb_dim < 0:
            raise ValidationError("emb_dim must be >= 0")

    def feature_config(self) -> FeatureConfig:
        return FeatureConfig(hash_bits=self.hash_bits, window=self.window)


@dataclass
class CrfParams:
    """Trainable state. ``emit`` maps the top of the feature stack to the
    three labels; ``hidden`` holds (W, b) pairs, the first layer over the
    sparse+dense input, later layers over the previous activation."""

    n_sparse: int
    emb_dim: int
    trans: np.ndarray
    start: np.ndarray
    stop: np.ndarray
    emit: np.ndarray
    hidden: list[tuple[np.ndarray, np.ndarray]] = field(default_factory=list)
    meta: ModelConfig | None = None

    @property
    def n_input(self) -> int:
        return self.n_sparse + self.emb_dim

    def named_arrays(self) -> list[tuple[str, np.ndarray]]:
        out = [
            ("trans", self.trans),
            ("start", self.start),
            ("stop", self.stop),
            ("emit", self.emit),
        ]
        for k, (w, b) in enumerate(self.hidden):
            out.append((f"W{k}", w))
            out.append((f"b{k}", b))
        return out

    def zero_grads(self) -> dict[str, np.ndarray]:
        return {name: np.zeros_like(arr) for name, arr in self.named_arrays()}

    def copy(self) -> "CrfParams":
        return CrfParams(
            self.n_sparse,
            self.emb_dim,
            self.trans.copy(),
            self.start.copy(),
            self.stop.copy(),
            self.emit.copy(),
            [(w.copy(), b.copy()) for w, b in self.hidden],
            self.meta,
        )


def init_params(
    n_sparse: int,
    emb_dim: int = 0,
    hidden_layers: int = 0,
    hidden_width: int = 16,
    seed: int = 0,
    meta: ModelConfig | None = None,
) -> CrfParams:
    """Uniform [-0.1, 0.1] emission/hidden weights, zero transitions."""
    rng = np.random.default_rng(seed)
    n_input = n_sparse + emb_dim
    hidden: list[tuple[np.ndarray, np.ndarray]] = []
    top = n_input
    for k in range(hidden_layers):
        in_dim = n_input if k == 0 else hidden_width
        hidden.append(
            (
                rng.uniform(-0.1, 0.1, size=(hidden_width, in_dim)),
                rng.uniform(-0.1, 0.1, size=hidden_width),
            )
        )
        top = hidden_width
    emit = rng.uniform(-0.1, 0.1, size=(N_LABELS, top))
    return CrfParams(
        n_sparse,
        emb_dim,
        np.zeros((N_LABELS, N_LABELS)),
        np.zeros(N_LABELS),
        np.zeros(N_LABELS),
        emit,
        hidden,
        meta,
    )


def params_from_config(config: ModelConfig, seed: int) -> CrfParams:
    return init_params(
        n_sparse=1 << config.hash_bits,
        emb_dim=config.emb_dim,
        hidden_layers=config.hidden_layers,
        hidden_width=config.hidden_width,
        seed=seed,
        meta=config,
    )


def _input_matvec(
    W: np.ndarray, features: Sequence[FeatureVector], n_sparse: int
) -> np.ndarray:
    """Rows W . x_t for sparse-plus-dense inputs, without materializing x."""
    n = len(features)
    out = np.empty((n, W.shape[0]))
    dense_block = W[:, n_sparse:]
    for t, fv in enumerate(features):
        row = W[:, fv.ids].sum(axis=1)
        if fv.dense is not None:
            if fv.dense.shape[0] != dense_block.shape[1]:
                raise ValidationError(
                    f"dense feature dim {fv.dense.shape[0]} != model emb_dim "
                    f"{dense_block.shape[1]}"
                )
            row = row + dense_block @ fv.dense
        elif dense_block.shape[1]:
            raise ValidationError("model expects dense features but none given")
        out[t] = row
    return out


def _emission_forward(
    params: CrfParams, features: Sequence[FeatureVector]
) -> tuple[np.ndarray, list[np.ndarray]]:
    """Emission matrix (n, L) plus hidden activations kept for backprop."""
    activations: list[np.ndarray] = []
    if not params.hidden:
        return _input_matvec(params.emit, features, params.n_sparse), activations
    a = np.empty(0)
    for k, (W, b) in enumerate(params.hidden):
        z = _input_matvec(W, features, params.n_sparse) if k == 0 else a @ W.T
        a = np.tanh(z + b)
        activations.append(a)
    return a @ params.emit.T, activations


def emission_scores(params: CrfParams, features: Sequence[FeatureVector]) -> np.ndarray:
    """Per-token label scores psi with shape (n, L)."""
    if not features:
        raise ValidationError("empty feature sequence")
    psi, _ = _emission_forward(params, features)
    return psi


def _scatter_columns(
    grad: np.ndarray, features: Sequence[FeatureVector], rows: np.ndarray
) -> None:
    """grad[:, f] += rows[t] for every sparse feature f active at token t.

    bincount keeps the reduction order fixed, so batch gradients are
    deterministic.
    """
    n_cols = grad.shape[1]
    cols = np.concatenate([fv.ids for fv in features])
    per_t = np.fromiter(
        (len(fv.ids) for fv in features), dtype=np.int64, count=len(features)
    )
    vals = np.repeat(rows, per_t, axis=0)
    for l in range(grad.shape[0]):
        grad[l] += np.bincount(cols, weights=vals[:, l], minlength=n_cols)


def _emission_backward(
    params: CrfParams,
    features: Sequence[FeatureVector],
    activations: list[np.ndarray],
    dpsi: np.ndarray,
    grads: dict[str, np.ndarray],
) -> None:
    n_sparse = params.n_sparse
    has_dense = features[0].dense is not None
    dense_mat = np.stack([fv.dense for fv in features]) if has_dense else None
    if not params.hidden:
        _scatter_columns(grads["emit"][:, :n_sparse], features, dpsi)
        if has_dense:
            grads["emit"][:, n_sparse:] += dpsi.T @ dense_mat
        return
    grads["emit"] += dpsi.T @ activations[-1]
    da = dpsi @ params.emit
    for k in range(len(params.hidden) - 1, -1, -1):
        W, _ = params.hidden[k]
        dz = da * (1.0 - activations[k] ** 2)
        grads[f"b{k}"] += dz.sum(axis=0)
        if k == 0:
            _scatter_columns(grads["W0"][:, :n_sparse], features, dz)
            if has_dense:
                grads["W0"][:, n_sparse:] += dz.T @ dense_mat
        else:
            grads[f"W{k}"] += dz.T @ activations[k - 1]
            da = dz @ W


def gold_path_score(
    psi: np.ndarray, trans: np.ndarray, start: np.ndarray, stop: np.ndarray,
    labels: np.ndarray,
) -> float:
    n = psi.shape[0]
    score = start[labels[0]] + stop[labels[-1]] + psi[np.arange(n), labels].sum()
    if n > 1:
        score += trans[labels[:-1], labels[1:]].sum()
    return float(score)


def neg_log_likelihood_and_grad(
    params: CrfParams, batch: Sequence[EncodedSequence], l2: float = 0.0
) -> tuple[float, dict[str, np.ndarray]]:
    """Summed NLL over the batch plus l2 * ||params||^2, with gradients.

    Gradient of the data term per sequence: forward-backward expectations
    minus the gold one-hot counts, pushed through the emission stack.
    """
    if not batch:
        raise ValidationError("empty batch")
    grads = params.zero_grads()
    loss = 0.0
    for idx, seq in enumerate(batch):
        psi, activations = _emission_forward(params, seq.features)
        logz, unary, pair = kernels.forward_backward(
            psi, params.trans, params.start, params.stop
        )
        labels = seq.labels
        n = psi.shape[0]
        nll = logz - gold_path_score(psi, params.trans, params.start, params.stop, labels)
        if not np.isfinite(nll):
            ref = seq.post_id or f"batch[{idx}]"
            raise NumericalError(f"non-finite loss on sequence {ref}")
        loss += nll

        dpsi = unary.copy()
        dpsi[np.arange(n), labels] -= 1.0
        grads["start"] += unary[0]
        grads["start"][labels[0]] -= 1.0
        grads["stop"] += unary[-1]
        grads["stop"][labels[-1]] -= 1.0
        if n > 1:
            grads["trans"] += pair.sum(axis=0)
            np.add.at(grads["trans"], (labels[:-1], labels[1:]), -1.0)
        _emission_backward(params, seq.features, activations, dpsi, grads)

    if l2:
        for name, arr in params.named_arrays():
            loss += l2 * float((arr * arr).sum())
            grads[name] += 2.0 * l2 * arr
    return loss, grads


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 10
    learning_rate: float = 1e-2
    l2: float = 1e-4
    batch_size: int = 32
    seed: int = 0
    clip: float = 5.0
    pad_batches: bool = True  # pad to batch max and keep PAD in the loss
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self) -> None:
        if self.epochs < 0:
            raise ValidationError("epochs must be >= 0")
        if self.learning_rate <= 0:
            raise ValidationError("learning rate must be > 0")
        if self.l2 < 0:
            raise ValidationError("l2 must be >= 0")
        if self.batch_size < 1:
            raise ValidationError("batch_size must be >= 1")

    @classmethod
    def paper_preset(cls, **overrides) -> "TrainConfig":
        """Settings used for pretrained-embedding runs: 2 epochs, lr 3e-5."""
        base = dict(epochs=2, learning_rate=3e-5)
        base.update(overrides)
        return cls(**base)


@dataclass
class TrainResult:
    params: CrfParams
    epoch_losses: list[float]
    config: TrainConfig


def train(
    sequences: Sequence[EncodedSequence],
    params: CrfParams,
    config: TrainConfig,
    extractor: FeatureExtractor | None = None,
) -> TrainResult:
    """Mini-batch Adam on the mean conditional log-likelihood.

    Deterministic for a fixed seed: the shuffle order, batch boundaries and
    gradient reductions are all fixed.  The returned params are a trained
    copy; the input params are left untouched.
    """
    if not sequences:
        raise ValidationError("empty training set")
    if config.pad_batches and extractor is None:
        raise ValidationError("pad_batches requires the feature extractor")
    params = params.copy()
    rng = np.random.default_rng(config.seed)
    named = dict(params.named_arrays())
    m = {k: np.zeros_like(v) for k, v in named.items()}
    v = {k: np.zeros_like(a) for k, a in named.items()}
    step = 0
    epoch_losses: list[float] = []

    for _epoch in range(config.epochs):
        order = rng.permutation(len(sequences))
        epoch_nll = 0.0
        for lo in range(0, len(order), config.batch_size):
            batch = [sequences[i] for i in order[lo : lo + config.batch_size]]
            if config.pad_batches:
                width = max(len(s.labels) for s in batch)
                batch = [pad_sequence(s, width, extractor) for s in batch]
            loss, grads = neg_log_likelihood_and_grad(params, batch, l2=0.0)
            epoch_nll += loss
            scale = 1.0 / len(batch)
            for name, arr in named.items():
                grads[name] *= scale
                if config.l2:
                    grads[name] += 2.0 * config.l2 * arr

            if config.clip > 0:
                sq = sum(float((g * g).sum()) for g in grads.values())
                norm = np.sqrt(sq)
                if norm > config.clip:
                    factor = config.clip / norm
                    for g in grads.values():
                        g *= factor

            step += 1
            bc1 = 1.0 - config.beta1**step
            bc2 = 1.0 - config.beta2**step
            for name, arr in named.items():
                g = grads[name]
                m[name] = config.beta1 * m[name] + (1.0 - config.beta1) * g
                v[name] = config.beta2 * v[name] + (1.0 - config.beta2) * g * g
                arr -= config.learning_rate * (m[name] / bc1) / (
                    np.sqrt(v[name] / bc2) + config.eps
                )
        mean_nll = epoch_nll / len(sequences)
        if not np.isfinite(mean_nll):
            raise NumericalError(
                f"training diverged at epoch {len(epoch_losses)}; "
                f"trace so far: {epoch_losses}"
            )
        if epoch_losses and mean_nll > epoch_losses[-1]:
            # expected noise for stochastic batches; worth a look otherwise
            logger.warning(
                "epoch %d mean NLL rose: %.6f -> %.6f",
                len(epoch_losses), epoch_losses[-1], mean_nll,
            )
        epoch_losses.append(mean_nll)
    return TrainResult(params, epoch_losses, config)


def decode(params: CrfParams, features: Sequence[FeatureVector]) -> list[Label]:
    """Viterbi path for one sequence (raw labels, PAD possible)."""
    psi = emission_scores(params, features)
    path, _ = kernels.viterbi(psi, params.trans, params.start, params.stop)
    return [Label(int(i)) for i in path]


def predict_tokens(
    params: CrfParams,
    extractor: FeatureExtractor,
    tokens: Sequence[Token],
    dense: Sequence[np.ndarray] | None = None,
) -> CharIndexSet:
    """Decode a token sequence into a character index set.

    PAD is structural; a real token decoded as PAD counts as NONTOXIC.
    """
    if not tokens:
        return CharIndexSet()
    features = extractor.featurize(tokens, dense=dense)
    labels = [
        Label.NONTOXIC if lab == Label.PAD else lab
        for lab in decode(params, features)
    ]
    return token_labels_to_index_set(tokens, labels)


def predict_post(
    params: CrfParams, extractor: FeatureExtractor, text: str
) -> CharIndexSet:
    return predict_tokens(params, extractor, tokenize(text))


# ---------------------------------------------------------------------------
# Model file: fixed little-endian binary container + text manifest sidecar.
# ---------------------------------------------------------------------------

_MAGIC = b"TSCRFMDL"
_VERSION = 1
_HEADER = struct.Struct("<8sIcIQIIIII")  # magic, version, endian, L, n_sparse,
# emb_dim, hidden_width, n_layers, hash_bits, window


def save_model(params: CrfParams, path, manifest: dict | None = None) -> None:
    """Write the binary weight container and a ``<path>.manifest`` sidecar."""
    meta = params.meta or ModelConfig(
        hash_bits=max(int(params.n_sparse - 1).bit_length(), 4),
        emb_dim=params.emb_dim,
        hidden_layers=len(params.hidden),
        hidden_width=params.hidden[0][0].shape[0] if params.hidden else 16,
    )
    with open(path, "wb") as fh:
        fh.write(
            _HEADER.pack(
                _MAGIC,
                _VERSION,
                b"<",
                N_LABELS,
                params.n_sparse,
                params.emb_dim,
                meta.hidden_width,
                len(params.hidden),
                meta.hash_bits,
                meta.window,
            )
        )
        for _, arr in params.named_arrays():
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())
    lines = [f"format_version = {_VERSION}"]
    for key, value in sorted((manifest or {}).items()):
        lines.append(f"{key} = {value}")
    with open(str(path) + ".manifest", "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_model(path) -> tuple[CrfParams, dict[str, str]]:
    """Read a model container; returns (params, manifest key/value map)."""
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) < _HEADER.size:
            raise DataError(f"{path}: truncated header")
        magic, version, endian, n_labels, n_sparse, emb_dim, width, n_layers, bits, window = (
            _HEADER.unpack(header)
        )
        if magic != _MAGIC:
            raise DataError(f"{path}: not a toxspan CRF model")
        if version != _VERSION:
            raise DataError(f"{path}: unsupported format version {version}")
        if endian != b"<":
            raise DataError(f"{path}: unsupported endianness {endian!r}")
        if n_labels != N_LABELS:
            raise DataError(f"{path}: label count {n_labels} != {N_LABELS}")

        def read_array(shape: tuple[int, ...]) -> np.ndarray:
            count = int(np.prod(shape))
            buf = fh.read(count * 8)
            if len(buf) != count * 8:
                raise DataError(f"{path}: truncated weights")
            return np.frombuffer(buf, dtype="<f8").astype(np.float64).reshape(shape)

        n_input = n_sparse + emb_dim
        top = width if n_layers else n_input
        trans = read_array((N_LABELS, N_LABELS))
        start = read_array((N_LABELS,))
        stop = read_array((N_LABELS,))
        emit = read_array((N_LABELS, top))
        hidden = []
        for k in range(n_layers):
            in_dim = n_input if k == 0 else width
            hidden.append((read_array((width, in_dim)), read_array((width,))))
        if fh.read(1):
            raise DataError(f"{path}: trailing bytes after weights")
    meta = ModelConfig(
        hash_bits=bits,
        window=window,
        emb_dim=emb_dim,
        hidden_layers=n_layers,
        hidden_width=width,
    )
    params = CrfParams(n_sparse, emb_dim, trans, start, stop, emit, hidden, meta)
    manifest: dict[str, str] = {}
    try:
        with open(str(path) + ".manifest", encoding="utf-8") as fh:
            for line in fh:
                if "=" in line:
                    key, value = line.split("=", 1)
                    manifest[key.strip()] = value.strip()
    except FileNotFoundError:
        pass
    return params, manifest
