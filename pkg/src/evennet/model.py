"""Decoupled transform-then-propagate node classifiers.

Variants share a two-layer MLP transform followed by a polynomial filter
in P applied to the class scores:

    evennet       learnable even-parity filter
    fullorder     learnable full-parity filter
    evenreg       full-parity filter with an L1 penalty on odd coefficients
    fixed_lowpass frozen P^2 filter
    mlp           no propagation at all

Gradients are derived by hand (P is symmetric, so the filter adjoint is
the same polynomial applied to the upstream gradient) and optimized with
full-batch adaptive moments. Everything is deterministic for a fixed
seed.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .filters import EVEN, FULL, PolyFilter, ppr_init
from .graph import Graph, LabelAssignment, propagate, validate_features

VARIANTS = ("evennet", "fullorder", "mlp", "fixed_lowpass", "evenreg")


class TrainingDiverged(RuntimeError):
    def __init__(self, epoch: int):
        self.epoch = epoch
        super().__init__(f"training loss became non-finite at epoch {epoch}")


@dataclass
class TrainConfig:
    hidden: int = 64
    max_epochs: int = 1000
    patience: int = 200
    lr_transform: float = 0.01
    lr_filter: float = 0.01
    weight_decay: float = 5e-4
    dropout: float = 0.5
    dropout_propagation: float = 0.0
    filter_order: int = 10
    ppr_alpha: float = 0.1
    evenreg_eta: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.max_epochs < 1 or not 1 <= self.patience <= self.max_epochs:
            raise ValueError("need 1 <= patience <= max_epochs")
        if min(self.lr_transform, self.lr_filter) <= 0:
            raise ValueError("learning rates must be positive")
        if not 0.0 <= self.dropout < 1.0 or not 0.0 <= self.dropout_propagation < 1.0:
            raise ValueError("dropout rates must lie in [0, 1)")
        if self.weight_decay < 0 or self.evenreg_eta < 0:
            raise ValueError("weight decay and eta must be non-negative")

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in (
            "hidden", "max_epochs", "patience", "lr_transform", "lr_filter",
            "weight_decay", "dropout", "dropout_propagation", "filter_order",
            "ppr_alpha", "evenreg_eta", "seed")}


@dataclass
class ModelParams:
    variant: str
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    filt: PolyFilter | None
    filter_trainable: bool

    def copy(self) -> "ModelParams":
        filt = None
        if self.filt is not None:
            filt = PolyFilter(self.filt.parity, self.filt.coefficients.copy())
        return ModelParams(self.variant, self.w1.copy(), self.b1.copy(),
                           self.w2.copy(), self.b2.copy(), filt,
                           self.filter_trainable)

    def to_json_dict(self) -> dict:
        d = {
            "variant": self.variant,
            "filter_trainable": self.filter_trainable,
            "filter": None if self.filt is None else self.filt.to_json_dict(),
        }
        for name in ("w1", "b1", "w2", "b2"):
            arr = getattr(self, name)
            d[name] = {"shape": list(arr.shape), "values": arr.ravel().tolist()}
        return d

    @classmethod
    def from_json_dict(cls, d: dict) -> "ModelParams":
        arrays = {}
        for name in ("w1", "b1", "w2", "b2"):
            spec = d[name]
            arrays[name] = np.array(spec["values"], dtype=np.float64).reshape(spec["shape"])
        filt = None if d["filter"] is None else PolyFilter.from_json_dict(d["filter"])
        return cls(variant=d["variant"], filt=filt,
                   filter_trainable=d["filter_trainable"], **arrays)


@dataclass
class TrainReport:
    train_losses: list = field(default_factory=list)
    val_accuracies: list = field(default_factory=list)
    best_epoch: int = 0
    best_val_accuracy: float = 0.0
    test_accuracy: float | None = None
    epochs_run: int = 0
    wall_clock_sec: float = 0.0

    def to_json_dict(self, include_timing: bool = False) -> dict:
        d = {
            "train_losses": [float(v) for v in self.train_losses],
            "val_accuracies": [float(v) for v in self.val_accuracies],
            "best_epoch": self.best_epoch,
            "best_val_accuracy": self.best_val_accuracy,
            "test_accuracy": self.test_accuracy,
            "epochs_run": self.epochs_run,
        }
        # Wall-clock is volatile; persisted reports stay byte-reproducible.
        if include_timing:
            d["wall_clock_sec"] = self.wall_clock_sec
        return d

    def to_csv_text(self) -> str:
        lines = ["epoch,train_loss,val_accuracy"]
        for i, (tl, va) in enumerate(zip(self.train_losses, self.val_accuracies)):
            lines.append(f"{i},{tl:.17g},{va:.17g}")
        return "\n".join(lines) + "\n"


def _glorot(rng, fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


def init_params(variant: str, num_features: int, num_classes: int,
                cfg: TrainConfig, rng) -> ModelParams:
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    w1 = _glorot(rng, num_features, cfg.hidden)
    w2 = _glorot(rng, cfg.hidden, num_classes)
    b1 = np.zeros(cfg.hidden)
    b2 = np.zeros(num_classes)
    if variant == "evennet":
        filt, trainable = ppr_init(cfg.ppr_alpha, cfg.filter_order, EVEN), True
    elif variant in ("fullorder", "evenreg"):
        filt, trainable = ppr_init(cfg.ppr_alpha, cfg.filter_order, FULL), True
    elif variant == "fixed_lowpass":
        filt, trainable = PolyFilter(FULL, np.array([0.0, 0.0, 1.0])), False
    else:
        filt, trainable = None, False
    return ModelParams(variant, w1, b1, w2, b2, filt, trainable)


def _dropout_mask(rng, shape, rate: float) -> np.ndarray:
    # Inverted dropout: scaling happens at train time.
    return (rng.random(shape) >= rate) / (1.0 - rate)


def _forward_cache(p: ModelParams, g: Graph | None, x: np.ndarray,
                   train_mode: bool, dropout: float, dropout_propagation: float, rng):
    cache = {}
    xd = x
    if train_mode and dropout > 0.0:
        cache["mask1"] = _dropout_mask(rng, x.shape, dropout)
        xd = x * cache["mask1"]
    a1 = xd @ p.w1 + p.b1
    r = np.maximum(a1, 0.0)
    rd = r
    if train_mode and dropout > 0.0:
        cache["mask2"] = _dropout_mask(rng, r.shape, dropout)
        rd = r * cache["mask2"]
    h = rd @ p.w2 + p.b2
    cache.update(xd=xd, a1=a1, rd=rd)
    if p.variant == "mlp":
        cache["powers"] = None
        return h, cache
    if train_mode and dropout_propagation > 0.0:
        cache["mask3"] = _dropout_mask(rng, h.shape, dropout_propagation)
        h = h * cache["mask3"]
    stride = 2 if p.filt.parity == EVEN else 1
    powers = [h]
    for _ in range(len(p.filt.coefficients) - 1):
        t = powers[-1]
        for _ in range(stride):
            t = propagate(g, t)
        powers.append(t)
    z = sum(w * t for w, t in zip(p.filt.coefficients, powers))
    cache["powers"] = powers
    return z, cache


def forward(p: ModelParams, g: Graph | None, x: np.ndarray,
            train_mode: bool = False, dropout: float = 0.0,
            dropout_propagation: float = 0.0, rng=None) -> np.ndarray:
    """Logits N x C. Raises on non-finite output (divergence diagnostics)."""
    x = validate_features(x)
    if p.variant != "mlp" and g is None:
        raise ValueError(f"variant {p.variant!r} needs a graph")
    if train_mode and max(dropout, dropout_propagation) > 0.0 and rng is None:
        raise ValueError("train-mode dropout needs an rng")
    z, _ = _forward_cache(p, g, x, train_mode, dropout, dropout_propagation, rng)
    if not np.isfinite(z).all():
        bad = int(np.argwhere(~np.isfinite(z))[0][0])
        raise ValueError(f"non-finite logits (first bad row: node {bad})")
    return z


def _cross_entropy(logits: np.ndarray, classes: np.ndarray, mask: np.ndarray):
    """Mean softmax cross-entropy over the masked rows, plus dZ."""
    zm = logits[mask]
    ym = classes[mask]
    shifted = zm - zm.max(axis=1, keepdims=True)
    expz = np.exp(shifted)
    probs = expz / expz.sum(axis=1, keepdims=True)
    nll = -np.mean(shifted[np.arange(len(ym)), ym] - np.log(expz.sum(axis=1)))
    dzm = probs.copy()
    dzm[np.arange(len(ym)), ym] -= 1.0
    dz = np.zeros_like(logits)
    dz[mask] = dzm / len(ym)
    return float(nll), dz


def loss(logits: np.ndarray, labels: LabelAssignment | np.ndarray,
         mask: np.ndarray, p: ModelParams, eta: float = 0.0) -> float:
    """Masked cross-entropy; evenreg adds eta * sum over odd filter coefficients |w_k|."""
    classes = labels.classes if isinstance(labels, LabelAssignment) else np.asarray(labels)
    mask = np.asarray(mask)
    if mask.dtype == bool:
        if not mask.any():
            raise ValueError("empty training mask")
    elif len(mask) == 0:
        raise ValueError("empty training mask")
    value, _ = _cross_entropy(logits, classes, mask)
    if p.variant == "evenreg":
        value += eta * float(np.abs(p.filt.coefficients[1::2]).sum())
    return value


def loss_and_grads(p: ModelParams, g: Graph | None, x: np.ndarray,
                   labels: LabelAssignment | np.ndarray, mask: np.ndarray,
                   eta: float = 0.0, train_mode: bool = False,
                   dropout: float = 0.0, dropout_propagation: float = 0.0, rng=None):
    """Loss plus exact hand-derived gradients for every trainable array.

    Filter adjoints use the symmetry of P: dL/dw_k = <dZ, P^{sk} H> and
    dL/dH = sum_k w_k P^{sk} dZ. The L1 term contributes sign(w) with
    sign(0) = 0.
    """
    x = validate_features(x)
    classes = labels.classes if isinstance(labels, LabelAssignment) else np.asarray(labels)
    mask = np.asarray(mask)
    if (mask.dtype == bool and not mask.any()) or (mask.dtype != bool and len(mask) == 0):
        raise ValueError("empty training mask")
    z, cache = _forward_cache(p, g, x, train_mode, dropout, dropout_propagation, rng)
    if not np.isfinite(z).all():
        raise ValueError("non-finite logits during training step")
    value, dz = _cross_entropy(z, classes, mask)

    grads = {}
    if p.variant == "mlp":
        dh = dz
    else:
        w = p.filt.coefficients
        if p.filter_trainable:
            dw = np.array([np.sum(dz * t) for t in cache["powers"]])
            if p.variant == "evenreg":
                value += eta * float(np.abs(w[1::2]).sum())
                dw[1::2] += eta * np.sign(w[1::2])
            grads["w"] = dw
        stride = 2 if p.filt.parity == EVEN else 1
        dh = w[0] * dz
        t = dz
        for k in range(1, len(w)):
            for _ in range(stride):
                t = propagate(g, t)
            dh = dh + w[k] * t
        if "mask3" in cache:
            dh = dh * cache["mask3"]

    grads["w2"] = cache["rd"].T @ dh
    grads["b2"] = dh.sum(axis=0)
    dr = dh @ p.w2.T
    if "mask2" in cache:
        dr = dr * cache["mask2"]
    da1 = dr * (cache["a1"] > 0)
    grads["w1"] = cache["xd"].T @ da1
    grads["b1"] = da1.sum(axis=0)
    return value, grads


class Adam:
    """Adaptive-moment optimizer with per-group learning rates.

    Weight decay is applied here (classic L2-in-gradient form) to the
    transform parameters only, never to filter coefficients.
    """

    def __init__(self, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.t = 0
        self.m: dict = {}
        self.v: dict = {}

    def step(self, p: ModelParams, grads: dict, cfg: TrainConfig) -> None:
        self.t += 1
        for name, grad in grads.items():
            if name == "w":
                target = p.filt.coefficients
                lr = cfg.lr_filter
            else:
                target = getattr(p, name)
                lr = cfg.lr_transform
                if cfg.weight_decay:
                    grad = grad + cfg.weight_decay * target
            if name not in self.m:
                self.m[name] = np.zeros_like(target)
                self.v[name] = np.zeros_like(target)
            self.m[name] = self.beta1 * self.m[name] + (1 - self.beta1) * grad
            self.v[name] = self.beta2 * self.v[name] + (1 - self.beta2) * grad * grad
            mhat = self.m[name] / (1 - self.beta1 ** self.t)
            vhat = self.v[name] / (1 - self.beta2 ** self.t)
            target -= lr * mhat / (np.sqrt(vhat) + self.eps)


def evaluate(p: ModelParams, g: Graph | None, x: np.ndarray,
             labels: LabelAssignment | np.ndarray, mask=None) -> float:
    """Accuracy of argmax predictions; ties resolve to the lowest class id."""
    classes = labels.classes if isinstance(labels, LabelAssignment) else np.asarray(labels)
    logits = forward(p, g, x)
    pred = np.argmax(logits, axis=1)  # first maximum -> lowest class id
    if mask is None:
        mask = np.ones(len(classes), dtype=bool)
    mask = np.asarray(mask)
    return float(np.mean(pred[mask] == classes[mask]))


def train(cfg: TrainConfig, g_train: Graph | None, x_train, y_train,
          g_val: Graph | None, x_val, y_val, variant: str = "evennet",
          train_mask=None, val_mask=None) -> tuple[ModelParams, TrainReport]:
    """Full-batch training with early stopping on validation accuracy.

    The inductive protocol passes separate train/validation graphs with
    the masks left at their all-nodes default; the transductive protocol
    passes the same graph twice with disjoint node masks. The best-scoring
    parameters are restored before returning, and the whole trajectory is
    a deterministic function of ``cfg.seed``.
    """
    x_train = validate_features(x_train)
    x_val = validate_features(x_val)
    if x_train.shape[1] != x_val.shape[1]:
        raise ValueError("train/validation feature dimensions differ")
    y_train = y_train if isinstance(y_train, LabelAssignment) else LabelAssignment.from_classes(y_train)
    y_val = y_val if isinstance(y_val, LabelAssignment) else LabelAssignment.from_classes(y_val)
    num_classes = max(y_train.num_classes, y_val.num_classes)
    if train_mask is None:
        train_mask = np.ones(x_train.shape[0], dtype=bool)

    rng = np.random.default_rng(cfg.seed)
    params = init_params(variant, x_train.shape[1], num_classes, cfg, rng)
    opt = Adam()
    report = TrainReport()
    best_params = params.copy()
    best_acc, best_epoch = -1.0, 0
    started = time.perf_counter()

    for epoch in range(cfg.max_epochs):
        try:
            value, grads = loss_and_grads(
                params, g_train, x_train, y_train, train_mask,
                eta=cfg.evenreg_eta, train_mode=True,
                dropout=cfg.dropout,
                dropout_propagation=cfg.dropout_propagation, rng=rng)
        except ValueError as exc:
            if "non-finite" in str(exc):
                raise TrainingDiverged(epoch) from exc
            raise
        if not np.isfinite(value):
            raise TrainingDiverged(epoch)
        opt.step(params, grads, cfg)
        val_acc = evaluate(params, g_val, x_val, y_val, mask=val_mask)
        report.train_losses.append(float(value))
        report.val_accuracies.append(val_acc)
        if val_acc > best_acc:
            best_acc, best_epoch = val_acc, epoch
            best_params = params.copy()
        if epoch - best_epoch >= cfg.patience:
            break

    report.best_epoch = best_epoch
    report.best_val_accuracy = best_acc
    report.epochs_run = len(report.train_losses)
    report.wall_clock_sec = time.perf_counter() - started
    return best_params, report
