"""Training loop, the Adam optimizer, and finite-difference verification.

Loss is binary cross-entropy over the network's sigmoid output.  Gradient
checking runs the network in "check" mode (no dropout, batch-norm on batch
statistics without running updates) and compares backprop gradients with
central finite differences coordinate by coordinate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..textops import normalize_text, tokenize
from .network import Network

BCE_EPS = 1e-12


@dataclass
class TrainConfig:
    batch_size: int = 300
    epochs: int = 150
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0


@dataclass
class History:
    loss: list[float] = field(default_factory=list)
    accuracy: list[float] = field(default_factory=list)


def bce_loss(p: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean binary cross-entropy and its gradient with respect to p."""
    pc = np.clip(p, BCE_EPS, 1.0 - BCE_EPS)
    loss = float(-np.mean(y * np.log(pc) + (1.0 - y) * np.log(1.0 - pc)))
    grad = (pc - y) / (pc * (1.0 - pc)) / len(y)
    return loss, grad


class Adam:
    def __init__(self, params, config: TrainConfig):
        self.params = [p for p in params if p.trainable]
        self.config = config
        self.m = [np.zeros_like(p.value) for p in self.params]
        self.v = [np.zeros_like(p.value) for p in self.params]
        self.t = 0

    def step(self) -> None:
        c = self.config
        self.t += 1
        bias1 = 1.0 - c.beta1**self.t
        bias2 = 1.0 - c.beta2**self.t
        for p, m, v in zip(self.params, self.m, self.v):
            g = p.grad
            m *= c.beta1
            m += (1.0 - c.beta1) * g
            v *= c.beta2
            v += (1.0 - c.beta2) * g * g
            p.value -= c.learning_rate * (m / bias1) / (np.sqrt(v / bias2) + c.eps)


def train_network(
    net: Network,
    x1: np.ndarray,
    x2: np.ndarray,
    y: np.ndarray,
    config: TrainConfig | None = None,
) -> History:
    """Minimize binary cross-entropy with Adam; per-epoch loss/accuracy."""
    config = config or TrainConfig()
    y = np.asarray(y, dtype=np.float64)
    n = len(y)
    rng = np.random.default_rng(config.seed)
    optimizer = Adam(net.parameters(), config)
    history = History()
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        correct = 0
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            net.zero_grads()
            p = net.forward(x1[idx], x2[idx], mode="train")
            loss, dp = bce_loss(p, y[idx])
            if not np.isfinite(loss):
                raise RuntimeError(
                    f"loss became non-finite at epoch {epoch}, batch {start}: "
                    f"p range [{p.min()}, {p.max()}]"
                )
            net.backward(dp)
            optimizer.step()
            epoch_loss += loss * len(idx)
            correct += int(((p >= 0.5) == (y[idx] == 1)).sum())
        history.loss.append(epoch_loss / n)
        history.accuracy.append(correct / n)
    return history


def gradient_check(
    net: Network,
    x1: np.ndarray,
    x2: np.ndarray,
    y: np.ndarray,
    max_coords_per_param: int = 6,
    step: float = 1e-5,
    seed: int = 0,
    noise_floor: float = 1e-10,
) -> float:
    """Maximum relative error between backprop and central differences.

    Coordinates are sampled per parameter tensor (all of them when small);
    the step is scaled to each coordinate's magnitude.  Absolute
    discrepancies below ``noise_floor`` are ignored: central differences of
    a float64 loss carry ~1e-11 of rounding noise, which would otherwise
    dominate the relative error exactly where gradients are vanishingly
    small and carry no signal about backprop correctness.
    """
    y = np.asarray(y, dtype=np.float64)
    rng = np.random.default_rng(seed)

    def loss_only() -> float:
        return bce_loss(net.forward(x1, x2, mode="check"), y)[0]

    net.zero_grads()
    p = net.forward(x1, x2, mode="check")
    _, dp = bce_loss(p, y)
    net.backward(dp)

    worst = 0.0
    for param in net.trainable_parameters():
        flat_value = param.value.ravel()
        flat_grad = param.grad.ravel()
        n = flat_value.size
        if n <= max_coords_per_param:
            coords = np.arange(n)
        else:
            coords = rng.choice(n, size=max_coords_per_param, replace=False)
        for c in coords:
            original = flat_value[c]
            h = step * max(1.0, abs(original))
            flat_value[c] = original + h
            up = loss_only()
            flat_value[c] = original - h
            down = loss_only()
            flat_value[c] = original
            fd = (up - down) / (2.0 * h)
            bp = flat_grad[c]
            diff = abs(bp - fd)
            if diff <= noise_floor:
                continue
            worst = max(worst, diff / max(abs(bp), abs(fd), 1e-8))
    return worst


# --------------------------------------------------------- input encoding

def build_vocab(texts: list[str]) -> dict[str, int]:
    """Token to index map over normalized text; index 0 is padding."""
    vocab: dict[str, int] = {}
    for text in texts:
        for token in tokenize(normalize_text(text)):
            if token not in vocab:
                vocab[token] = len(vocab) + 1
    return vocab


def encode(texts: list[str], vocab: dict[str, int], seq_len: int) -> np.ndarray:
    """Index-encode texts, truncating or post-padding with zeros."""
    out = np.zeros((len(texts), seq_len), dtype=np.int64)
    for i, text in enumerate(texts):
        ids = [vocab[t] for t in tokenize(normalize_text(text)) if t in vocab]
        ids = ids[:seq_len]
        out[i, : len(ids)] = ids
    return out


def make_toy_pairs(
    n: int, vocab_size: int, seq_len: int, seed: int = 0
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Separable synthetic pairs: duplicates share a shuffled token bag,
    non-duplicates draw from disjoint vocabulary halves."""
    rng = np.random.default_rng(seed)
    half = (vocab_size - 1) // 2
    x1 = np.zeros((n, seq_len), dtype=np.int64)
    x2 = np.zeros((n, seq_len), dtype=np.int64)
    y = (rng.random(n) < 0.5).astype(np.int64)
    for i in range(n):
        length = int(rng.integers(3, seq_len + 1))
        if y[i] == 1:
            tokens = rng.integers(1, vocab_size, size=length)
            x1[i, :length] = tokens
            x2[i, :length] = rng.permutation(tokens)
        else:
            x1[i, :length] = rng.integers(1, 1 + half, size=length)
            x2[i, :length] = rng.integers(1 + half, vocab_size, size=length)
    return x1, x2, y
