"""Dense feed-forward networks with manual reverse-mode gradients.

A network is 5 layers (input, 3 hidden, output) with rectifier hidden
activations. The actor squashes its output with tanh; the critic leaves
it linear. Everything runs in double precision so gradient checks and
bitwise determinism are clean.
"""

from __future__ import annotations

import numpy as np


class MLP:
    """Fully connected net: input -> 3 hidden -> output.

    forward() caches activations; backward() consumes the cache and
    returns exact gradients for every parameter plus the gradient with
    respect to the input (needed to push critic gradients into the
    actor).
    """

    def __init__(self, sizes: list[int], out_activation: str | None = None,
                 rng: np.random.Generator | None = None):
        if len(sizes) != 5:
            raise ValueError(f"expected 5 layer sizes, got {len(sizes)}")
        if out_activation not in (None, "tanh"):
            raise ValueError(f"unsupported output activation {out_activation!r}")
        self.sizes = list(sizes)
        self.out_activation = out_activation
        rng = rng or np.random.default_rng(0)
        self.weights = []
        self.biases = []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            self.weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
            self.biases.append(np.zeros(fan_out))
        self._cache = None

    @property
    def params(self) -> list[np.ndarray]:
        return self.weights + self.biases

    def set_params(self, params: list[np.ndarray]):
        n = len(self.weights)
        self.weights = [p.copy() for p in params[:n]]
        self.biases = [p.copy() for p in params[n:]]

    def forward(self, x: np.ndarray, cache: bool = False) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.sizes[0]:
            raise ValueError(
                f"input width {x.shape[1]} does not match layer 0 size {self.sizes[0]}")
        activations = [x]
        pre = []
        h = x
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = h @ w + b
            pre.append(z)
            if i < last:
                h = np.maximum(z, 0.0)
            elif self.out_activation == "tanh":
                h = np.tanh(z)
            else:
                h = z
            activations.append(h)
        if cache:
            self._cache = (activations, pre)
        return h

    def backward(self, grad_out: np.ndarray) -> tuple[list[np.ndarray], np.ndarray]:
        """Gradients of a scalar loss given d loss / d output.

        Returns (param_grads ordered like .params, grad_wrt_input).
        """
        if self._cache is None:
            raise RuntimeError("backward called without a cached forward pass")
        activations, pre = self._cache
        grad = np.atleast_2d(np.asarray(grad_out, dtype=float))
        w_grads = [None] * len(self.weights)
        b_grads = [None] * len(self.biases)
        last = len(self.weights) - 1
        for i in range(last, -1, -1):
            if i == last and self.out_activation == "tanh":
                grad = grad * (1.0 - activations[-1] ** 2)
            elif i < last:
                grad = grad * (pre[i] > 0)
            w_grads[i] = activations[i].T @ grad
            b_grads[i] = grad.sum(axis=0)
            grad = grad @ self.weights[i].T
        self._cache = None
        return w_grads + b_grads, grad

    def copy(self) -> "MLP":
        clone = MLP.__new__(MLP)
        clone.sizes = list(self.sizes)
        clone.out_activation = self.out_activation
        clone.weights = [w.copy() for w in self.weights]
        clone.biases = [b.copy() for b in self.biases]
        clone._cache = None
        return clone


class Adam:
    """Adaptive moment estimation with the standard decay constants."""

    def __init__(self, params: list[np.ndarray], lr: float = 1e-3,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]):
        self.t += 1
        b1t = 1.0 - self.beta1 ** self.t
        b2t = 1.0 - self.beta2 ** self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.lr * (m / b1t) / (np.sqrt(v / b2t) + self.eps)


class RunningNormalizer:
    """Streaming mean/variance with clipped standardization."""

    def __init__(self, size: int, clip: float = 5.0, eps: float = 1e-4):
        self.size = size
        self.clip = clip
        self.eps = eps
        self.total = np.zeros(size)
        self.total_sq = np.zeros(size)
        self.count = 0.0

    def update(self, batch: np.ndarray):
        batch = np.atleast_2d(batch)
        self.total += batch.sum(axis=0)
        self.total_sq += (batch ** 2).sum(axis=0)
        self.count += batch.shape[0]

    @property
    def mean(self) -> np.ndarray:
        if self.count == 0:
            return np.zeros(self.size)
        return self.total / self.count

    @property
    def std(self) -> np.ndarray:
        if self.count == 0:
            return np.ones(self.size)
        var = self.total_sq / self.count - self.mean ** 2
        return np.sqrt(np.maximum(var, self.eps ** 2))

    def normalize(self, x: np.ndarray) -> np.ndarray:
        return np.clip((x - self.mean) / self.std, -self.clip, self.clip)
