"""Minimal dense feed-forward networks.

Exactly the learning machinery the policy optimizer needs: orthogonal
initialization, forward evaluation, reverse-mode gradients through the
chain rule, and Adam updates on a flat parameter vector. All arithmetic
is float64.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, InputError, NumericalError

ACTIVATIONS = ("tanh", "sigmoid", "identity")


@dataclass(frozen=True)
class LayerSpec:
    """One dense layer: sizes, activation and initialization gain."""

    input_size: int
    output_size: int
    activation: str = "tanh"
    init_gain: float = 1.0

    def __post_init__(self):
        if self.input_size < 1 or self.output_size < 1:
            raise ConfigurationError("layer sizes must be positive")
        if self.activation not in ACTIVATIONS:
            raise ConfigurationError(f"unknown activation {self.activation!r}")
        if not self.init_gain > 0:
            raise ConfigurationError("init_gain must be positive")


def mlp_spec(input_size, hidden_sizes, output_size, output_activation,
             output_gain=1e-2):
    """Layer specs for a tanh-hidden MLP with a gained output layer.

    Hidden layers use tanh with unit gain; the output layer uses the given
    activation with a small gain so fresh networks start near the neutral
    output (0 for tanh, 0.5 for sigmoid).
    """
    sizes = [int(input_size), *[int(h) for h in hidden_sizes], int(output_size)]
    specs = []
    for i in range(len(sizes) - 1):
        last = i == len(sizes) - 2
        specs.append(LayerSpec(
            sizes[i], sizes[i + 1],
            activation=output_activation if last else "tanh",
            init_gain=output_gain if last else 1.0,
        ))
    return specs


class Network:
    """A dense MLP whose parameters live in one flat float64 vector.

    Per layer the flat vector holds the row-major weight matrix followed by
    the bias; ``weights``/``biases`` expose writable views into it, so a
    single vectorized Adam update moves every parameter.
    """

    def __init__(self, specs, flat_params):
        specs = tuple(specs)
        if not specs:
            raise ConfigurationError("network needs at least one layer")
        for a, b in zip(specs, specs[1:]):
            if a.output_size != b.input_size:
                raise ConfigurationError(
                    f"layer size mismatch: {a.output_size} -> {b.input_size}")
        self.specs = specs
        self.params = np.asarray(flat_params, dtype=float)
        if self.params.ndim != 1 or self.params.size != parameter_count(specs):
            raise ConfigurationError("flat parameter vector has wrong length")
        self.weights = []
        self.biases = []
        offset = 0
        for s in specs:
            n_w = s.output_size * s.input_size
            self.weights.append(
                self.params[offset:offset + n_w].reshape(s.output_size, s.input_size))
            offset += n_w
            self.biases.append(self.params[offset:offset + s.output_size])
            offset += s.output_size

    @property
    def input_size(self):
        return self.specs[0].input_size

    @property
    def output_size(self):
        return self.specs[-1].output_size

    @property
    def parameter_count(self):
        return self.params.size

    def copy(self):
        return Network(self.specs, self.params.copy())


def parameter_count(specs):
    return sum(s.output_size * (s.input_size + 1) for s in specs)


def _orthogonal(rows, cols, gain, rng):
    # QR of a Gaussian matrix, sign-corrected so the factor is Haar
    # distributed; rectangular layers keep orthonormal rows or columns.
    a = rng.standard_normal((rows, cols))
    transpose = rows < cols
    if transpose:
        a = a.T
    q, r = np.linalg.qr(a)
    q = q * np.sign(np.diag(r))
    if transpose:
        q = q.T
    return gain * q


def init_network(specs, seed):
    """Create a network with orthogonal weights and zero biases.

    Deterministic given (specs, seed).
    """
    specs = tuple(specs)
    rng = np.random.default_rng(seed)
    net = Network(specs, np.zeros(parameter_count(specs)))
    for i, s in enumerate(specs):
        net.weights[i][...] = _orthogonal(s.output_size, s.input_size, s.init_gain, rng)
    return net


def set_output_bias(net, values):
    """Overwrite the output-layer bias (start-point injection)."""
    values = np.asarray(values, dtype=float)
    if values.shape != net.biases[-1].shape:
        raise InputError("bias length does not match output size")
    net.biases[-1][...] = values


def _activate(z, kind):
    if kind == "tanh":
        return np.tanh(z)
    if kind == "sigmoid":
        return 1.0 / (1.0 + np.exp(-z))
    return z


def _activation_grad(a, kind):
    # Derivative w.r.t. the pre-activation, from the post-activation value.
    if kind == "tanh":
        return 1.0 - a * a
    if kind == "sigmoid":
        return a * (1.0 - a)
    return np.ones_like(a)


def forward(net, x):
    """Evaluate the network; does not mutate it."""
    y, _ = forward_with_trace(net, x)
    return y


def forward_with_trace(net, x):
    """Forward pass returning the output and per-layer activations.

    The trace is the list of activations [input, a_1, ..., a_L] consumed by
    :func:`backward`.
    """
    a = np.asarray(x, dtype=float)
    if a.shape != (net.input_size,):
        raise InputError(
            f"input length {a.shape} does not match first layer ({net.input_size},)")
    trace = [a]
    for w, b, s in zip(net.weights, net.biases, net.specs):
        a = _activate(w @ a + b, s.activation)
        trace.append(a)
    return a, trace


def backward(net, x, output_gradient, trace=None):
    """Gradient of (output . output_gradient) w.r.t. the flat parameters.

    Plain reverse-mode chain rule, one layer at a time.
    """
    g = np.asarray(output_gradient, dtype=float)
    if g.shape != (net.output_size,):
        raise InputError("output_gradient length does not match output size")
    if trace is None:
        _, trace = forward_with_trace(net, x)
    grad = np.empty_like(net.params)
    offset = grad.size
    delta = g * _activation_grad(trace[-1], net.specs[-1].activation)
    for i in range(len(net.specs) - 1, -1, -1):
        offset -= net.specs[i].output_size
        grad[offset:offset + net.specs[i].output_size] = delta
        n_w = net.specs[i].output_size * net.specs[i].input_size
        offset -= n_w
        grad[offset:offset + n_w] = np.outer(delta, trace[i]).ravel()
        if i > 0:
            delta = (net.weights[i].T @ delta) * _activation_grad(
                trace[i], net.specs[i - 1].activation)
    return grad


@dataclass
class AdamState:
    """Adam accumulator for one network's flat parameter vector."""

    first_moment: np.ndarray
    second_moment: np.ndarray
    step_count: int = 0
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_network(cls, net, learning_rate, beta1=0.9, beta2=0.999, eps=1e-8):
        n = net.parameter_count
        return cls(np.zeros(n), np.zeros(n), 0, learning_rate, beta1, beta2, eps)


def adam_step(net, gradient, state):
    """One bias-corrected Adam step along +gradient (in place).

    The sign convention is the caller's: this toolkit maximizes its policy
    loss, so callers pass the ascent gradient.
    """
    gradient = np.asarray(gradient, dtype=float)
    if gradient.shape != net.params.shape:
        raise InputError("gradient length does not match parameter count")
    if not np.all(np.isfinite(gradient)):
        raise NumericalError("non-finite gradient entries; update rejected")
    state.step_count += 1
    t = state.step_count
    state.first_moment *= state.beta1
    state.first_moment += (1.0 - state.beta1) * gradient
    state.second_moment *= state.beta2
    state.second_moment += (1.0 - state.beta2) * gradient * gradient
    m_hat = state.first_moment / (1.0 - state.beta1 ** t)
    v_hat = state.second_moment / (1.0 - state.beta2 ** t)
    net.params += state.learning_rate * m_hat / (np.sqrt(v_hat) + state.eps)
    return net, state
