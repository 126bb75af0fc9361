"""Recurrent network for run-off prediction, written directly on numpy.

Architecture is fixed: one recurrent layer (sigmoid input/forget/output
gates, tanh candidate and output squashing) feeding a dense head of
64 (linear) -> 32 (ReLU) -> 1 (linear). The hidden size is 128 in the
operational preset; tests exercise small nets, which share every code path.
Parameter count must equal the closed form

    4*H*(D + H + 1) + (H + 1)*64 + 65*32 + 33

and is checked at construction. Forward caches every intermediate needed
for exact backpropagation through time; gradients are float64 throughout
so the finite-difference check is meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from lagoontwin.errors import UsageError

HEAD1 = 64
HEAD2 = 32

GATE_NAMES = ("i", "f", "g", "o")


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    positive = x >= 0
    out[positive] = 1.0 / (1.0 + np.exp(-x[positive]))
    exp_x = np.exp(x[~positive])
    out[~positive] = exp_x / (1.0 + exp_x)
    return out


def parameter_count(input_width: int, hidden: int) -> int:
    return (
        4 * hidden * (input_width + hidden + 1)
        + (hidden + 1) * HEAD1
        + (HEAD1 + 1) * HEAD2
        + (HEAD2 + 1) * 1
    )


@dataclass
class LstmNetwork:
    input_width: int
    hidden: int = 128
    params: dict[str, np.ndarray] = field(default_factory=dict)
    version: int = 0  # bumped on every parameter update; caches carry it

    def __post_init__(self) -> None:
        if self.input_width < 1 or self.hidden < 1:
            raise UsageError("input width and hidden size must be >= 1")
        if not self.params:
            self.params = self._zero_params()
        actual = sum(p.size for p in self.params.values())
        expected = parameter_count(self.input_width, self.hidden)
        if actual != expected:
            raise UsageError(
                f"parameter count {actual} != closed form {expected} "
                f"for widths ({self.input_width}, {self.hidden}, {HEAD1}, {HEAD2}, 1)"
            )
        for name, p in self.params.items():
            if not np.isfinite(p).all():
                raise UsageError(f"non-finite parameter tensor {name}")

    def _zero_params(self) -> dict[str, np.ndarray]:
        d, h = self.input_width, self.hidden
        params: dict[str, np.ndarray] = {}
        for gate in GATE_NAMES:
            params[f"W_{gate}"] = np.zeros((h, d))
            params[f"U_{gate}"] = np.zeros((h, h))
            params[f"b_{gate}"] = np.zeros(h)
        params["head1_W"] = np.zeros((HEAD1, h))
        params["head1_b"] = np.zeros(HEAD1)
        params["head2_W"] = np.zeros((HEAD2, HEAD1))
        params["head2_b"] = np.zeros(HEAD2)
        params["head3_W"] = np.zeros((1, HEAD2))
        params["head3_b"] = np.zeros(1)
        return params

    @classmethod
    def initialized(cls, input_width: int, hidden: int = 128, seed: int = 0) -> "LstmNetwork":
        """Seeded scaled-uniform init; forget-gate bias starts at 1."""
        rng = np.random.default_rng(seed)
        net = cls(input_width=input_width, hidden=hidden)

        def init(shape: tuple[int, ...], fan_in: int) -> np.ndarray:
            bound = 1.0 / np.sqrt(fan_in)
            return rng.uniform(-bound, bound, size=shape)

        d, h = input_width, hidden
        for gate in GATE_NAMES:
            net.params[f"W_{gate}"] = init((h, d), d)
            net.params[f"U_{gate}"] = init((h, h), h)
        net.params["b_f"] = np.ones(h)
        net.params["head1_W"] = init((HEAD1, h), h)
        net.params["head2_W"] = init((HEAD2, HEAD1), HEAD1)
        net.params["head3_W"] = init((1, HEAD2), HEAD2)
        return net

    def parameter_total(self) -> int:
        return sum(p.size for p in self.params.values())

    def copy(self) -> "LstmNetwork":
        return LstmNetwork(
            input_width=self.input_width,
            hidden=self.hidden,
            params={k: v.copy() for k, v in self.params.items()},
            version=self.version,
        )

    def apply_update(self, delta: dict[str, np.ndarray]) -> None:
        for name, d in delta.items():
            self.params[name] += d
        self.version += 1


@dataclass
class ForwardCache:
    inputs: np.ndarray          # (W, D)
    gate_values: dict[str, np.ndarray]  # per gate: (W, H) post-activation
    c: np.ndarray               # (W, H) cell states
    tanh_c: np.ndarray          # (W, H)
    h: np.ndarray               # (W, H) hidden states
    a1: np.ndarray              # (HEAD1,) linear head activations
    z2: np.ndarray              # (HEAD2,) pre-ReLU
    a2: np.ndarray              # (HEAD2,) post-ReLU
    output: float
    net_version: int


def lstm_forward(net: LstmNetwork, sequence: np.ndarray) -> tuple[float, ForwardCache]:
    sequence = np.asarray(sequence, dtype=np.float64)
    if sequence.ndim != 2 or sequence.shape[0] == 0:
        raise UsageError("sequence must be a nonempty (steps, width) array")
    if sequence.shape[1] != net.input_width:
        raise UsageError(
            f"sequence width {sequence.shape[1]} != network input width {net.input_width}"
        )
    steps = sequence.shape[0]
    p = net.params
    h_state = np.zeros(net.hidden)
    c_state = np.zeros(net.hidden)
    gates = {gate: np.empty((steps, net.hidden)) for gate in GATE_NAMES}
    cs = np.empty((steps, net.hidden))
    tanh_cs = np.empty((steps, net.hidden))
    hs = np.empty((steps, net.hidden))
    for t in range(steps):
        x = sequence[t]
        i = _sigmoid(p["W_i"] @ x + p["U_i"] @ h_state + p["b_i"])
        f = _sigmoid(p["W_f"] @ x + p["U_f"] @ h_state + p["b_f"])
        g = np.tanh(p["W_g"] @ x + p["U_g"] @ h_state + p["b_g"])
        o = _sigmoid(p["W_o"] @ x + p["U_o"] @ h_state + p["b_o"])
        c_state = f * c_state + i * g
        tanh_c = np.tanh(c_state)
        h_state = o * tanh_c
        gates["i"][t], gates["f"][t], gates["g"][t], gates["o"][t] = i, f, g, o
        cs[t], tanh_cs[t], hs[t] = c_state, tanh_c, h_state

    a1 = p["head1_W"] @ h_state + p["head1_b"]
    z2 = p["head2_W"] @ a1 + p["head2_b"]
    a2 = np.maximum(0.0, z2)
    output = float((p["head3_W"] @ a2 + p["head3_b"])[0])
    cache = ForwardCache(
        inputs=sequence,
        gate_values=gates,
        c=cs,
        tanh_c=tanh_cs,
        h=hs,
        a1=a1,
        z2=z2,
        a2=a2,
        output=output,
        net_version=net.version,
    )
    return output, cache


def lstm_backward(
    net: LstmNetwork, cache: ForwardCache, output_gradient: float
) -> dict[str, np.ndarray]:
    """Exact gradients w.r.t. every parameter, given dLoss/dOutput."""
    if cache.net_version != net.version:
        raise UsageError("stale cache: network parameters changed since forward")
    p = net.params
    grads = {name: np.zeros_like(tensor) for name, tensor in p.items()}
    dy = float(output_gradient)

    grads["head3_W"] += dy * cache.a2[None, :]
    grads["head3_b"] += np.array([dy])
    da2 = dy * p["head3_W"][0]
    dz2 = da2 * (cache.z2 > 0)
    grads["head2_W"] += np.outer(dz2, cache.a1)
    grads["head2_b"] += dz2
    da1 = p["head2_W"].T @ dz2
    grads["head1_W"] += np.outer(da1, cache.h[-1])
    grads["head1_b"] += da1
    dh = p["head1_W"].T @ da1

    steps = cache.inputs.shape[0]
    dc = np.zeros(net.hidden)
    for t in range(steps - 1, -1, -1):
        i, f, g, o = (cache.gate_values[k][t] for k in GATE_NAMES)
        tanh_c = cache.tanh_c[t]
        c_prev = cache.c[t - 1] if t > 0 else np.zeros(net.hidden)
        h_prev = cache.h[t - 1] if t > 0 else np.zeros(net.hidden)
        do = dh * tanh_c
        dc = dc + dh * o * (1.0 - tanh_c**2)
        di = dc * g
        dg = dc * i
        df = dc * c_prev
        pre = {
            "i": di * i * (1.0 - i),
            "f": df * f * (1.0 - f),
            "g": dg * (1.0 - g**2),
            "o": do * o * (1.0 - o),
        }
        x = cache.inputs[t]
        dh = np.zeros(net.hidden)
        for gate in GATE_NAMES:
            grads[f"W_{gate}"] += np.outer(pre[gate], x)
            grads[f"U_{gate}"] += np.outer(pre[gate], h_prev)
            grads[f"b_{gate}"] += pre[gate]
            dh += p[f"U_{gate}"].T @ pre[gate]
        dc = dc * f
    return grads


def clamp_nonnegative(values):
    """max(0, x) elementwise; the physical floor for streamflow.
    Negative zero comes out as +0.0."""
    values = np.asarray(values, dtype=np.float64)
    return np.where(values <= 0.0, 0.0, values)
