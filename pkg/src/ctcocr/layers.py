"""Differentiable building blocks with hand-written forward/backward passes.

Everything runs on float64 numpy arrays with an explicit batch dimension.
Layers cache what the backward pass needs on ``self``; gradients accumulate
into each parameter's ``grad`` buffer until :func:`zero_grads` clears them.
Stride-1 convolutions plus pooling cover the downsampling this package uses.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import ConfigError


@dataclass
class ParamArray:
    """Named parameter with a same-shape gradient accumulator."""

    name: str
    values: np.ndarray
    trainable: bool = True
    grad: np.ndarray = field(init=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        self.grad = np.zeros_like(self.values)


def init_uniform(rng: np.random.Generator, shape, fan_in: int) -> np.ndarray:
    """Uniform +-1/sqrt(fan_in) init."""
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)


def zero_grads(params) -> None:
    for p in params:
        p.grad[...] = 0.0


def _sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    e = np.exp(x[~pos])
    out[~pos] = e / (1.0 + e)
    return out


class Conv2d:
    """Stride-1 2-D convolution with zero padding."""

    def __init__(self, name, in_ch, out_ch, kernel=(3, 3), padding=(1, 1), bias=True, rng=None):
        kh, kw = kernel
        fan_in = in_ch * kh * kw
        self.kernel = kernel
        self.padding = padding
        self.w = ParamArray(f"{name}.w", init_uniform(rng, (out_ch, in_ch, kh, kw), fan_in))
        self.b = ParamArray(f"{name}.b", np.zeros(out_ch)) if bias else None
        self._cache = None

    def params(self):
        return [self.w] + ([self.b] if self.b is not None else [])

    def out_size(self, h, w):
        kh, kw = self.kernel
        ph, pw = self.padding
        return h + 2 * ph - kh + 1, w + 2 * pw - kw + 1

    def forward(self, x, train=False):
        b, c, h, w = x.shape
        kh, kw = self.kernel
        ph, pw = self.padding
        oh, ow = self.out_size(h, w)
        if oh < 1 or ow < 1:
            raise ConfigError(f"conv input {h}x{w} too small for kernel {self.kernel}")
        xp = np.pad(x, ((0, 0), (0, 0), (ph, ph), (pw, pw)))
        # gather patches in (b, c*kh*kw, oh*ow) layout: the reshape into the
        # stacked matmul below is then copy-free
        cols = np.empty((b, c, kh, kw, oh, ow))
        for ky in range(kh):
            for kx in range(kw):
                cols[:, :, ky, kx] = xp[:, :, ky : ky + oh, kx : kx + ow]
        cols = cols.reshape(b, c * kh * kw, oh * ow)
        out = self.w.values.reshape(self.w.values.shape[0], -1) @ cols  # b,o,oh*ow
        if self.b is not None:
            out += self.b.values[:, None]
        self._cache = (cols, (b, c, h, w), (oh, ow))
        return out.reshape(b, -1, oh, ow)

    def backward(self, dout):
        cols, (b, c, h, w), (oh, ow) = self._cache
        kh, kw = self.kernel
        ph, pw = self.padding
        o = dout.shape[1]
        dflat = dout.reshape(b, o, oh * ow)
        dw = np.matmul(dflat, cols.transpose(0, 2, 1)).sum(axis=0)
        self.w.grad += dw.reshape(self.w.values.shape)
        if self.b is not None:
            self.b.grad += dflat.sum(axis=(0, 2))
        w2 = self.w.values.reshape(o, -1)
        dcols = (w2.T @ dflat).reshape(b, c, kh, kw, oh, ow)
        dxp = np.zeros((b, c, h + 2 * ph, w + 2 * pw))
        for ky in range(kh):
            for kx in range(kw):
                dxp[:, :, ky : ky + oh, kx : kx + ow] += dcols[:, :, ky, kx]
        return dxp[:, :, ph : ph + h, pw : pw + w]


class MaxPool2d:
    """Max pooling; padded cells hold -inf so they are never selected."""

    def __init__(self, kernel, stride=None, padding=(0, 0)):
        self.kernel = kernel
        self.stride = stride if stride is not None else kernel
        self.padding = padding
        self._cache = None

    def params(self):
        return []

    def out_size(self, h, w):
        kh, kw = self.kernel
        sh, sw = self.stride
        ph, pw = self.padding
        return (h + 2 * ph - kh) // sh + 1, (w + 2 * pw - kw) // sw + 1

    def forward(self, x, train=False):
        b, c, h, w = x.shape
        kh, kw = self.kernel
        sh, sw = self.stride
        ph, pw = self.padding
        oh, ow = self.out_size(h, w)
        if oh < 1 or ow < 1:
            raise ConfigError(f"pool input {h}x{w} too small for kernel {self.kernel}")
        xp = np.pad(x, ((0, 0), (0, 0), (ph, ph), (pw, pw)), constant_values=-np.inf)
        win = sliding_window_view(xp, (kh, kw), axis=(2, 3))[:, :, ::sh, ::sw]
        flat = win.reshape(b, c, oh, ow, kh * kw)
        arg = flat.argmax(axis=-1)
        out = np.take_along_axis(flat, arg[..., None], axis=-1)[..., 0]
        self._cache = (arg, (b, c, h, w), (oh, ow))
        return out

    def backward(self, dout):
        arg, (b, c, h, w), (oh, ow) = self._cache
        kh, kw = self.kernel
        sh, sw = self.stride
        ph, pw = self.padding
        rows = (np.arange(oh) * sh)[None, None, :, None] + arg // kw
        cols = (np.arange(ow) * sw)[None, None, None, :] + arg % kw
        bidx = np.arange(b)[:, None, None, None]
        cidx = np.arange(c)[None, :, None, None]
        dxp = np.zeros((b, c, h + 2 * ph, w + 2 * pw))
        np.add.at(dxp, (bidx, cidx, rows, cols), dout)
        return dxp[:, :, ph : ph + h, pw : pw + w]


class Relu:
    def __init__(self):
        self._mask = None

    def params(self):
        return []

    def out_size(self, h, w):
        return h, w

    def forward(self, x, train=False):
        self._mask = x > 0
        return np.maximum(x, 0.0)

    def backward(self, dout):
        return dout * self._mask


class BatchNorm2d:
    """Per-channel batch normalization over (batch, height, width).

    Training normalizes with batch statistics and maintains running averages
    (momentum 0.1); inference normalizes with the running averages.  The
    running buffers are non-trainable parameters so checkpoints carry them.
    """

    EPS = 1e-5
    MOMENTUM = 0.1

    def __init__(self, name, ch):
        self.gamma = ParamArray(f"{name}.gamma", np.ones(ch))
        self.beta = ParamArray(f"{name}.beta", np.zeros(ch))
        self.running_mean = ParamArray(f"{name}.running_mean", np.zeros(ch), trainable=False)
        self.running_var = ParamArray(f"{name}.running_var", np.ones(ch), trainable=False)
        self._cache = None

    def params(self):
        return [self.gamma, self.beta, self.running_mean, self.running_var]

    def out_size(self, h, w):
        return h, w

    def forward(self, x, train=False):
        b, c, h, w = x.shape
        if train:
            m = b * h * w
            mean = np.einsum("bchw->c", x) / m
            var = np.einsum("bchw,bchw->c", x, x) / m - mean * mean
            np.maximum(var, 0.0, out=var)
            self.running_mean.values *= 1.0 - self.MOMENTUM
            self.running_mean.values += self.MOMENTUM * mean
            self.running_var.values *= 1.0 - self.MOMENTUM
            self.running_var.values += self.MOMENTUM * var
        else:
            mean = self.running_mean.values
            var = self.running_var.values
        inv_std = 1.0 / np.sqrt(var + self.EPS)
        xhat = x - mean[:, None, None]
        xhat *= inv_std[:, None, None]
        out = xhat * self.gamma.values[:, None, None]
        out += self.beta.values[:, None, None]
        self._cache = (xhat, inv_std, train, x.shape)
        return out

    def backward(self, dout):
        xhat, inv_std, train, shape = self._cache
        self.gamma.grad += np.einsum("bchw,bchw->c", dout, xhat)
        self.beta.grad += np.einsum("bchw->c", dout)
        dxhat = dout * self.gamma.values[:, None, None]
        if not train:
            dxhat *= inv_std[:, None, None]
            return dxhat
        b, c, h, w = shape
        m = b * h * w
        s1 = np.einsum("bchw->c", dxhat)
        s2 = np.einsum("bchw,bchw->c", dxhat, xhat)
        dx = dxhat
        dx -= s1[:, None, None] / m
        dx -= xhat * (s2[:, None, None] / m)
        dx *= inv_std[:, None, None]
        return dx


class Linear:
    """Affine map applied to the last axis."""

    def __init__(self, name, d_in, d_out, rng=None):
        self.w = ParamArray(f"{name}.w", init_uniform(rng, (d_in, d_out), d_in))
        self.b = ParamArray(f"{name}.b", np.zeros(d_out))
        self._cache = None

    def params(self):
        return [self.w, self.b]

    def forward(self, x, train=False):
        self._cache = x
        return x @ self.w.values + self.b.values

    def backward(self, dout):
        x = self._cache
        x2 = x.reshape(-1, x.shape[-1])
        d2 = dout.reshape(-1, dout.shape[-1])
        self.w.grad += x2.T @ d2
        self.b.grad += d2.sum(axis=0)
        return dout @ self.w.values.T


class LstmDirection:
    """Single-direction LSTM over (batch, time, features).

    Gate order in the fused weight matrices is input, forget, candidate,
    output.  The forget-gate bias starts at 1.0.
    """

    def __init__(self, name, d_in, hidden, rng=None):
        self.hidden = hidden
        self.wx = ParamArray(f"{name}.wx", init_uniform(rng, (d_in, 4 * hidden), d_in))
        self.wh = ParamArray(f"{name}.wh", init_uniform(rng, (hidden, 4 * hidden), hidden))
        b = np.zeros(4 * hidden)
        b[hidden : 2 * hidden] = 1.0
        self.b = ParamArray(f"{name}.b", b)
        self._cache = None

    def params(self):
        return [self.wx, self.wh, self.b]

    def forward(self, x, train=False):
        b, t, _ = x.shape
        hid = self.hidden
        xz = x @ self.wx.values + self.b.values
        h_prev = np.zeros((b, hid))
        c_prev = np.zeros((b, hid))
        gates = np.empty((b, t, 4 * hid))
        cells = np.empty((b, t, hid))
        tanh_c = np.empty((b, t, hid))
        hs = np.empty((b, t, hid))
        for step in range(t):
            z = xz[:, step] + h_prev @ self.wh.values
            i = _sigmoid(z[:, :hid])
            f = _sigmoid(z[:, hid : 2 * hid])
            g = np.tanh(z[:, 2 * hid : 3 * hid])
            o = _sigmoid(z[:, 3 * hid :])
            c = f * c_prev + i * g
            tc = np.tanh(c)
            h_prev = o * tc
            gates[:, step, :hid] = i
            gates[:, step, hid : 2 * hid] = f
            gates[:, step, 2 * hid : 3 * hid] = g
            gates[:, step, 3 * hid :] = o
            cells[:, step] = c
            tanh_c[:, step] = tc
            hs[:, step] = h_prev
            c_prev = c
        self._cache = (x, gates, cells, tanh_c, hs)
        return hs

    def backward(self, dh_out):
        x, gates, cells, tanh_c, hs = self._cache
        b, t, hid = hs.shape
        dz_all = np.empty((b, t, 4 * hid))
        dh_next = np.zeros((b, hid))
        dc_next = np.zeros((b, hid))
        wh_t = self.wh.values.T
        for step in range(t - 1, -1, -1):
            i = gates[:, step, :hid]
            f = gates[:, step, hid : 2 * hid]
            g = gates[:, step, 2 * hid : 3 * hid]
            o = gates[:, step, 3 * hid :]
            tc = tanh_c[:, step]
            c_prev = cells[:, step - 1] if step > 0 else np.zeros((b, hid))
            dh = dh_out[:, step] + dh_next
            dc = dc_next + dh * o * (1.0 - tc * tc)
            dz = dz_all[:, step]
            dz[:, :hid] = dc * g * i * (1.0 - i)
            dz[:, hid : 2 * hid] = dc * c_prev * f * (1.0 - f)
            dz[:, 2 * hid : 3 * hid] = dc * i * (1.0 - g * g)
            dz[:, 3 * hid :] = dh * tc * o * (1.0 - o)
            dh_next = dz @ wh_t
            dc_next = dc * f
        h_prev_all = np.concatenate([np.zeros((b, 1, hid)), hs[:, :-1]], axis=1)
        self.wx.grad += x.reshape(b * t, -1).T @ dz_all.reshape(b * t, -1)
        self.wh.grad += h_prev_all.reshape(b * t, hid).T @ dz_all.reshape(b * t, -1)
        self.b.grad += dz_all.sum(axis=(0, 1))
        return dz_all @ self.wx.values.T


def reverse_padded(x: np.ndarray, lengths) -> np.ndarray:
    """Reverse each sequence within its own length; padding stays in place.

    Involutive, so it is its own gradient transform.
    """
    b, t, _ = x.shape
    steps = np.arange(t)[None, :]
    ln = np.asarray(lengths)[:, None]
    idx = np.where(steps < ln, ln - 1 - steps, steps)
    return x[np.arange(b)[:, None], idx]


class BiLstm:
    """Bidirectional LSTM layer; per-frame concat of both directions."""

    def __init__(self, name, d_in, hidden, rng=None):
        self.fwd = LstmDirection(f"{name}.fwd", d_in, hidden, rng)
        self.bwd = LstmDirection(f"{name}.bwd", d_in, hidden, rng)
        self.hidden = hidden
        self._lengths = None

    def params(self):
        return self.fwd.params() + self.bwd.params()

    def forward(self, x, lengths=None, train=False):
        if lengths is None:
            lengths = np.full(x.shape[0], x.shape[1], dtype=np.int64)
        self._lengths = lengths
        hf = self.fwd.forward(x, train)
        hb = reverse_padded(self.bwd.forward(reverse_padded(x, lengths), train), lengths)
        return np.concatenate([hf, hb], axis=2)

    def backward(self, dout):
        hid = self.hidden
        dxf = self.fwd.backward(dout[:, :, :hid])
        dxb = reverse_padded(
            self.bwd.backward(reverse_padded(dout[:, :, hid:], self._lengths)), self._lengths
        )
        return dxf + dxb


class BiLstmStack:
    """J stacked bidirectional LSTM layers."""

    def __init__(self, name, d_in, hidden, n_layers, rng=None):
        self.layers = []
        d = d_in
        for j in range(n_layers):
            self.layers.append(BiLstm(f"{name}.l{j}", d, hidden, rng))
            d = 2 * hidden
        self.d_out = d

    def params(self):
        out = []
        for layer in self.layers:
            out.extend(layer.params())
        return out

    def forward(self, x, lengths=None, train=False):
        for layer in self.layers:
            x = layer.forward(x, lengths, train)
        return x

    def backward(self, dout):
        for layer in reversed(self.layers):
            dout = layer.backward(dout)
        return dout


class ConvStack:
    """Sequential container for conv/pool/norm/activation layers."""

    def __init__(self, layers):
        self.layers = list(layers)

    def params(self):
        out = []
        for layer in self.layers:
            out.extend(layer.params())
        return out

    def out_size(self, h, w):
        for layer in self.layers:
            h, w = layer.out_size(h, w)
        return h, w

    def forward(self, x, train=False):
        for layer in self.layers:
            x = layer.forward(x, train)
        return x

    def backward(self, dout):
        for layer in reversed(self.layers):
            dout = layer.backward(dout)
        return dout
