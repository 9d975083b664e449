"""The four recognizer configurations and their shared plumbing.

Every configuration maps a height-32 grayscale image to a posteriorgram:

* ``col_rnn``  - one frame per pixel column, bidirectional LSTM encoder
* ``win_rnn``  - sliding-window pixel frames, bidirectional LSTM encoder
* ``cnn_only`` - convolutional feature map reshaped to a sequence, identity
  encoder
* ``crnn``     - convolutional features followed by the LSTM encoder

followed in all cases by a per-frame linear projection to the augmented
alphabet size and a softmax.  Right-to-left models mirror the image before
feature extraction, so a right-to-left posteriorgram of an image equals the
left-to-right posteriorgram of its mirror, exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .ctc import Posteriorgram
from .errors import ConfigError
from .imaging import Direction, GrayImage, WindowConfig, extract_windows
from .layers import (
    BatchNorm2d,
    BiLstmStack,
    Conv2d,
    ConvStack,
    Linear,
    MaxPool2d,
    ParamArray,
    Relu,
    zero_grads,
)

KINDS = ("col_rnn", "win_rnn", "cnn_only", "crnn")

INPUT_HEIGHT = 32


@dataclass(frozen=True)
class RnnConfig:
    """Bidirectional LSTM stack geometry: per-frame encoding is 2*hidden."""

    layers: int = 2
    hidden: int = 256
    bidirectional: bool = True

    def __post_init__(self):
        if self.layers < 1 or self.hidden < 1:
            raise ConfigError("rnn layers and hidden size must be >= 1")
        if not self.bidirectional:
            raise ConfigError("only bidirectional encoders are supported")

    @property
    def encoding_size(self) -> int:
        return 2 * self.hidden


@dataclass(frozen=True)
class CnnConfig:
    """Convolutional feature extractor: the 7-conv stack or a small 2-conv
    variant for desk-scale experiments."""

    arch: str = "crnn7"
    channels: tuple[int, ...] = (8, 16)  # tiny arch only

    def __post_init__(self):
        if self.arch not in ("crnn7", "tiny"):
            raise ConfigError(f"unknown cnn arch {self.arch!r}")
        if self.arch == "tiny" and len(self.channels) != 2:
            raise ConfigError("tiny cnn takes exactly two channel counts")


@dataclass(frozen=True)
class CnnFeatureMap:
    """W' x H' x C' convolutional feature map."""

    values: np.ndarray

    @property
    def width(self) -> int:
        return self.values.shape[0]

    @property
    def height(self) -> int:
        return self.values.shape[1]

    @property
    def channels(self) -> int:
        return self.values.shape[2]


@dataclass(frozen=True)
class ModelConfig:
    kind: str
    alphabet_size: int
    rnn: RnnConfig | None = None
    window: WindowConfig | None = None
    cnn: CnnConfig | None = None
    direction: Direction = "ltr"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown model kind {self.kind!r}")
        if self.alphabet_size < 2:
            raise ConfigError("alphabet size including blank must be >= 2")
        needs_rnn = self.kind != "cnn_only"
        if needs_rnn and self.rnn is None:
            raise ConfigError(f"{self.kind} requires an rnn config")
        if not needs_rnn and self.rnn is not None:
            raise ConfigError("cnn_only takes no rnn config")
        if (self.kind == "win_rnn") != (self.window is not None):
            raise ConfigError("window config required exactly for win_rnn")
        needs_cnn = self.kind in ("cnn_only", "crnn")
        if needs_cnn and self.cnn is None:
            raise ConfigError(f"{self.kind} requires a cnn config")
        if not needs_cnn and self.cnn is not None:
            raise ConfigError(f"{self.kind} takes no cnn config")
        if self.direction not in ("ltr", "rtl"):
            raise ConfigError(f"unknown direction {self.direction!r}")

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind, "alphabet_size": self.alphabet_size,
                   "direction": self.direction}
        if self.rnn is not None:
            d["rnn"] = {"layers": self.rnn.layers, "hidden": self.rnn.hidden}
        if self.window is not None:
            d["window"] = {"width": self.window.width, "step": self.window.step}
        if self.cnn is not None:
            d["cnn"] = {"arch": self.cnn.arch, "channels": list(self.cnn.channels)}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        rnn = RnnConfig(**d["rnn"]) if "rnn" in d else None
        window = WindowConfig(**d["window"]) if "window" in d else None
        cnn = None
        if "cnn" in d:
            cnn = CnnConfig(arch=d["cnn"]["arch"], channels=tuple(d["cnn"]["channels"]))
        return cls(kind=d["kind"], alphabet_size=d["alphabet_size"], rnn=rnn,
                   window=window, cnn=cnn, direction=d.get("direction", "ltr"))


def build_cnn(cfg: CnnConfig, rng: np.random.Generator) -> ConvStack:
    if cfg.arch == "tiny":
        c1, c2 = cfg.channels
        return ConvStack([
            Conv2d("cnn.conv1", 1, c1, bias=False, rng=rng),
            BatchNorm2d("cnn.bn1", c1),
            Relu(),
            MaxPool2d((2, 2)),
            Conv2d("cnn.conv2", c1, c2, bias=False, rng=rng),
            BatchNorm2d("cnn.bn2", c2),
            Relu(),
            MaxPool2d((2, 2)),
        ])
    # 7-conv stack: 3x3 kernels except a final 2x2, square pools then two
    # height-halving pools, batch-norm on the two 512-channel 3x3 convs
    return ConvStack([
        Conv2d("cnn.conv1", 1, 64, rng=rng),
        Relu(),
        MaxPool2d((2, 2)),
        Conv2d("cnn.conv2", 64, 128, rng=rng),
        Relu(),
        MaxPool2d((2, 2)),
        Conv2d("cnn.conv3", 128, 256, rng=rng),
        Relu(),
        Conv2d("cnn.conv4", 256, 256, rng=rng),
        Relu(),
        MaxPool2d((2, 2), stride=(2, 1), padding=(0, 1)),
        Conv2d("cnn.conv5", 256, 512, bias=False, rng=rng),
        BatchNorm2d("cnn.bn5", 512),
        Relu(),
        Conv2d("cnn.conv6", 512, 512, bias=False, rng=rng),
        BatchNorm2d("cnn.bn6", 512),
        Relu(),
        MaxPool2d((2, 2), stride=(2, 1), padding=(0, 1)),
        Conv2d("cnn.conv7", 512, 512, kernel=(2, 2), padding=(0, 0), rng=rng),
        Relu(),
    ])


def map_to_sequence(fmap: CnnFeatureMap) -> np.ndarray:
    """Reshape a W' x H' x C' map to a (T=W') x (D=H'*C') sequence.

    Frame t is column t of the map; within a frame, features are ordered
    height-major (index = h * C' + c).
    """
    w, h, c = fmap.values.shape
    return fmap.values.reshape(w, h * c).copy()


def map_from_sequence(seq: np.ndarray, height: int, channels: int) -> CnnFeatureMap:
    """Inverse of :func:`map_to_sequence`."""
    return CnnFeatureMap(seq.reshape(seq.shape[0], height, channels).copy())


class Recognizer:
    """One of the four configurations, with parameters and both passes.

    Batched calls pad images (white) or feature sequences to a common extent
    and report each sample's true frame count; the loss side is expected to
    only touch frames below those lengths, which keeps padded positions out
    of every gradient.
    """

    def __init__(self, cfg: ModelConfig, seed: int = 0):
        self.cfg = cfg
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        self.cnn = build_cnn(cfg.cnn, rng) if cfg.cnn is not None else None
        if self.cnn is not None:
            h_out, _ = self.cnn.out_size(INPUT_HEIGHT, 64)
            feat_dim = h_out * self._cnn_channels()
        elif cfg.kind == "col_rnn":
            feat_dim = INPUT_HEIGHT
        else:
            feat_dim = INPUT_HEIGHT * cfg.window.width
        self.feature_dim = feat_dim
        if cfg.rnn is not None:
            self.rnn = BiLstmStack("rnn", feat_dim, cfg.rnn.hidden, cfg.rnn.layers, rng)
            enc_dim = self.rnn.d_out
        else:
            self.rnn = None
            enc_dim = feat_dim
        self.head = Linear("head", enc_dim, cfg.alphabet_size, rng)

    def _cnn_channels(self) -> int:
        return 512 if self.cfg.cnn.arch == "crnn7" else self.cfg.cnn.channels[-1]

    def params(self) -> list[ParamArray]:
        out = []
        if self.cnn is not None:
            out.extend(self.cnn.params())
        if self.rnn is not None:
            out.extend(self.rnn.params())
        out.extend(self.head.params())
        return out

    def zero_grad(self) -> None:
        zero_grads(self.params())

    # ------------------------------------------------------------------
    # sequence-length contract

    def output_length(self, width: int) -> int:
        """Frame count produced for a preprocessed image of the given width.

        Returns 0 when the image is too narrow to push through the stack.
        """
        if self.cfg.kind == "col_rnn":
            return width
        if self.cfg.kind == "win_rnn":
            return max(1, width // self.cfg.window.step)
        try:
            _, w_out = self.cnn.out_size(INPUT_HEIGHT, width)
        except ConfigError:
            return 0
        return max(0, w_out)

    @property
    def min_image_width(self) -> int:
        for w in range(1, 65):
            if self.output_length(w) >= 1:
                return w
        raise ConfigError("no feasible input width below 64")

    # ------------------------------------------------------------------
    # forward / backward

    def _oriented(self, images: Sequence[GrayImage]) -> list[np.ndarray]:
        if self.cfg.direction == "rtl":
            return [img.pixels[:, ::-1] for img in images]
        return [img.pixels for img in images]

    def _check_heights(self, pixel_arrays) -> None:
        for px in pixel_arrays:
            if px.shape[0] != INPUT_HEIGHT:
                raise ConfigError(
                    f"recognizer input height must be {INPUT_HEIGHT}, got {px.shape[0]}"
                )

    def forward_batch(self, images: Sequence[GrayImage], train: bool = False):
        """Posteriorgram logits for a batch.

        Returns ``(logits, lengths)`` where ``logits`` is (B, T_max, |L'|)
        and ``lengths[b]`` is sample b's true frame count.  Every image must
        already be width-feasible (``output_length >= 1``).
        """
        px = self._oriented(images)
        self._check_heights(px)
        widths = [p.shape[1] for p in px]
        lengths = np.array([self.output_length(w) for w in widths], dtype=np.int64)
        if np.any(lengths < 1):
            bad = [w for w, t in zip(widths, lengths) if t < 1]
            raise ConfigError(f"image width(s) {bad} too narrow for kind {self.cfg.kind}")

        if self.cnn is not None:
            w_max = max(widths)
            x = np.ones((len(px), 1, INPUT_HEIGHT, w_max))
            for i, p in enumerate(px):
                x[i, 0, :, : p.shape[1]] = p
            fmap = self.cnn.forward(x, train)  # B,C,H',W'
            b, c, hh, ww = fmap.shape
            seq = fmap.transpose(0, 3, 2, 1).reshape(b, ww, hh * c)
            self._conv_shape = (b, c, hh, ww)
        else:
            if self.cfg.kind == "col_rnn":
                feats = [p.T for p in px]
            else:
                cfg = WindowConfig(self.cfg.window.width, self.cfg.window.step)
                feats = [extract_windows(GrayImage(p.copy()), cfg) for p in px]
            t_max = max(f.shape[0] for f in feats)
            seq = np.ones((len(feats), t_max, self.feature_dim))
            for i, f in enumerate(feats):
                seq[i, : f.shape[0]] = f

        if self.rnn is not None:
            enc = self.rnn.forward(seq, lengths, train)
        else:
            enc = seq
        logits = self.head.forward(enc, train)
        return logits, lengths

    def backward_batch(self, dlogits: np.ndarray) -> None:
        """Backpropagate d(loss)/d(logits) into all parameter grads."""
        denc = self.head.backward(dlogits)
        if self.rnn is not None:
            dseq = self.rnn.backward(denc)
        else:
            dseq = denc
        if self.cnn is not None:
            b, c, hh, ww = self._conv_shape
            dfmap = dseq.reshape(b, ww, hh, c).transpose(0, 3, 2, 1)
            self.cnn.backward(dfmap)

    def forward(self, img: GrayImage) -> Posteriorgram:
        """Single-image forward pass to a posteriorgram (inference mode)."""
        logits, lengths = self.forward_batch([img], train=False)
        return Posteriorgram.from_logits(logits[0, : lengths[0]])

    # ------------------------------------------------------------------
    # the public single-image pieces

    def cnn_forward(self, img: GrayImage) -> CnnFeatureMap:
        """Convolutional feature map of one image, as W' x H' x C'."""
        if self.cnn is None:
            raise ConfigError(f"kind {self.cfg.kind} has no cnn")
        px = self._oriented([img])
        self._check_heights(px)
        fmap = self.cnn.forward(px[0][None, None], train=False)[0]  # C,H',W'
        return CnnFeatureMap(fmap.transpose(2, 1, 0).copy())

    def encode(self, features: np.ndarray) -> np.ndarray:
        """Sequence encoder: bidirectional LSTM stack, or identity."""
        if self.rnn is None:
            return features
        return self.rnn.forward(features[None], train=False)[0]

    def decode_head(self, encoded: np.ndarray) -> Posteriorgram:
        """Per-frame linear projection + softmax."""
        return Posteriorgram.from_logits(self.head.forward(encoded[None])[0])

    # ------------------------------------------------------------------
    # parameter IO

    def state_arrays(self) -> dict[str, np.ndarray]:
        return {p.name: p.values.copy() for p in self.params()}

    def load_state_arrays(self, arrays: dict[str, np.ndarray]) -> None:
        own = {p.name: p for p in self.params()}
        missing = sorted(set(own) - set(arrays))
        extra = sorted(set(arrays) - set(own))
        if missing or extra:
            raise ConfigError(f"parameter name mismatch: missing={missing} extra={extra}")
        for name, p in own.items():
            if arrays[name].shape != p.values.shape:
                raise ConfigError(
                    f"shape mismatch for {name}: {arrays[name].shape} vs {p.values.shape}"
                )
            p.values[...] = arrays[name]


def model_forward(img: GrayImage, model: Recognizer) -> Posteriorgram:
    """Route an image through a configuration to its posteriorgram."""
    return model.forward(img)
