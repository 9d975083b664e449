#!/usr/bin/env python3
"""The four feature + encoder configurations on one rendered word.

col_rnn : raw pixel columns -> bidirectional LSTM
win_rnn : sliding-window pixel stacks -> bidirectional LSTM
cnn_only: convolutional feature map reshaped to a sequence, no encoder
crnn    : convolutional features -> bidirectional LSTM
"""

import numpy as np

from ctcocr import (
    CnnConfig,
    ModelConfig,
    Recognizer,
    RnnConfig,
    WindowConfig,
    extract_columns,
    extract_windows,
    mirror,
)
from ctcocr.synthgen import RenderSpec, render

spec = RenderSpec(text="Word42", font_id="mono5x7", font_size=28, bold=False, italic=False,
                  fg_intensity=0.1, bg_intensity=0.95, kerning=0, skew_degrees=0.0,
                  blur_sigma=0.0, seed=0)
img = render(spec)
print(f"rendered {spec.text!r}: {img.height} x {img.width}")

# pixel features
cols = extract_columns(img)
wins = extract_windows(img, WindowConfig(width=20, step=5))
print(f"column features : T={cols.shape[0]:4d}  D={cols.shape[1]}")
print(f"window features : T={wins.shape[0]:4d}  D={wins.shape[1]}  (width 20, step 5)")

# all four models, posteriorgram shapes
alphabet_size = 11
configs = {
    "col_rnn": ModelConfig("col_rnn", alphabet_size, rnn=RnnConfig(2, 32)),
    "win_rnn": ModelConfig("win_rnn", alphabet_size, rnn=RnnConfig(2, 32),
                           window=WindowConfig(20, 5)),
    "cnn_only": ModelConfig("cnn_only", alphabet_size, cnn=CnnConfig("tiny", (8, 16))),
    "crnn": ModelConfig("crnn", alphabet_size, rnn=RnnConfig(1, 32),
                        cnn=CnnConfig("tiny", (8, 16))),
}
print()
for name, cfg in configs.items():
    model = Recognizer(cfg, seed=0)
    y = model.forward(img)
    print(f"{name:9s}: posteriorgram {y.n_frames:3d} x {y.n_labels}   "
          f"(rows sum to {y.probs.sum(axis=1).mean():.6f})")

# right-to-left scripts: mirror the image, extract left-to-right
print()
rtl_cfg = ModelConfig("crnn", alphabet_size, rnn=RnnConfig(1, 32),
                      cnn=CnnConfig("tiny", (8, 16)), direction="rtl")
ltr = Recognizer(configs["crnn"], seed=0)
rtl = Recognizer(rtl_cfg, seed=0)
rtl.load_state_arrays({p.name: p.values for p in ltr.params()})
same = np.array_equal(rtl.forward(img).probs, ltr.forward(mirror(img)).probs)
print("rtl(image) == ltr(mirrored image), exactly:", same)

# the sequence-length contract per configuration
print()
print("width -> frame count:")
print("  width :", "  ".join(f"{w:4d}" for w in (32, 64, 128, 256)))
for name, cfg in configs.items():
    model = Recognizer(cfg, seed=0)
    print(f"  {name:7s}:", "  ".join(f"{model.output_length(w):4d}" for w in (32, 64, 128, 256)))
