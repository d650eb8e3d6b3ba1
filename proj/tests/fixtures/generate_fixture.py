# Copyright 2026 The meandim Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes the checked-in network fixture, its golden outputs and a small
synthetic digit archive.

The forward pass here is a separate numpy implementation; the C++ side must
agree with it to 1e-5 on every golden input.

    python3 generate_fixture.py [--out DIR] [--seed 20260101]
"""

import argparse
import json
import pathlib
import struct

import numpy as np

ROWS = COLS = 28
KERNELS = 4
HIDDEN = 16
CLASSES = 10
DROPOUT = 0.2

TAG_CONV, TAG_POOL, TAG_FLAT, TAG_DENSE, TAG_DROP = 1, 2, 3, 4, 5
RELU, IDENTITY = 1, 0


def make_weights(rng):
    conv_w = rng.normal(0.0, 0.4, size=(KERNELS, 1, 3, 3)).astype(np.float32)
    conv_b = rng.normal(0.0, 0.1, size=KERNELS).astype(np.float32)
    flat = 13 * 13 * KERNELS
    d1_w = rng.normal(0.0, 1.0 / np.sqrt(flat), size=(HIDDEN, flat)).astype(np.float32)
    d1_b = rng.normal(0.0, 0.1, size=HIDDEN).astype(np.float32)
    d2_w = rng.normal(0.0, 1.0 / np.sqrt(HIDDEN), size=(CLASSES, HIDDEN)).astype(np.float32)
    d2_b = rng.normal(0.0, 0.1, size=CLASSES).astype(np.float32)
    return conv_w, conv_b, d1_w, d1_b, d2_w, d2_b


def write_mdnn(path, weights):
    conv_w, conv_b, d1_w, d1_b, d2_w, d2_b = weights
    u32 = lambda *v: struct.pack("<" + "I" * len(v), *v)
    out = bytearray(b"MDNN")
    out += u32(1, ROWS, COLS, 1, 6)
    out += u32(TAG_CONV, KERNELS, 1, 3, 3, 1, 0, IDENTITY)
    out += conv_w.astype("<f4").tobytes() + conv_b.astype("<f4").tobytes()
    out += u32(TAG_POOL, 2, 2)
    out += u32(TAG_FLAT)
    out += u32(TAG_DENSE, d1_w.shape[1], HIDDEN, RELU)
    out += d1_w.astype("<f4").tobytes() + d1_b.astype("<f4").tobytes()
    out += u32(TAG_DROP) + struct.pack("<f", DROPOUT)
    out += u32(TAG_DENSE, HIDDEN, CLASSES, IDENTITY)
    out += d2_w.astype("<f4").tobytes() + d2_b.astype("<f4").tobytes()
    path.write_bytes(bytes(out))


def forward(weights, image):
    """Logits of one image given as a (28, 28) array, all in float64."""
    conv_w, conv_b, d1_w, d1_b, d2_w, d2_b = (w.astype(np.float64) for w in weights)
    x = image.astype(np.float64)
    windows = np.lib.stride_tricks.sliding_window_view(x, (3, 3))  # (26, 26, 3, 3)
    conv = np.einsum("yxij,kij->yxk", windows, conv_w[:, 0]) + conv_b  # HWC
    pooled = conv.reshape(13, 2, 13, 2, KERNELS).max(axis=(1, 3))
    hidden = np.maximum(d1_w @ pooled.reshape(-1) + d1_b, 0.0)
    return d2_w @ hidden + d2_b


def softmax(g):
    e = np.exp(g - g.max())
    return e / e.sum()


def digit_image(label, rng):
    """Crude synthetic digit: a class-specific stroke pattern plus noise."""
    img = np.zeros((ROWS, COLS))
    yy, xx = np.mgrid[0:ROWS, 0:COLS]
    cy, cx = 14 + rng.integers(-2, 3), 14 + rng.integers(-2, 3)
    r = np.hypot(yy - cy, xx - cx)
    if label == 0:
        img[(r > 6) & (r < 9)] = 1.0
    elif label == 1:
        img[4:24, cx - 1:cx + 1] = 1.0
    else:
        angle = np.arctan2(yy - cy, xx - cx)
        arc = (r > 4 + label % 3) & (r < 7 + label % 3)
        img[arc & (np.sin(angle * (1 + label % 4) + label) > 0)] = 1.0
        img[cy + label - 5, 6:22] = 1.0
    img = np.clip(img * rng.uniform(0.7, 1.0) + rng.normal(0.0, 0.05, img.shape), 0.0, 1.0)
    return np.round(img * 255.0).astype(np.uint8)


def write_idx(images_path, labels_path, images, labels):
    n = len(labels)
    images_path.write_bytes(struct.pack(">IIII", 0x803, n, ROWS, COLS) + images.tobytes())
    labels_path.write_bytes(struct.pack(">II", 0x801, n) + np.asarray(labels, np.uint8).tobytes())


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=pathlib.Path, default=pathlib.Path(__file__).parent)
    parser.add_argument("--seed", type=int, default=20260101)
    parser.add_argument("--images", type=int, default=200)
    args = parser.parse_args()
    rng = np.random.default_rng(args.seed)
    args.out.mkdir(parents=True, exist_ok=True)

    weights = make_weights(rng)
    write_mdnn(args.out / "fixture.mdnn", weights)

    labels = [i % CLASSES for i in range(args.images)]
    images = np.stack([digit_image(y, rng) for y in labels])
    write_idx(args.out / "digits-images.idx3-ubyte", args.out / "digits-labels.idx1-ubyte", images, labels)

    inputs = {
        "zeros": np.zeros((ROWS, COLS)),
        "ones": np.ones((ROWS, COLS)),
        "digit0": images[0] / 255.0,
        "digit1": images[1] / 255.0,
        "digit7": images[7] / 255.0,
    }
    goldens = []
    for name, img in inputs.items():
        g = forward(weights, img)
        goldens.append({
            "name": name,
            "input": img.reshape(-1).tolist(),
            "logits": g.tolist(),
            "softmax": softmax(g).tolist(),
        })
    meta = {
        "generator": "generate_fixture.py",
        "seed": args.seed,
        "architecture": f"conv {KERNELS}x3x3 -> maxpool 2 -> flatten -> dense {HIDDEN} relu "
                        f"-> dropout {DROPOUT} -> dense {CLASSES}",
        "scaled_down": {"kernels": [28, KERNELS], "hidden": [128, HIDDEN]},
        "weights": "random (untrained), normal with fan-in scaling",
        "images": args.images,
    }
    (args.out / "goldens.json").write_text(json.dumps({"meta": meta, "cases": goldens}) + "\n")


if __name__ == "__main__":
    main()
