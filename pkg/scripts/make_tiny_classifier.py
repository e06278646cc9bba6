#!/usr/bin/env python3
"""Regenerate the bundled tiny linear classifier under data/tiny_classifier/.

Synthesizes a 10-class, 64-feature Gaussian-blob task: class means sit on a
common-radius sphere, the classifier weights are the quantized means
(nearest-mean scoring), and the fixed evaluation set is 50 samples per class.
The noise level is chosen so clean top-1 accuracy is high but not perfect,
leaving headroom for fault-injection studies to degrade it.

Deterministic: rerunning reproduces the committed files byte for byte.
"""

import json
from pathlib import Path

import numpy as np

SEED = 20240817
CLASSES = 10
FEATURES = 64
SAMPLES_PER_CLASS = 50
MEAN_RADIUS = 4.0
NOISE_SIGMA = 1.15

OUT_DIR = Path(__file__).resolve().parent.parent / "data" / "tiny_classifier"


def main():
    rng = np.random.default_rng(SEED)
    means = rng.normal(size=(CLASSES, FEATURES))
    means *= MEAN_RADIUS / np.linalg.norm(means, axis=1, keepdims=True)

    labels = np.repeat(np.arange(CLASSES, dtype=np.uint8), SAMPLES_PER_CLASS)
    inputs = means[labels] + NOISE_SIGMA * rng.normal(size=(labels.size, FEATURES))
    inputs = inputs.astype("<f4")

    scale = float(np.max(np.abs(means)) / 127.0)
    weights_q = np.clip(np.round(means / scale), -127, 127).astype(np.int8)

    OUT_DIR.mkdir(parents=True, exist_ok=True)
    (OUT_DIR / "weights.bin").write_bytes(weights_q.tobytes())
    (OUT_DIR / "weights.json").write_text(
        json.dumps(
            {
                "shape": [CLASSES, FEATURES],
                "scale": scale,
                "zero_point": 0,
                "element_bits": 8,
            },
            indent=2,
        )
        + "\n"
    )
    (OUT_DIR / "eval_inputs.bin").write_bytes(inputs.tobytes())
    (OUT_DIR / "eval_inputs.json").write_text(
        json.dumps({"shape": [int(labels.size), FEATURES], "dtype": "float32"}, indent=2) + "\n"
    )
    (OUT_DIR / "labels.bin").write_bytes(labels.tobytes())
    (OUT_DIR / "labels.json").write_text(
        json.dumps({"shape": [int(labels.size)], "dtype": "uint8"}, indent=2) + "\n"
    )

    dequant = (weights_q.astype(np.float64)) * scale
    scores = inputs.astype(np.float64) @ dequant.T
    accuracy = float(np.mean(np.argmax(scores, axis=1) == labels))
    (OUT_DIR / "golden.json").write_text(
        json.dumps({"clean_accuracy": accuracy}, indent=2) + "\n"
    )
    print(f"wrote {OUT_DIR} (clean accuracy {accuracy:.4f})")


if __name__ == "__main__":
    main()
