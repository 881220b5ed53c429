#!/usr/bin/env python3
# Copyright 2026 The aldfit Authors
# SPDX-License-Identifier: Apache-2.0
"""Trains a small MLP on scikit-learn's bundled 8x8 digits and writes the
final fully-connected layer (10 x 128) as an aldfit CSV fixture.

    python3 tools/make_digits_fixture.py tests/data/digits_head.csv
"""

import sys

import numpy as np
import torch
from sklearn.datasets import load_digits
from sklearn.model_selection import train_test_split


def main(out_path: str) -> None:
    torch.manual_seed(0)
    digits = load_digits()
    x = torch.tensor(digits.data / 16.0, dtype=torch.float32)
    y = torch.tensor(digits.target, dtype=torch.long)
    x_tr, x_te, y_tr, y_te = train_test_split(x, y, test_size=0.25, random_state=0)

    model = torch.nn.Sequential(
        torch.nn.Linear(64, 256), torch.nn.ReLU(),
        torch.nn.Linear(256, 128), torch.nn.ReLU(),
        torch.nn.Linear(128, 10),
    )
    opt = torch.optim.Adam(model.parameters(), lr=1e-3, weight_decay=1e-4)
    for _ in range(300):
        perm = torch.randperm(len(x_tr))
        for i in range(0, len(x_tr), 64):
            idx = perm[i:i + 64]
            opt.zero_grad()
            torch.nn.functional.cross_entropy(model(x_tr[idx]), y_tr[idx]).backward()
            opt.step()

    with torch.no_grad():
        acc = (model(x_te).argmax(1) == y_te).float().mean().item()
    head = model[-1].weight.detach().numpy().astype(np.float32)
    with open(out_path, "w") as f:
        for k, row in enumerate(head):
            f.write(f"digit_{k}," + ",".join(f"{v:.9g}" for v in row) + "\n")
    print(f"test accuracy {acc:.4f}; wrote {head.shape[0]}x{head.shape[1]} to {out_path}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "digits_head.csv")
