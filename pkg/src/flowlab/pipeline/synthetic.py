"""Deterministic flow-like CSV fixtures for offline testing.

Generative parameters (all draws uniform over the listed values):

    column        benign (Label=0)                 attack (Label=1)
    L4_DST_PORT   22 25 53 80 123 443 993          21 22 23 80 443 445
                  3306 8080                        1433 3389 6667
    L7_PROTO      0.0 1.0 5.0 7.0 91.0             0.0 3.0 5.0 7.0 9.0
    TCP_FLAGS     16 17 24 25 27                   2 4 6

Ports and protocols overlap between the classes; TCP_FLAGS ranges are
disjoint ([16, 27] vs [2, 6]), so the fixture is perfectly separable by a
single threshold on that column. Interpolated minority rows stay inside the
attack range, which keeps separability after oversampling. Attack rows carry
a category name drawn from ATTACK_NAMES; benign rows carry "Benign".

Class counts follow the largest-remainder method, so n = 1000 with weights
(0.9, 0.1) yields exactly 900/100 regardless of seed.
"""

from __future__ import annotations

import csv
import io
import math

from ..errors import ConfigError
from ..rng import Xorshift64Star, derive_seed

HEADER = ("L4_DST_PORT", "L7_PROTO", "TCP_FLAGS", "Label", "Attack")

BENIGN_PORTS = (22, 25, 53, 80, 123, 443, 993, 3306, 8080)
ATTACK_PORTS = (21, 22, 23, 80, 443, 445, 1433, 3389, 6667)
BENIGN_PROTOS = (0.0, 1.0, 5.0, 7.0, 91.0)
ATTACK_PROTOS = (0.0, 3.0, 5.0, 7.0, 9.0)
BENIGN_FLAGS = (16, 17, 24, 25, 27)
ATTACK_FLAGS = (2, 4, 6)
ATTACK_NAMES = ("DoS", "Exploits", "Fuzzers", "Generic", "Reconnaissance")

# seed lane, distinct from the split/SMOTE lanes
LANE_SYNTH = 0x53594E


def class_counts(n: int, weights) -> "tuple[int, ...]":
    """Largest-remainder apportionment; remainder ties favor lower class."""
    if n < 1:
        raise ConfigError("row count must be at least 1")
    weights = tuple(float(w) for w in weights)
    if len(weights) != 2:
        raise ConfigError("exactly two class weights expected")
    if any(w <= 0 for w in weights) or not all(math.isfinite(w) for w in weights):
        raise ConfigError("class weights must be positive and finite")
    total = sum(weights)
    exact = [n * w / total for w in weights]
    base = [int(math.floor(e)) for e in exact]
    leftover = n - sum(base)
    order = sorted(range(len(weights)), key=lambda i: (-(exact[i] - base[i]), i))
    for i in order[:leftover]:
        base[i] += 1
    return tuple(base)


def generate_synthetic(n: int, weights=(0.9, 0.1), seed: int = 0) -> str:
    """CSV text with n flow rows; bit-identical for identical arguments."""
    benign_n, attack_n = class_counts(n, weights)
    rng = Xorshift64Star(derive_seed(seed, LANE_SYNTH))
    labels = [0] * benign_n + [1] * attack_n
    rng.shuffle(labels)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for label in labels:
        if label == 0:
            port = rng.choice(BENIGN_PORTS)
            proto = rng.choice(BENIGN_PROTOS)
            flags = rng.choice(BENIGN_FLAGS)
            attack = "Benign"
        else:
            port = rng.choice(ATTACK_PORTS)
            proto = rng.choice(ATTACK_PROTOS)
            flags = rng.choice(ATTACK_FLAGS)
            attack = rng.choice(ATTACK_NAMES)
        writer.writerow((port, repr(proto), flags, label, attack))
    return buf.getvalue()


def write_synthetic(path, n: int, weights=(0.9, 0.1), seed: int = 0) -> None:
    text = generate_synthetic(n, weights, seed)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
