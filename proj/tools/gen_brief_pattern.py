#!/usr/bin/env python3
# Copyright 2026 The hbench Authors. All Rights Reserved.
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

"""Writes src/brief_pattern.inc: 256 point-pair tests for the binary descriptor.

Run once; the output is committed. Coordinates are isotropic Gaussian samples
(sigma = 5 px) rounded to integers and clipped to a radius-13 disc.
"""
import pathlib
import random

SEED = 0x5EED_B21EF
RADIUS = 13
SIGMA = 5.0
COUNT = 256


def sample(rng):
    while True:
        x = round(rng.gauss(0.0, SIGMA))
        y = round(rng.gauss(0.0, SIGMA))
        if x * x + y * y <= RADIUS * RADIUS:
            return x, y


def main():
    rng = random.Random(SEED)
    pairs = []
    seen = set()
    while len(pairs) < COUNT:
        a = sample(rng)
        b = sample(rng)
        key = (a, b)
        if a == b or key in seen or (b, a) in seen:
            continue
        seen.add(key)
        pairs.append((*a, *b))
    out = pathlib.Path(__file__).resolve().parent.parent / "src" / "brief_pattern.inc"
    lines = ["// Generated by tools/gen_brief_pattern.py; do not edit.",
             "// {x1, y1, x2, y2} offsets from the keypoint, radius <= 13."]
    for i in range(0, COUNT, 4):
        lines.append(" ".join("{%d, %d, %d, %d}," % p for p in pairs[i:i + 4]))
    out.write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
