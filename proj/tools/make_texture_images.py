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

"""Renders the bundled 320x240 RGB test textures into tests/data/textures.

Each image is a smooth colored noise field overlaid with a few hundred
polygons, ellipses, rectangles and strokes. Shapes are drawn at twice the
output size and box-downsampled, which anti-aliases edges. Output is
deterministic for a given seed.
"""
import argparse
import pathlib

import numpy as np
from PIL import Image, ImageDraw

WIDTH, HEIGHT = 320, 240
SUPERSAMPLE = 2


def noise_field(rng, w, h):
    field = np.zeros((h, w, 3))
    for octave in range(1, 5):
        cells = 2 ** (octave + 1)
        coarse = rng.uniform(-1.0, 1.0, size=(cells + 1, cells + 1, 3))
        img = Image.fromarray(((coarse + 1) * 127.5).astype(np.uint8), "RGB")
        up = np.asarray(img.resize((w, h), Image.BICUBIC), dtype=np.float64) / 127.5 - 1
        field += up / octave
    field -= field.min()
    field /= max(field.max(), 1e-9)
    return (field * 255).astype(np.uint8)


def random_color(rng):
    return tuple(int(v) for v in rng.integers(0, 256, size=3))


def draw_shapes(draw, rng, w, h, count):
    s = SUPERSAMPLE
    for _ in range(count):
        kind = rng.choice(["rect", "poly", "ellipse", "line"], p=[0.35, 0.3, 0.2, 0.15])
        cx, cy = rng.uniform(0, w), rng.uniform(0, h)
        size = rng.uniform(3, 28) * s
        color = random_color(rng)
        if kind == "rect":
            ax, ay = size * rng.uniform(0.3, 1.0), size * rng.uniform(0.3, 1.0)
            draw.rectangle([cx - ax, cy - ay, cx + ax, cy + ay], fill=color)
        elif kind == "poly":
            n = int(rng.integers(3, 7))
            ang = np.sort(rng.uniform(0, 2 * np.pi, size=n))
            rad = size * rng.uniform(0.4, 1.0, size=n)
            pts = [(cx + r * np.cos(a), cy + r * np.sin(a)) for a, r in zip(ang, rad)]
            draw.polygon(pts, fill=color)
        elif kind == "ellipse":
            ax, ay = size * rng.uniform(0.3, 1.0), size * rng.uniform(0.3, 1.0)
            draw.ellipse([cx - ax, cy - ay, cx + ax, cy + ay], fill=color)
        else:
            a = rng.uniform(0, 2 * np.pi)
            dx, dy = 2 * size * np.cos(a), 2 * size * np.sin(a)
            draw.line([cx - dx, cy - dy, cx + dx, cy + dy], fill=color,
                      width=int(rng.integers(1, 4)) * s)


def render(seed):
    rng = np.random.default_rng(seed)
    w, h = WIDTH * SUPERSAMPLE, HEIGHT * SUPERSAMPLE
    canvas = Image.fromarray(noise_field(rng, w, h), "RGB")
    draw = ImageDraw.Draw(canvas)
    draw_shapes(draw, rng, w, h, int(rng.integers(350, 500)))
    return canvas.resize((WIDTH, HEIGHT), Image.BOX)


def main():
    default_out = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data" / "textures"
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=pathlib.Path, default=default_out)
    parser.add_argument("--count", type=int, default=50)
    parser.add_argument("--seed", type=int, default=20260101)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        render(args.seed + i).save(args.out / f"texture_{i:03d}.png", optimize=True)


if __name__ == "__main__":
    main()
