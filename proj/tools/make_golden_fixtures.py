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

"""Writes the inference parity bundle in tests/data/golden.

Builds small DH (grayscale and color) and HH networks in torch, runs them in
float64 with weights rounded to float32, and stores:

  <model>.hwts / <model>.manifest   weights in the HWTS container
  <model>_inputs.u8                 patch pairs, one 128x128 u8 plane per channel,
                                    original channels before warped ones;
                                    pixel value = code / 127.5 - 1
  <model>_outputs.f32               8 little-endian float32 per fixture
  index.json                        fixture list

The first fixture of every model is the all-zero input; its pixels are not
stored in the u8 blob.
"""
import argparse
import json
import pathlib
import struct

import numpy as np
import torch
from torch import nn
from PIL import Image

PATCH = 128
EPS = 1e-5


def conv_bn(cin, cout):
    return nn.ModuleDict({"conv": nn.Conv2d(cin, cout, 3, padding=1),
                          "bn": nn.BatchNorm2d(cout, eps=EPS)})


def run_block(block, x):
    return torch.relu(block["bn"](block["conv"](x)))


class Dh(nn.Module):
    def __init__(self, in_channels, widths, hidden):
        super().__init__()
        chans = [in_channels] + list(widths)
        self.convs = nn.ModuleList(conv_bn(chans[i], chans[i + 1]) for i in range(8))
        self.fc1 = nn.Linear(widths[-1] * 16 * 16, hidden)
        self.fc2 = nn.Linear(hidden, 8)

    def forward(self, x):
        for k, block in enumerate(self.convs, start=1):
            if k in (3, 5, 7):
                x = torch.max_pool2d(x, 2)
            x = run_block(block, x)
        return self.fc2(torch.relu(self.fc1(x.flatten(1))))

    def named_tensors(self):
        for k, block in enumerate(self.convs, start=1):
            yield from block_tensors(f"conv{k}", block)
        yield from head_tensors("", self)


class HhModule(nn.Module):
    def __init__(self, branch, merged, hidden):
        super().__init__()
        bch = [1] + list(branch)
        mch = [2 * branch[-1]] + list(merged)
        self.branch = nn.ModuleList(conv_bn(bch[i], bch[i + 1]) for i in range(4))
        self.merged = nn.ModuleList(conv_bn(mch[i], mch[i + 1]) for i in range(4))
        self.fc1 = nn.Linear(merged[-1] * 16 * 16, hidden)
        self.fc2 = nn.Linear(hidden, 8)

    def run_branch(self, x):
        for k, block in enumerate(self.branch, start=1):
            x = run_block(block, x)
            if k == 2:
                x = torch.max_pool2d(x, 2)
        return x

    def forward(self, x):
        x = torch.cat([self.run_branch(x[:, :1]), self.run_branch(x[:, 1:])], dim=1)
        for k, block in enumerate(self.merged, start=5):
            x = run_block(block, x)
            if k in (5, 7):
                x = torch.max_pool2d(x, 2)
        return self.fc2(torch.relu(self.fc1(x.flatten(1))))

    def named_tensors(self):
        for k, block in enumerate(self.branch, start=1):
            yield from block_tensors(f"branch.conv{k}", block)
        for k, block in enumerate(self.merged, start=5):
            yield from block_tensors(f"conv{k}", block)
        yield from head_tensors("", self)


def block_tensors(name, block):
    yield f"{name}.weight", block["conv"].weight
    yield f"{name}.bias", block["conv"].bias
    yield f"{name}.bn.gamma", block["bn"].weight
    yield f"{name}.bn.beta", block["bn"].bias
    yield f"{name}.bn.mean", block["bn"].running_mean
    yield f"{name}.bn.var", block["bn"].running_var


def head_tensors(prefix, model):
    yield f"{prefix}fc1.weight", model.fc1.weight
    yield f"{prefix}fc1.bias", model.fc1.bias
    yield f"{prefix}fc2.weight", model.fc2.weight
    yield f"{prefix}fc2.bias", model.fc2.bias


def smooth_plane(rng):
    cells = int(rng.integers(3, 17))
    coarse = rng.integers(0, 256, size=(cells, cells), dtype=np.uint8)
    return np.asarray(Image.fromarray(coarse).resize((PATCH, PATCH), Image.BICUBIC))


def random_pair(rng, channels):
    kind = rng.integers(0, 3)
    planes = []
    for _ in range(2 * channels):
        if kind == 0:
            planes.append(rng.integers(0, 256, size=(PATCH, PATCH), dtype=np.uint8))
        elif kind == 1:
            planes.append(smooth_plane(rng))
        else:
            noise = rng.integers(-40, 41, size=(PATCH, PATCH))
            planes.append(np.clip(smooth_plane(rng).astype(int) + noise, 0, 255).astype(np.uint8))
    return np.stack(planes)


def calibrate(model, rng, channels):
    """Sets batchnorm running statistics from a batch of random pairs, then
    randomizes the affine parameters."""
    batch = np.stack([random_pair(rng, channels) for _ in range(16)]).astype(np.float64)
    x = torch.from_numpy(batch / 127.5 - 1.0)
    for m in model.modules():
        if isinstance(m, nn.BatchNorm2d):
            m.reset_running_stats()
            m.momentum = None
    model.train()
    with torch.no_grad():
        model(x)
    model.eval()
    gen = torch.Generator().manual_seed(int(rng.integers(0, 2**31)))
    with torch.no_grad():
        for m in model.modules():
            if isinstance(m, nn.BatchNorm2d):
                m.weight.copy_(0.5 + torch.rand(m.weight.shape, generator=gen, dtype=torch.float64))
                m.bias.copy_(0.2 * torch.rand(m.bias.shape, generator=gen, dtype=torch.float64) - 0.1)
        model.fc2.weight.mul_(8.0)


def round_to_f32(model):
    with torch.no_grad():
        for _, t in model.named_tensors():
            t.copy_(t.float().double())


def write_hwts(path, tensors):
    out = bytearray(b"HWTS")
    out += struct.pack("<II", 1, len(tensors))
    for name in sorted(tensors):
        arr = tensors[name]
        raw = name.encode("utf-8")
        out += struct.pack("<H", len(raw)) + raw
        out += struct.pack("<B", arr.ndim) + struct.pack(f"<{arr.ndim}I", *arr.shape)
        out += arr.astype("<f4").tobytes()
    path.write_bytes(bytes(out))


def write_manifest(path, model_name, tensors):
    lines = ["hwts-manifest 1", f"model {model_name}"]
    for name in sorted(tensors):
        lines.append(name + " " + "x".join(str(d) for d in tensors[name].shape))
    path.write_text("\n".join(lines) + "\n")


def emit(out_dir, key, model_name, model, channels, count, rng, index):
    calibrate(model, rng, channels)
    round_to_f32(model)
    tensors = {n: t.detach().numpy().astype(np.float32) for n, t in model.named_tensors()}
    write_hwts(out_dir / f"{key}.hwts", tensors)
    write_manifest(out_dir / f"{key}.manifest", model_name, tensors)

    inputs = bytearray()
    outputs = bytearray()
    fixtures = []
    for i in range(count):
        zeros = i == 0
        if zeros:
            x = np.zeros((1, 2 * channels, PATCH, PATCH))
        else:
            codes = random_pair(rng, channels)
            inputs += codes.tobytes()
            x = (codes.astype(np.float32) / np.float32(127.5) - np.float32(1.0))[None]
            x = x.astype(np.float64)
        with torch.no_grad():
            y = model(torch.from_numpy(x)).numpy()[0]
        outputs += y.astype("<f4").tobytes()
        fixtures.append({"id": f"{key}_{i:03d}", "zeros": zeros})
    (out_dir / f"{key}_inputs.u8").write_bytes(bytes(inputs))
    (out_dir / f"{key}_outputs.f32").write_bytes(bytes(outputs))
    index["models"].append({
        "key": key,
        "model": model_name,
        "weights": f"{key}.hwts",
        "channels_per_patch": channels,
        "inputs": f"{key}_inputs.u8",
        "outputs": f"{key}_outputs.f32",
        "fixtures": fixtures,
    })


def main():
    default_out = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data" / "golden"
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=pathlib.Path, default=default_out)
    parser.add_argument("--seed", type=int, default=424242)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    torch.manual_seed(args.seed)
    torch.set_default_dtype(torch.float64)
    rng = np.random.default_rng(args.seed)

    index = {"format": 1, "patch_size": PATCH, "models": []}
    emit(args.out, "dh_gray", "dh", Dh(2, [4, 4, 4, 4, 8, 8, 8, 8], 32), 1, 40, rng, index)
    emit(args.out, "dh_color", "dh", Dh(6, [4, 4, 4, 4, 8, 8, 8, 8], 32), 3, 20, rng, index)
    emit(args.out, "hh", "hh", HhModule([4, 4, 4, 4], [8, 8, 8, 8], 32), 1, 40, rng, index)
    (args.out / "index.json").write_text(json.dumps(index, indent=1) + "\n")


if __name__ == "__main__":
    main()
