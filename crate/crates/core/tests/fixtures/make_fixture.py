"""Writes a small exported model: model.txt, weights.fsnw, manifest.txt.

Stands in for the checkpoint exporter so the engine's loader can be checked
against independently computed per-tensor FNV-1a 64 checksums.
Run from this directory: python3 make_fixture.py
"""

import random
import struct

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3

MODEL = """\
net name=exported_small
input c=3 h=8 w=8
conv out=4 k=3 s=1 p=1
batchnorm
leaky_relu slope=0.1
maxpool k=2
conv out=2 k=3 s=1 p=0
relu
"""


def fnv1a64(data):
    h = FNV_OFFSET
    for b in data:
        h = ((h ^ b) * FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def f32s(values):
    return b"".join(struct.pack("<f", v) for v in values)


def as_f32(v):
    return struct.unpack("<f", struct.pack("<f", v))[0]


def fdt3(c, h, w, values):
    # values indexed [c][h][w]; payload is channel-innermost: (w*H + h)*C + c
    payload = [values[ch][hh][ww] for ww in range(w) for hh in range(h) for ch in range(c)]
    return b"FDT3" + struct.pack("<3I", c, h, w) + f32s(payload)


def main():
    rng = random.Random(20240601)
    out = bytearray(b"FSNW" + struct.pack("<II", 1, 3))
    manifest = []
    densities = []

    def conv(layer, n, c, k, zero_fraction, bias):
        out.extend(struct.pack("<4I", n, c, k, k))
        nonzero = 0
        for j in range(n):
            vals = [[[0.0 if rng.random() < zero_fraction else as_f32(rng.uniform(-0.5, 0.5))
                      for _ in range(k)] for _ in range(k)] for _ in range(c)]
            nonzero += sum(1 for a in vals for b in a for v in b if v != 0.0)
            blob = fdt3(c, k, k, vals)
            out.extend(blob)
            manifest.append((f"layer{layer}.filter{j}", fnv1a64(blob)))
        b = f32s(bias)
        out.extend(b)
        manifest.append((f"layer{layer}.bias", fnv1a64(b)))
        densities.append((layer, nonzero / (n * c * k * k)))

    conv(0, 4, 3, 3, 0.0, [0.0] * 4)
    arrays = {
        "scale": [as_f32(rng.uniform(0.5, 1.5)) for _ in range(4)],
        "shift": [as_f32(rng.uniform(-0.5, 0.5)) for _ in range(4)],
        "mean": [as_f32(rng.uniform(-0.1, 0.1)) for _ in range(4)],
        "var": [as_f32(rng.uniform(0.5, 1.5)) for _ in range(4)],
    }
    for name in ("scale", "shift", "mean", "var"):
        b = f32s(arrays[name])
        out.extend(b)
        manifest.append((f"layer1.bn_{name}", fnv1a64(b)))
    eps = f32s([1e-5])
    out.extend(eps)
    manifest.append(("layer1.bn_eps", fnv1a64(eps)))
    conv(4, 2, 4, 3, 0.75, [0.25, -0.125])

    with open("model.txt", "w") as f:
        f.write(MODEL)
    with open("weights.fsnw", "wb") as f:
        f.write(out)
    with open("manifest.txt", "w") as f:
        for name, h in manifest:
            f.write(f"checksum {name} {h:016x}\n")
        for layer, d in densities:
            f.write(f"density layer{layer} {d!r}\n")


if __name__ == "__main__":
    main()
