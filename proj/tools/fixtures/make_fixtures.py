"""Writes the small binary fixtures the unit tests decode.

Authored here, with Python's own zlib/struct, so the C++ readers are checked
against an encoder they share no code with. Run from the repo root:
    python3 tools/fixtures/make_fixtures.py
"""
import os
import struct
import zlib

OUT = os.path.join(os.path.dirname(__file__), "..", "..", "tests", "fixtures")


def chunk(kind, data):
    c = kind + data
    return struct.pack(">I", len(data)) + c + struct.pack(">I", zlib.crc32(c) & 0xFFFFFFFF)


def png(width, height, color_type, bit_depth, rows):
    raw = b"".join(b"\x00" + r for r in rows)  # filter 0 on every row
    ihdr = struct.pack(">IIBBBBB", width, height, bit_depth, color_type, 0, 0, 0)
    return b"\x89PNG\r\n\x1a\n" + chunk(b"IHDR", ihdr) + chunk(b"IDAT", zlib.compress(raw)) + chunk(b"IEND", b"")


def write(name, data):
    with open(os.path.join(OUT, name), "wb") as f:
        f.write(data)


# 3x2 gray: 0, 51, 255 / 102, 153, 204
write("gray3x2.png", png(3, 2, 0, 8, [bytes([0, 51, 255]), bytes([102, 153, 204])]))
# 2x1 RGB: pure red, white
write("rgb2x1.png", png(2, 1, 2, 8, [bytes([255, 0, 0, 255, 255, 255])]))
# 16-bit gray 1x1 at 0x8000
write("gray16.png", png(1, 1, 0, 16, [bytes([0x80, 0x00])]))
# valid signature and header, body cut short
full = png(3, 2, 0, 8, [bytes([0, 51, 255]), bytes([102, 153, 204])])
write("truncated.png", full[:40])

# unit tetrahedron with two named groups
write("tetra.obj", b"""# four faces, outward
v 0 0 0
v 1 0 0
v 0 1 0
v 0 0 1
g base
f 1 3 2
f 1 2 4
g slopes
f 1 4 3
f 2 3 4
""")

# three sample records
records = [
    ((0.1, -0.2, 0.3), -0.01, (0.0, 0.0, 1.0), 0.5, 0.55, 1),
    ((0.0, 0.0, 0.0), 0.2, (1.0, 0.0, 0.0), 0.0, 0.0, 0),
    ((-0.5, 0.25, 0.125), 0.0, (0.0, -1.0, 0.0), 1.0, 0.5, 1),
]
body = b"SDFS" + struct.pack("<II", 1, len(records))
for p, sdf, n, edge, value, surf in records:
    body += struct.pack("<3ff3fffB", *p, sdf, *n, edge, value, surf)
write("three.sdfs", body)

# checkpoint for stacks 1, initial 1, internal 1, depth 2, max dim 16,
# hidden [5], seed 3. Counted by hand: one encoder has a 1->2 stride-2 conv
# (18+2) and 3*1+1 hourglass convs 2->2 (36+2 each) = 172; four encoders 688;
# MLP 11->5 (55+5) and 5->5 (25+5) = 90. Total 778.
count = 778
ckpt = b"PAFW" + struct.pack("<I", 1) + struct.pack("<IIIII", 1, 1, 1, 2, 16)
ckpt += struct.pack("<I", 1) + struct.pack("<I", 5) + struct.pack("<Q", 3) + struct.pack("<Q", count)
ckpt += b"".join(struct.pack("<f", i * 0.001) for i in range(count))
write("tiny.pafw", ckpt)
