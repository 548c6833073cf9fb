"""Independent reference for the grid-moment embedder.

Prints constants that tests/unit/embedding_test.cpp freezes. Uses numpy
float64 statistics and Pillow encoders, sharing no code with the library.
"""
import base64
import io

import numpy as np
from PIL import Image


def pattern(h, w):
    r = np.arange(h)[:, None]
    c = np.arange(w)[None, :]
    img = np.zeros((h, w, 3), dtype=np.uint8)
    img[..., 0] = (r * 31 + c * 17) % 256
    img[..., 1] = (r * 7 + c * 113) % 256
    img[..., 2] = (r * r + c) % 256
    return img


def bounds(extent):
    out = []
    for i in range(16):
        b = i * extent // 16
        e = (i + 1) * extent // 16
        out.append((b, max(e, b + 1)))
    return out


def embed(img):
    h, w, _ = img.shape
    x = img.astype(np.float64)
    a = np.zeros(768)
    s = np.zeros(768)
    for i, (r0, r1) in enumerate(bounds(h)):
        for j, (c0, c1) in enumerate(bounds(w)):
            cell = x[r0:r1, c0:c1, :].reshape(-1, 3)
            for ch in range(3):
                a[ch * 256 + i * 16 + j] = cell[:, ch].mean()
                s[ch * 256 + i * 16 + j] = cell[:, ch].std()
    q = img.reshape(-1, 3).astype(np.int64)
    bins = ((q[:, 0] * 8 // 256) * 6 + q[:, 1] * 6 // 256) * 10 + q[:, 2] * 10 // 256
    hist = np.bincount(bins, minlength=480) / float(h * w)
    v = np.concatenate([a, s, hist])
    return v / np.linalg.norm(v)


def png_b64(img):
    buf = io.BytesIO()
    Image.fromarray(img, "RGB").save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode()


red = np.array([[[255, 0, 0]]], dtype=np.uint8)
print("RED_PNG_B64", png_b64(red))

for h, w in [(20, 13), (5, 3), (40, 37)]:
    v = embed(pattern(h, w))
    nz = [k for k in range(1536, 2016) if v[k] > 0]
    picks = [5, 100, 255, 300, 600, 767, 800, 1000, 1300, 1535, nz[0], nz[-1]]
    print(f"PATTERN {h}x{w}", [(k, repr(float(v[k]))) for k in picks])

# grayscale + alpha PNG exercises the expand/strip transforms
la = np.zeros((2, 2, 2), dtype=np.uint8)
la[..., 0] = [[10, 20], [30, 40]]
la[..., 1] = [[255, 0, 128, 255]][0][:2], [128, 255]
buf = io.BytesIO()
Image.fromarray(la, "LA").save(buf, format="PNG")
print("GRAY_ALPHA_PNG_B64", base64.b64encode(buf.getvalue()).decode())

# palette PNG
p = Image.fromarray(pattern(4, 4), "RGB").convert("P", palette=Image.ADAPTIVE, colors=4)
buf = io.BytesIO()
p.save(buf, format="PNG")
print("PALETTE_PNG_B64", base64.b64encode(buf.getvalue()).decode())
print("PALETTE_PIXELS", np.asarray(p.convert("RGB")).reshape(-1).tolist())
