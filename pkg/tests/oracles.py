"""Brute-force reference implementations used only by the tests.

Each one follows the textbook definition directly and shares no code with
the package.
"""

from collections import deque
from fractions import Fraction


def otsu_foreground(pixels):
    """Foreground mask (list of bools) from an exhaustive Otsu search.

    Every threshold t in 0..255 splits pixels into {p < t} and {p >= t}; the
    between-class variance w0*w1*(mu0-mu1)^2 is evaluated with exact fractions
    and the lowest maximizing threshold wins. A split with an empty side
    scores 0.
    """
    n = len(pixels)
    best_t, best_score = 0, Fraction(0)
    for t in range(256):
        c0 = [p for p in pixels if p < t]
        c1 = [p for p in pixels if p >= t]
        if not c0 or not c1:
            score = Fraction(0)
        else:
            w0, w1 = Fraction(len(c0), n), Fraction(len(c1), n)
            mu0, mu1 = Fraction(sum(c0), len(c0)), Fraction(sum(c1), len(c1))
            score = w0 * w1 * (mu0 - mu1) ** 2
        if score > best_score:
            best_t, best_score = t, score
    return [p < best_t for p in pixels]


def offsets(k):
    lo = k // 2
    return range(-lo, k - lo)


def dilate_ref(img, kw, kh):
    """img is a list of lists of bools; union of kernel placements at each fg pixel."""
    h, w = len(img), len(img[0])
    out = [[False] * w for _ in range(h)]
    for y in range(h):
        for x in range(w):
            if img[y][x]:
                for dy in offsets(kh):
                    for dx in offsets(kw):
                        yy, xx = y + dy, x + dx
                        if 0 <= yy < h and 0 <= xx < w:
                            out[yy][xx] = True
    return out


def erode_ref(img, kw, kh):
    """Keep a pixel when every in-bounds pixel under the kernel is foreground."""
    h, w = len(img), len(img[0])
    out = [[False] * w for _ in range(h)]
    for y in range(h):
        for x in range(w):
            ok = True
            for dy in offsets(kh):
                for dx in offsets(kw):
                    yy, xx = y + dy, x + dx
                    if 0 <= yy < h and 0 <= xx < w and not img[yy][xx]:
                        ok = False
            out[y][x] = ok
    return out


def components_ref(img):
    """8-connected flood fill in raster order -> [(left, top, width, height, pixel set)]."""
    h, w = len(img), len(img[0])
    seen = [[False] * w for _ in range(h)]
    found = []
    for y in range(h):
        for x in range(w):
            if img[y][x] and not seen[y][x]:
                pixels = set()
                queue = deque([(y, x)])
                seen[y][x] = True
                while queue:
                    cy, cx = queue.popleft()
                    pixels.add((cy, cx))
                    for dy in (-1, 0, 1):
                        for dx in (-1, 0, 1):
                            ny, nx = cy + dy, cx + dx
                            if 0 <= ny < h and 0 <= nx < w and img[ny][nx] and not seen[ny][nx]:
                                seen[ny][nx] = True
                                queue.append((ny, nx))
                ys = [p[0] for p in pixels]
                xs = [p[1] for p in pixels]
                found.append((min(xs), min(ys), max(xs) - min(xs) + 1, max(ys) - min(ys) + 1, pixels))
    return found


def matched_chars_ref(a, b):
    """Gestalt matching by exhaustive search of the longest common block.

    Ties: smallest start in a, then smallest start in b. Recurse on both sides.
    """
    if not a or not b:
        return 0
    best = (0, 0, 0)
    for i in range(len(a)):
        for j in range(len(b)):
            k = 0
            while i + k < len(a) and j + k < len(b) and a[i + k] == b[j + k]:
                k += 1
            if k > best[2]:
                best = (i, j, k)
    i, j, k = best
    if k == 0:
        return 0
    return k + matched_chars_ref(a[:i], b[:j]) + matched_chars_ref(a[i + k:], b[j + k:])


def ratio_ref(a, b):
    if not a and not b:
        return 1.0
    return 2.0 * matched_chars_ref(a, b) / (len(a) + len(b))


def free_corridors(intervals, width):
    """Maximal x-ranges [lo, hi] in [0, width] not strictly inside any (left, right) interval."""
    blocked = [False] * (width + 1)
    for left, right in intervals:
        for x in range(left + 1, right):
            if 0 <= x <= width:
                blocked[x] = True
    runs, start = [], None
    for x in range(width + 1):
        if not blocked[x] and start is None:
            start = x
        if blocked[x] and start is not None:
            runs.append((start, x - 1))
            start = None
    if start is not None:
        runs.append((start, width))
    return runs
