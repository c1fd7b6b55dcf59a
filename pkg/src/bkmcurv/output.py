"""File emitters: curve CSV, sorted-key JSON and a dependency-free SVG line chart."""

from __future__ import annotations

import io
import json
import math
import os
import tempfile
from xml.sax.saxutils import escape

CSV_HEADER = ("T", "theta", "x", "psi", "g11", "g12", "g22", "det_g", "R1212", "R", "quality")
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def atomic_write(path, text):
    """Write ``text`` (UTF-8, LF newlines) to ``path`` via a temporary file and rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def fmt(v):
    """Shortest round-trip representation of a double."""
    return repr(float(v))


def curve_csv(points):
    buf = io.StringIO()
    buf.write(",".join(CSV_HEADER) + "\n")
    for p in points:
        row = [p.t, p.theta, p.x, p.psi, p.g11, p.g12, p.g22, p.det_g, p.r1212, p.scalar_r]
        buf.write(",".join(fmt(v) for v in row) + "," + p.quality + "\n")
    return buf.getvalue()


def spectrum_csv(eigenvalues):
    lines = ["index,eigenvalue"] + [f"{i},{fmt(v)}" for i, v in enumerate(eigenvalues)]
    return "\n".join(lines) + "\n"


def _clean(obj):
    # JSON has no NaN/inf; emit null instead
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def to_json(obj, indent=None):
    return json.dumps(_clean(obj), sort_keys=True, indent=indent, allow_nan=False)


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------

WIDTH, HEIGHT = 720, 480
MARGIN = dict(left=80, right=20, top=30, bottom=60)


def _c(v):
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def _nice_ticks(lo, hi, n=5):
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(v) < 1e-12 * step else v)
        v += step
    return ticks


def _tick_label(v):
    return f"{v:g}"


def render_svg(curves, log_y=False, title="", x_label="T", y_label="R"):
    """SVG document for ``curves = [(label, ts, rs), ...]``; x is always logarithmic.

    With a linear y axis, segments touching negative R are overlaid dashed.
    With ``log_y``, non-positive values cannot be placed and are left out.
    """
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]
    series = []
    for label, ts, rs in curves:
        pts = [(float(t), float(r)) for t, r in zip(ts, rs)
               if t > 0 and math.isfinite(r) and (r > 0 or not log_y)]
        series.append((label, pts))
    all_t = [t for _, pts in series for t, _ in pts]
    all_r = [r for _, pts in series for _, r in pts]
    if not all_t:
        raise ValueError("nothing to plot")
    lx0, lx1 = math.log10(min(all_t)), math.log10(max(all_t))
    if lx1 == lx0:
        lx0, lx1 = lx0 - 0.5, lx1 + 0.5
    if log_y:
        y0, y1 = math.log10(min(all_r)), math.log10(max(all_r))
    else:
        y0, y1 = min(all_r), max(all_r)
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 0.04 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    def px(t):
        return MARGIN["left"] + (math.log10(t) - lx0) / (lx1 - lx0) * pw

    def py(r):
        v = math.log10(r) if log_y else r
        return MARGIN["top"] + (y1 - v) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{_c(WIDTH / 2)}" y="18" text-anchor="middle" font-size="14">{escape(title)}</text>')
    left, right = MARGIN["left"], MARGIN["left"] + pw
    top, bottom = MARGIN["top"], MARGIN["top"] + ph
    out.append('<g class="axes" stroke="black" fill="none">')
    out.append(f'<line x1="{_c(left)}" y1="{_c(bottom)}" x2="{_c(right)}" y2="{_c(bottom)}"/>')
    out.append(f'<line x1="{_c(left)}" y1="{_c(top)}" x2="{_c(left)}" y2="{_c(bottom)}"/>')
    out.append("</g>")
    labels = ['<g class="ticks" font-size="11" fill="black">']
    for e in range(math.ceil(lx0 - 1e-9), math.floor(lx1 + 1e-9) + 1):
        x = px(10.0**e)
        labels.append(f'<line x1="{_c(x)}" y1="{_c(bottom)}" x2="{_c(x)}" y2="{_c(bottom + 5)}" stroke="black"/>')
        labels.append(f'<text x="{_c(x)}" y="{_c(bottom + 18)}" text-anchor="middle">{_tick_label(10.0**e)}</text>')
    if log_y:
        yt = [(e, 10.0**e) for e in range(math.ceil(y0), math.floor(y1) + 1)]
        ypos = [(MARGIN["top"] + (y1 - e) / (y1 - y0) * ph, f"1e{e}") for e, _ in yt]
    else:
        ypos = [(py(v), _tick_label(v)) for v in _nice_ticks(y0, y1)]
    for y, text in ypos:
        labels.append(f'<line x1="{_c(left - 5)}" y1="{_c(y)}" x2="{_c(left)}" y2="{_c(y)}" stroke="black"/>')
        labels.append(f'<text x="{_c(left - 8)}" y="{_c(y + 4)}" text-anchor="end">{escape(text)}</text>')
    labels.append(f'<text x="{_c(left + pw / 2)}" y="{_c(HEIGHT - 15)}" text-anchor="middle" font-size="13">{escape(x_label)}</text>')
    labels.append(
        f'<text x="18" y="{_c(top + ph / 2)}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 18 {_c(top + ph / 2)})">{escape(y_label)}</text>'
    )
    labels.append("</g>")
    out.extend(labels)
    if not log_y and y0 < 0 < y1:
        out.append(f'<line class="zero" x1="{_c(left)}" y1="{_c(py(0.0))}" x2="{_c(right)}" y2="{_c(py(0.0))}" '
                   'stroke="#999999" stroke-dasharray="2 3"/>')

    for i, (label, pts) in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        coords = " ".join(f"{_c(px(t))},{_c(py(r))}" for t, r in pts)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"><title>{escape(label)}</title></polyline>')
        if not log_y:
            segs = [
                f"M{_c(px(a[0]))},{_c(py(a[1]))}L{_c(px(b[0]))},{_c(py(b[1]))}"
                for a, b in zip(pts, pts[1:]) if a[1] < 0 or b[1] < 0
            ]
            if segs:
                d = "".join(segs)
                # blank the solid stroke underneath, then draw the dashed overlay
                out.append(f'<path class="negative-mask" d="{d}" fill="none" stroke="white" stroke-width="2.5"/>')
                out.append(f'<path class="negative" d="{d}" fill="none" stroke="{color}" stroke-width="1.5" stroke-dasharray="5 3"/>')
    legend_y = top + 14
    for i, (label, _) in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        y = legend_y + 16 * i
        out.append(f'<line x1="{_c(right - 150)}" y1="{_c(y)}" x2="{_c(right - 126)}" y2="{_c(y)}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{_c(right - 120)}" y="{_c(y + 4)}" font-size="11">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
