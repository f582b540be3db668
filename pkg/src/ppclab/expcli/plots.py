"""Standalone SVG plots for pair-correlation curves and energy reports."""
import math
from xml.sax.saxutils import escape

import numpy as np

from ppclab.energy import EnergyReport
from ppclab.errors import DomainError
from ppclab.paircorr import PairCorrCurve

W, H = 480, 360
LEFT, RIGHT, TOP, BOTTOM = 60, 20, 20, 50


def _scale(lo, hi, a, b):
    if hi <= lo:
        lo, hi = lo - 0.5, hi + 0.5
    return lambda v: a + (v - lo) * (b - a) / (hi - lo)


def _axes(xlo, xhi, ylo, yhi, xlabel, ylabel):
    sx = _scale(xlo, xhi, LEFT, W - RIGHT)
    sy = _scale(ylo, yhi, H - BOTTOM, TOP)
    parts = ['<g class="axes" stroke="black" fill="black" font-size="11">',
             f'<line x1="{LEFT}" y1="{H - BOTTOM}" x2="{W - RIGHT}" y2="{H - BOTTOM}"/>',
             f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{H - BOTTOM}"/>']
    for v in np.linspace(xlo, xhi, 5):
        x = sx(v)
        parts.append(f'<text x="{x:.1f}" y="{H - BOTTOM + 15}" text-anchor="middle" '
                     f'stroke="none">{v:.3g}</text>')
    for v in np.linspace(ylo, yhi, 5):
        y = sy(v)
        parts.append(f'<text x="{LEFT - 5}" y="{y:.1f}" text-anchor="end" '
                     f'stroke="none">{v:.3g}</text>')
    parts.append(f'<text x="{(LEFT + W - RIGHT) / 2}" y="{H - 10}" text-anchor="middle" '
                 f'stroke="none">{escape(xlabel)}</text>')
    parts.append(f'<text x="15" y="{(TOP + H - BOTTOM) / 2}" text-anchor="middle" stroke="none" '
                 f'transform="rotate(-90 15 {(TOP + H - BOTTOM) / 2})">{escape(ylabel)}</text>')
    parts.append("</g>")
    return sx, sy, parts


def _polyline(xs, ys, sx, sy, color, dash=None):
    pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys))
    extra = f' stroke-dasharray="{dash}"' if dash else ""
    return f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{extra} points="{pts}"/>'


def _svg(parts):
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
            f'viewBox="0 0 {W} {H}">\n' + "\n".join(parts) + "\n</svg>\n")


def _curve_svg(curve):
    s = np.asarray(curve.s_grid, dtype=float)
    r2 = np.asarray(curve.r2, dtype=float)
    ref = np.asarray(curve.reference, dtype=float)
    ys = np.concatenate([r2, ref])
    sx, sy, parts = _axes(0.0, float(s.max()), 0.0, float(ys.max()) * 1.05 or 1.0,
                          "s", f"R2 (N={curve.N}, d={curve.d})")
    parts.append(_polyline(s, r2, sx, sy, "#1f77b4"))
    parts.append(_polyline(s, ref, sx, sy, "#d62728", dash="5,3"))
    parts.append(f'<text x="{W - RIGHT - 5}" y="{TOP + 12}" text-anchor="end" font-size="11">'
                 f'empirical (solid), (2s)^d reference (dashed)</text>')
    return _svg(parts)


def _energy_svg(rep):
    lx = np.log(np.asarray(rep.Ns, dtype=float))
    ly = np.log(np.asarray(rep.counts, dtype=float))
    sx, sy, parts = _axes(float(lx.min()), float(lx.max()), float(ly.min()), float(ly.max()),
                          "log N", "log count")
    for x, y in zip(lx, ly):
        parts.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="3" fill="#1f77b4"/>')
    if rep.slope is not None:
        intercept = float(np.mean(ly) - rep.slope * np.mean(lx))
        ends = np.array([lx.min(), lx.max()])
        parts.append(_polyline(ends, intercept + rep.slope * ends, sx, sy, "#d62728"))
        label = f"slope={rep.slope:.3f}±{rep.slope_stderr:.3f}"
    else:
        label = "slope=n/a"
    parts.append(f'<text class="legend" x="{LEFT + 10}" y="{TOP + 12}" font-size="12">'
                 f'{escape(label)}</text>')
    return _svg(parts)


def emit_plot(obj, path):
    """Write ``obj`` (a PairCorrCurve or EnergyReport) as a standalone SVG file."""
    if isinstance(obj, PairCorrCurve):
        if len(obj.s_grid) == 0:
            raise DomainError("cannot plot an empty curve")
        text = _curve_svg(obj)
    elif isinstance(obj, EnergyReport):
        if len(obj.Ns) == 0 or any(c <= 0 for c in obj.counts) or not all(map(math.isfinite, obj.counts)):
            raise DomainError("cannot plot an empty or non-positive energy report")
        text = _energy_svg(obj)
    else:
        raise DomainError(f"no plot for {type(obj).__name__}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path
