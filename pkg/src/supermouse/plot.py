"""SVG rendering of a mouse trajectory in the octant."""
from __future__ import annotations

from .mouse import SuperMouseProgram, initial_config, iter_steps

SIZE = 400
MARGIN = 20


def trajectory(program: SuperMouseProgram, start_x: int = 1, steps: int = 100):
    """Split the walk into polylines between resets; also return the hit points."""
    cfg = initial_config(program, start_x)
    segments = [[(cfg.x, cfg.y)]]
    hits = []
    for cfg, hit in iter_steps(program, start_x, steps):
        if hit is None:
            segments[-1].append((cfg.x, cfg.y))
        else:
            a = hit.x_value
            segments[-1].append((a, a))
            hits.append(a)
            segments.append([(a, 0)])
    if len(segments[-1]) == 1 and hits:
        segments.pop()
    return segments, hits


def render_svg(program: SuperMouseProgram, start_x: int = 1, steps: int = 100) -> str:
    segments, hits = trajectory(program, start_x, steps)
    span = max(max(x for seg in segments for x, _ in seg), 1)
    scale = (SIZE - 2 * MARGIN) / span

    def px(x, y):
        return f"{MARGIN + x * scale:.3f},{SIZE - MARGIN - y * scale:.3f}"

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">',
        f'<line class="axis" x1="{MARGIN}" y1="{SIZE - MARGIN}" x2="{SIZE - MARGIN}" y2="{SIZE - MARGIN}" stroke="black"/>',
    ]
    d0, d1 = px(0, 0).split(","), px(span, span).split(",")
    out.append(f'<line class="diagonal" x1="{d0[0]}" y1="{d0[1]}" x2="{d1[0]}" y2="{d1[1]}" stroke="gray" stroke-dasharray="4"/>')
    sx, sy = px(start_x, 0).split(",")
    out.append(f'<circle class="start" cx="{sx}" cy="{sy}" r="3" fill="green"/>')
    for seg in segments:
        if len(seg) > 1:
            pts = " ".join(px(x, y) for x, y in seg)
            out.append(f'<polyline class="path" points="{pts}" fill="none" stroke="blue"/>')
    for a in hits:
        cx, cy = px(a, a).split(",")
        out.append(f'<circle class="reset" cx="{cx}" cy="{cy}" r="3" fill="red"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
