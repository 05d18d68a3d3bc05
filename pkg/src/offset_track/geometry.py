"""Reference paths, Frenet matching, and the offset-point error relation.

Conventions used everywhere in this package:

* world poses are ``(x, y, heading)`` with heading in radians, CCW positive;
* lateral quantities (``y``, ``I_y``) are positive to the LEFT of the path /
  vehicle;
* curvature is positive for LEFT turns, so an arc of signed radius ``R``
  has curvature ``1/R``;
* the curvilinear abscissa ``s`` grows along the driving direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, FeasibilityError, MatchingError

LINE = "line"
ARC = "arc"

DEFAULT_MIN_RADIUS = 5.0
DEFAULT_CORRIDOR = 10.0

# Two matching candidates closer than this are considered equidistant; if
# their abscissae then differ by more than AMBIGUITY_SPREAD the match is
# ambiguous and broken toward the larger s.
EQUIDISTANT_TOL = 1e-6
AMBIGUITY_SPREAD = 0.5

_JOINT_TOL = 1e-6


def wrap_angle(angle: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    a = math.fmod(angle, 2.0 * math.pi)
    if a > math.pi:
        a -= 2.0 * math.pi
    elif a <= -math.pi:
        a += 2.0 * math.pi
    return a


@dataclass(frozen=True)
class Segment:
    """One path piece: a straight line or a constant-curvature arc.

    ``start_pose`` is the world pose at the segment entry; ``curvature`` is 0
    for lines and the signed inverse radius for arcs (positive = left turn).
    """

    kind: str
    start_pose: tuple[float, float, float]
    length: float
    curvature: float = 0.0

    def __post_init__(self):
        if self.kind not in (LINE, ARC):
            raise ValueError(f"unknown segment kind {self.kind!r}")
        if not self.length > 0.0:
            raise ValueError("segment length must be positive")
        if self.kind == LINE and self.curvature != 0.0:
            raise ValueError("line segments must have zero curvature")
        if self.kind == ARC and self.curvature == 0.0:
            raise ValueError("arc segments need a nonzero curvature")

    @classmethod
    def line(cls, start_pose, length):
        return cls(LINE, tuple(start_pose), float(length))

    @classmethod
    def arc(cls, start_pose, radius, angle):
        """Arc of signed ``radius`` (positive = left) turning through ``angle`` > 0 rad."""
        if radius == 0.0:
            raise ValueError("arc radius must be nonzero")
        if not angle > 0.0:
            raise ValueError("arc angle must be positive")
        return cls(ARC, tuple(start_pose), abs(radius) * angle, 1.0 / radius)

    def point_at(self, u: float) -> tuple[float, float]:
        """World point at local arc length ``u`` in [0, length]."""
        x0, y0, th = self.start_pose
        c = self.curvature
        if c == 0.0:
            return (x0 + u * math.cos(th), y0 + u * math.sin(th))
        # Rotate about the arc center located at signed distance 1/c on the left.
        beta = c * u
        return (
            x0 + (math.sin(th + beta) - math.sin(th)) / c,
            y0 - (math.cos(th + beta) - math.cos(th)) / c,
        )

    def heading_at(self, u: float) -> float:
        return self.start_pose[2] + self.curvature * u

    @property
    def end_pose(self) -> tuple[float, float, float]:
        x, y = self.point_at(self.length)
        return (x, y, wrap_angle(self.heading_at(self.length)))


@dataclass(frozen=True)
class FrenetState:
    """Tracking errors of the rear-axle center in the path frame.

    ``s`` matched abscissa [m], ``y`` signed lateral error [m] (left positive),
    ``psi_tilde`` angular deviation in (-pi, pi].  ``ambiguous`` flags matches
    broken by the larger-s tie rule.
    """

    s: float
    y: float
    psi_tilde: float
    ambiguous: bool = False


@dataclass(frozen=True)
class ImplementOffset:
    """Body-frame coordinates of the controlled implement point.

    ``i_s`` positive toward the front, ``i_y`` positive to the left.
    """

    i_s: float
    i_y: float

    @property
    def norm(self) -> float:
        return math.hypot(self.i_s, self.i_y)


@dataclass(frozen=True)
class ImplementError:
    """Implement tracking error and its curvature correction terms."""

    e_i: float
    e: float
    epsilon: float
    r_i: float


@dataclass(frozen=True)
class PointMatch:
    """Closest-point match of a bare world point (no heading)."""

    s: float
    y: float
    distance: float
    tangent_heading: float
    ambiguous: bool = False


class PathModel:
    """A G1-continuous chain of line and arc segments.

    Validates joint continuity and the minimum turning radius at
    construction.  ``name``/``role`` tag paths for bookkeeping (the tuner only
    accepts ``role="training"`` paths, the benchmark refuses them).
    """

    def __init__(self, segments, min_radius: float = DEFAULT_MIN_RADIUS,
                 name: str = "", role: str = ""):
        segments = tuple(segments)
        if not segments:
            raise ValueError("a path needs at least one segment")
        self.segments = segments
        self.min_radius = float(min_radius)
        self.name = name
        self.role = role

        cum = [0.0]
        for i, seg in enumerate(segments):
            if seg.kind == ARC and abs(seg.curvature) > 1.0 / self.min_radius + 1e-12:
                raise ValueError(
                    f"segment {i}: radius {1.0 / abs(seg.curvature):.3f} m below "
                    f"minimum {self.min_radius} m"
                )
            if i > 0:
                px, py, ph = segments[i - 1].end_pose
                qx, qy, qh = seg.start_pose
                if math.hypot(qx - px, qy - py) > _JOINT_TOL:
                    raise ValueError(f"segments {i - 1}->{i}: position gap at joint")
                if abs(wrap_angle(qh - ph)) > _JOINT_TOL:
                    raise ValueError(f"segments {i - 1}->{i}: tangent kink at joint")
            cum.append(cum[-1] + seg.length)
        self._cum = tuple(cum)
        self.total_length = cum[-1]

        # Flat per-segment records for the hot matching loop:
        # (is_arc, x0, y0, cos, sin, heading, length, curvature, cx, cy, |R|, s_start)
        flat = []
        for seg, s0 in zip(segments, cum):
            x0, y0, th = seg.start_pose
            ct, st = math.cos(th), math.sin(th)
            if seg.curvature == 0.0:
                flat.append((False, x0, y0, ct, st, th, seg.length, 0.0, 0.0, 0.0, 0.0, s0))
            else:
                r = 1.0 / seg.curvature
                cx, cy = x0 - r * st, y0 + r * ct
                flat.append((True, x0, y0, ct, st, th, seg.length, seg.curvature,
                             cx, cy, abs(r), s0))
        self._flat = flat

    @property
    def joints(self) -> tuple[float, ...]:
        """Abscissae of the interior segment joints (curvature transitions)."""
        return self._cum[1:-1]

    def segment_index_at(self, s: float) -> int:
        """Index of the segment containing ``s``; joints go to the downstream segment."""
        if s < -1e-12 or s > self.total_length + 1e-12:
            raise DomainError(f"abscissa {s} outside [0, {self.total_length}]")
        lo, hi = 0, len(self.segments) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if s >= self._cum[mid + 1]:
                lo = mid + 1
            else:
                hi = mid
        return lo

    def curvature_at(self, s: float) -> float:
        """Signed curvature at ``s`` (downstream segment at joints)."""
        return self.segments[self.segment_index_at(s)].curvature

    def point_at(self, s: float) -> tuple[float, float]:
        i = self.segment_index_at(s)
        return self.segments[i].point_at(s - self._cum[i])

    def heading_at(self, s: float) -> float:
        i = self.segment_index_at(s)
        return wrap_angle(self.segments[i].heading_at(s - self._cum[i]))

    def pose_at(self, s: float) -> tuple[float, float, float]:
        i = self.segment_index_at(s)
        u = s - self._cum[i]
        x, y = self.segments[i].point_at(u)
        return (x, y, wrap_angle(self.segments[i].heading_at(u)))

    def frenet_to_world(self, s: float, y: float) -> tuple[float, float]:
        """World point at lateral offset ``y`` (left positive) from abscissa ``s``."""
        px, py = self.point_at(s)
        th = self.heading_at(s)
        return (px - y * math.sin(th), py + y * math.cos(th))

    def max_abs_curvature(self) -> float:
        return max(abs(seg.curvature) for seg in self.segments)

    # -- matching ---------------------------------------------------------

    def _candidates(self, px: float, py: float, window=None):
        """Per-segment closest-point candidates as (distance, s, y, heading)."""
        out = []
        two_pi = 2.0 * math.pi
        for rec in self._flat:
            is_arc, x0, y0, ct, st, length, c, cx, cy, rad, s0 = rec
            if window is not None and (s0 + length < window[0] or s0 > window[1]):
                continue
            if not is_arc:
                dx = px - x0
                dy = py - y0
                u = dx * ct + dy * st
                if u < 0.0:
                    u = 0.0
                elif u > length:
                    u = length
                fx = x0 + u * ct
                fy = y0 + u * st
                yl = -(px - fx) * st + (py - fy) * ct
                out.append((math.hypot(px - fx, py - fy), s0 + u, yl, math.atan2(st, ct)))
            else:
                dxc = px - cx
                dyc = py - cy
                dc = math.hypot(dxc, dyc)
                if dc > 1e-12:
                    phi0 = math.atan2(y0 - cy, x0 - cx)
                    dphi = math.fmod(math.atan2(dyc, dxc) - phi0, two_pi)
                    if c > 0.0:
                        if dphi < 0.0:
                            dphi += two_pi
                    else:
                        if dphi > 0.0:
                            dphi -= two_pi
                    u = dphi / c
                    if u <= length:
                        th = x0 * 0.0 + math.atan2(st, ct) + c * u
                        yl = (rad - dc) * (1.0 if c > 0.0 else -1.0)
                        out.append((abs(yl), s0 + u, yl, wrap_angle(th)))
                        continue
                # Degenerate center point or beyond the sweep: ends compete.
                for u in (0.0, length):
                    beta = c * u
                    fx = x0 + (math.sin(math.atan2(st, ct) + beta) - st) / c
                    fy = y0 - (math.cos(math.atan2(st, ct) + beta) - ct) / c
                    th = math.atan2(st, ct) + beta
                    yl = -(px - fx) * math.sin(th) + (py - fy) * math.cos(th)
                    out.append((math.hypot(px - fx, py - fy), s0 + u, yl, wrap_angle(th)))
        return out

    def match_point(self, point, corridor: float = DEFAULT_CORRIDOR,
                    s_hint: float | None = None) -> PointMatch:
        """Closest path point to a bare world point.

        ``s_hint`` restricts the scan to segments near a previous abscissa
        (valid on paths whose far-apart pieces keep clear of each other); the
        full scan is retried automatically if the hinted result is out of
        corridor.
        """
        px, py = point
        window = None
        if s_hint is not None:
            window = (s_hint - 25.0, s_hint + 25.0)
        cands = self._candidates(px, py, window)
        best = min(cands, key=lambda t: t[0]) if cands else None
        if window is not None and (best is None or best[0] > corridor):
            cands = self._candidates(px, py, None)
            best = min(cands, key=lambda t: t[0])
        if best[0] > corridor:
            raise MatchingError(
                f"point ({px:.2f}, {py:.2f}) is {best[0]:.2f} m from the path "
                f"(corridor {corridor} m)"
            )
        near = [t for t in cands if t[0] <= best[0] + EQUIDISTANT_TOL]
        ambiguous = False
        if len(near) > 1:
            smin = min(t[1] for t in near)
            smax = max(t[1] for t in near)
            if smax - smin > AMBIGUITY_SPREAD:
                best = max(near, key=lambda t: t[1])
                ambiguous = True
        return PointMatch(best[1], best[2], best[0], best[3], ambiguous)


def curvature_at(path: PathModel, s: float) -> float:
    """Signed path curvature at ``s``; joints report the downstream segment."""
    return path.curvature_at(s)


def match_to_path(path: PathModel, pose, corridor: float = DEFAULT_CORRIDOR,
                  s_hint: float | None = None) -> FrenetState:
    """Frenet errors of a full pose (rear-axle center) against the path."""
    m = path.match_point((pose[0], pose[1]), corridor, s_hint)
    return FrenetState(m.s, m.y, wrap_angle(pose[2] - m.tangent_heading), m.ambiguous)


def check_offset_feasible(curvature: float, off: ImplementOffset) -> None:
    """Reject offsets reaching past the osculating-circle radius.

    This is the existence condition of the error relation: it also keeps the
    arcsin argument ``c * r_I`` strictly inside (-1, 1).
    """
    if curvature != 0.0 and off.norm >= 1.0 / abs(curvature):
        raise FeasibilityError(
            f"offset norm {off.norm:.3f} m reaches the curvature radius "
            f"{1.0 / abs(curvature):.3f} m",
            curvature,
        )


def implement_error(f: FrenetState, curvature: float, off: ImplementOffset) -> ImplementError:
    """Implement tracking error from the center errors and local curvature.

    e_I = y + I_s sin(psi) + I_y cos(psi) + e, where e is the osculating
    correction, exactly zero on straight segments.
    """
    check_offset_feasible(curvature, off)
    sp = math.sin(f.psi_tilde)
    cp = math.cos(f.psi_tilde)
    r_i = off.i_s * cp + off.i_y * sp
    base = f.y + off.i_s * sp + off.i_y * cp
    if curvature == 0.0:
        return ImplementError(base, 0.0, 0.0, r_i)
    arg = curvature * r_i
    if abs(arg) >= 1.0:
        raise FeasibilityError(
            f"tangential offset {r_i:.3f} m reaches the curvature radius "
            f"{1.0 / abs(curvature):.3f} m",
            curvature,
        )
    eps = math.asin(arg)
    e = -(1.0 - math.cos(eps)) / curvature
    return ImplementError(base + e, e, eps, r_i)


def implement_world_position(pose, off: ImplementOffset) -> tuple[float, float]:
    """Rigid-body transform of the implement offset by the vehicle pose."""
    x, y, th = pose
    ct, st = math.cos(th), math.sin(th)
    return (x + off.i_s * ct - off.i_y * st, y + off.i_s * st + off.i_y * ct)


def true_implement_error(path: PathModel, implement_point,
                         corridor: float = DEFAULT_CORRIDOR,
                         s_hint: float | None = None) -> float:
    """Signed lateral distance of the implement from its own closest path point."""
    return path.match_point(implement_point, corridor, s_hint).y


def build_path(start_pose, pieces, min_radius: float = DEFAULT_MIN_RADIUS,
               name: str = "", role: str = "") -> PathModel:
    """Chain segments from a start pose.

    ``pieces`` is a sequence of ``("line", length)`` and
    ``("arc", radius, angle)`` tuples (signed radius, positive = left;
    angle in radians).  Joints are G1-continuous by construction.
    """
    pose = (float(start_pose[0]), float(start_pose[1]), float(start_pose[2]))
    segs = []
    for piece in pieces:
        if piece[0] == LINE:
            seg = Segment.line(pose, piece[1])
        elif piece[0] == ARC:
            seg = Segment.arc(pose, piece[1], piece[2])
        else:
            raise ValueError(f"unknown piece kind {piece[0]!r}")
        segs.append(seg)
        pose = seg.end_pose
    return PathModel(segs, min_radius, name=name, role=role)
