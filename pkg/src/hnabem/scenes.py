"""Built-in experiment scenes and the scene-file format.

Scene files are plain text::

    [polygon]
    0.0 0.0
    ...
    [obstacle]            # repeatable; "smooth = true" marks sampled curves
    0.0 0.0
    ...
    [wave]
    k = 20.0
    d = 0.7071 0.7071
    eta = 20.0            # optional, defaults to k

Lengths are dimensionless model units; d is normalized on load.
"""

import numpy as np

from .errors import Degenerate, UnknownScene
from .geometry import Scene, SmallObstacle, build_polygon, make_scene

DEFAULT_DIRECTION = np.array([1.0, 1.0]) / np.sqrt(2.0)


def _big_triangle():
    """Equilateral triangle, perimeter 6 pi, centered at the origin.

    Outward side normals point at 45, 165 and 285 degrees, so side 0 is in
    shadow and sides 1, 2 are illuminated for d = (1,1)/sqrt(2).
    """
    r = 2.0 * np.pi / np.sqrt(3.0)
    ang = np.deg2rad([-15.0, 105.0, 225.0])
    return r * np.column_stack([np.cos(ang), np.sin(ang)])


def _small_triangle(dist):
    """Small equilateral triangle (side pi/5) facing side 1 of the big one.

    Its near side is parallel to side 1 at perpendicular distance `dist`,
    centered on the side midpoint's outward normal line, apex pointing away.
    """
    big = _big_triangle()
    mid = 0.5 * (big[1] + big[2])
    tau = (big[2] - big[1]) / np.linalg.norm(big[2] - big[1])
    nrm = np.array([tau[1], -tau[0]])
    a = np.pi / 5.0
    base1 = mid + dist * nrm + 0.5 * a * tau
    base2 = mid + dist * nrm - 0.5 * a * tau
    apex = mid + (dist + 0.5 * np.sqrt(3.0) * a) * nrm
    return np.array([base1, base2, apex]), tau


def regular_polygon(n, radius=1.0, center=(0.0, 0.0)):
    ang = 2.0 * np.pi * (np.arange(n) + 0.5) / n
    return np.asarray(center) + radius * np.column_stack([np.cos(ang), np.sin(ang)])


def builtin_scene(name: str, k: float, d=None, eta=None) -> Scene:
    """Built-in configurations: exp1, exp2 (separation 3 pi / k), exp3, circle."""
    if name == "exp1":
        tri, _ = _small_triangle(np.sqrt(3.0) * np.pi / 5.0)
        return make_scene(_big_triangle(), [tri], k,
                          DEFAULT_DIRECTION if d is None else d, eta=eta)
    if name == "exp2":
        tri, _ = _small_triangle(3.0 * np.pi / k)
        return make_scene(_big_triangle(), [tri], k,
                          DEFAULT_DIRECTION if d is None else d, eta=eta)
    if name == "exp3":
        tri, tau = _small_triangle(np.sqrt(3.0) * np.pi / 5.0)
        return make_scene(_big_triangle(), [tri + 0.5 * tau, tri - 0.5 * tau], k,
                          DEFAULT_DIRECTION if d is None else d, eta=eta)
    if name == "circle":
        return make_scene(regular_polygon(192), [], k,
                          (1.0, 0.0) if d is None else d, eta=eta)
    raise UnknownScene(f"unknown builtin scene {name!r}")


def exp3_trap_region():
    """Side-local frame of exp3's trapping channel: (origin, tau, normal, extents).

    The returned box (xi in [-1, 1], zeta in [0.03, sqrt(3) pi/5 + 0.5]) spans
    the cavity between the polygon's middle side and the two small triangles.
    """
    big = _big_triangle()
    mid = 0.5 * (big[1] + big[2])
    tau = (big[2] - big[1]) / np.linalg.norm(big[2] - big[1])
    nrm = np.array([tau[1], -tau[0]])
    return mid, tau, nrm, (-1.0, 1.0), (0.03, np.sqrt(3.0) * np.pi / 5.0 + 0.5)


def scene_to_text(scene: Scene) -> str:
    lines = ["[polygon]"]
    for v in scene.polygon.vertices:
        lines.append(f"{v[0]:.17g} {v[1]:.17g}")
    for ob in scene.obstacles:
        lines.append("[obstacle]")
        if ob.smooth:
            lines.append("smooth = true")
        for v in ob.vertices:
            lines.append(f"{v[0]:.17g} {v[1]:.17g}")
    lines.append("[wave]")
    lines.append(f"k = {scene.k:.17g}")
    lines.append(f"d = {scene.d[0]:.17g} {scene.d[1]:.17g}")
    lines.append(f"eta = {scene.eta:.17g}")
    return "\n".join(lines) + "\n"


def parse_scene_text(text: str, k=None, eta=None) -> Scene:
    """Parse the scene format; k/eta arguments override the [wave] section."""
    section = None
    poly_v = []
    obstacles = []
    smooth = []
    wave = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            section = line.strip("[]").strip().lower()
            if section == "obstacle":
                obstacles.append([])
                smooth.append(False)
            elif section not in ("polygon", "wave"):
                raise Degenerate(f"unknown scene section [{section}]")
            continue
        if section is None:
            raise Degenerate("scene data before any section header")
        if "=" in line:
            key, val = (t.strip() for t in line.split("=", 1))
            if section == "obstacle" and key == "smooth":
                smooth[-1] = val.lower() in ("1", "true", "yes")
            elif section == "wave":
                wave[key] = val
            else:
                raise Degenerate(f"unexpected key {key!r} in [{section}]")
            continue
        parts = line.split()
        if len(parts) != 2:
            raise Degenerate(f"expected two coordinates, got {line!r}")
        xy = [float(parts[0]), float(parts[1])]
        if section == "polygon":
            poly_v.append(xy)
        elif section == "obstacle":
            obstacles[-1].append(xy)
        else:
            raise Degenerate("coordinates inside [wave]")
    if not poly_v:
        raise Degenerate("scene has no [polygon] section")
    if k is None:
        if "k" not in wave:
            raise Degenerate("no wavenumber: pass k or add it to [wave]")
        k = float(wave["k"])
    if eta is None:
        eta = float(wave["eta"]) if "eta" in wave else None
    dvals = wave.get("d", "1 0").split()
    d = np.array([float(dvals[0]), float(dvals[1])])
    return make_scene(np.array(poly_v), [np.array(o) for o in obstacles],
                      k=k, d=d, eta=eta, smooth_flags=smooth)


def load_scene(path_or_name: str, k=None, d=None, eta=None) -> Scene:
    """Load a scene file, or build a builtin by name (exp1/exp2/exp3/circle)."""
    import os

    if path_or_name in ("exp1", "exp2", "exp3", "circle"):
        if k is None:
            raise Degenerate("builtin scenes need an explicit wavenumber")
        return builtin_scene(path_or_name, k=k, d=d, eta=eta)
    if not os.path.exists(path_or_name):
        raise FileNotFoundError(path_or_name)
    with open(path_or_name) as fh:
        scene = parse_scene_text(fh.read(), k=k, eta=eta)
    if d is not None:
        scene = Scene(polygon=scene.polygon, obstacles=scene.obstacles,
                      k=scene.k, d=np.asarray(d, float), eta=scene.eta)
    return scene
