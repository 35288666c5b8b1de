"""Escape-time pictures of scalar Julia sets and one-parameter matrix slices.

Each pixel centre c is classified either as a point of the plane (Scalar
family) or through a matrix built from c: the Jordan block J(c, s), or
A + c B. Matrix pixels are classified from the spectrum (Spectral mode) or
by iterating the matrix itself (DirectOrbit mode).
"""

from __future__ import annotations

import enum
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .cmatrix import jordan_block
from .errors import NumericError
from .matrix_dyn import (
    DEFAULT_BOUND,
    ClassifyParams,
    MatrixVerdict,
    OrbitKind,
    bounded_orbit,
    classify_matrix_spectral,
)
from .poly import MonicPoly, format_poly
from .scalar_dyn import DEFAULT_EPS, Verdict, classify_neighborhood

# verdict codes stored per pixel
ESCAPE = 0
ATTRACTED = 1
BOUNDED = 2
JULIA = 3
UNDECIDED = 4
CODE_NAMES = {
    ESCAPE: "escape",
    ATTRACTED: "attracted",
    BOUNDED: "bounded-other",
    JULIA: "julia-proximate",
    UNDECIDED: "undecided",
}

# fixed palette; escape colour is shaded by iteration count
PALETTE = {
    ATTRACTED: (40, 70, 160),
    BOUNDED: (30, 140, 90),
    JULIA: (255, 255, 255),
    UNDECIDED: (128, 128, 128),
}
ESCAPE_PERIOD = 32


def escape_rgb(iteration: int) -> tuple[int, int, int]:
    """Escape shade: a sawtooth over 32 iterations from bright to dark orange."""
    t = (max(iteration, 0) % ESCAPE_PERIOD) / (ESCAPE_PERIOD - 1)
    return (int(round(250 - 200 * t)), int(round(160 - 140 * t)), int(round(40 - 30 * t)))


class Mode(str, enum.Enum):
    SPECTRAL = "spectral"
    ORBIT = "orbit"


@dataclass(frozen=True)
class GridSpec:
    center: complex
    width: float
    height: float
    px_w: int
    px_h: int

    def __post_init__(self):
        if self.px_w < 16 or self.px_h < 16:
            raise ValueError("grids need at least 16 pixels per side")
        if not (self.width > 0 and self.height > 0):
            raise ValueError("width and height must be positive")
        object.__setattr__(self, "center", complex(self.center))

    @classmethod
    def square(cls, center: complex, width: float, px: int) -> "GridSpec":
        return cls(center, width, width, px, px)

    def point(self, i: int, j: int) -> complex:
        """Centre of pixel (row i, column j); row 0 is the top edge."""
        # integer numerators keep pixel centres exact when the geometry allows
        re = self.center.real + (2 * j + 1 - self.px_w) * self.width / (2 * self.px_w)
        im = self.center.imag + (self.px_h - 2 * i - 1) * self.height / (2 * self.px_h)
        return complex(re, im)

    @property
    def half_diagonal(self) -> float:
        return 0.5 * math.hypot(self.width / self.px_w, self.height / self.px_h)

    def to_json(self) -> dict:
        return {
            "center": [self.center.real, self.center.imag],
            "width": self.width,
            "height": self.height,
            "px_w": self.px_w,
            "px_h": self.px_h,
        }


@dataclass(frozen=True)
class SliceFamily:
    """c -> point (``scalar``), J(c, size) (``jordan``) or A + c B (``affine``)."""

    kind: str
    size: int = 0
    A: np.ndarray | None = None
    B: np.ndarray | None = None

    def __post_init__(self):
        if self.kind == "jordan" and self.size < 2:
            raise ValueError("Jordan slices need size >= 2")
        if self.kind == "affine":
            if self.A is None or self.B is None or self.A.shape != self.B.shape:
                raise ValueError("affine slices need A and B of the same dimension")
        if self.kind not in ("scalar", "jordan", "affine"):
            raise ValueError(f"unknown family {self.kind!r}")

    @classmethod
    def scalar(cls) -> "SliceFamily":
        return cls("scalar")

    @classmethod
    def jordan(cls, size: int) -> "SliceFamily":
        return cls("jordan", size)

    @classmethod
    def affine(cls, A, B) -> "SliceFamily":
        return cls("affine", 0, np.asarray(A, dtype=np.complex128), np.asarray(B, dtype=np.complex128))

    def matrix(self, c: complex) -> np.ndarray:
        if self.kind == "jordan":
            return jordan_block(c, self.size)
        if self.kind == "affine":
            return self.A + c * self.B
        raise ValueError("scalar family has no matrix")

    def describe(self) -> str:
        if self.kind == "jordan":
            return f"jordan:{self.size}"
        return self.kind


@dataclass(frozen=True)
class RenderParams:
    max_iter: int = 2000
    eps: float = DEFAULT_EPS
    orbit_iter: int = 200
    bound: float = DEFAULT_BOUND
    # None means half the pixel diagonal
    delta: float | None = None


@dataclass
class ClassGrid:
    spec: GridSpec
    mode: Mode
    codes: np.ndarray
    escape_iter: np.ndarray

    def histogram(self) -> dict[str, int]:
        return {name: int(np.sum(self.codes == code)) for code, name in CODE_NAMES.items()}

    @property
    def bounded_mask(self) -> np.ndarray:
        """Pixels whose own orbit (not its neighbourhood) was found bounded."""
        return (self.escape_iter < 0) & (self.codes != UNDECIDED)


def _scalar_pixel(p, c, delta, rp) -> tuple[int, int]:
    nb = classify_neighborhood(p, c, delta, rp.max_iter, rp.eps)
    esc = nb.center.escape_iter if nb.center.escape_iter is not None else -1
    if nb.proximate:
        return JULIA, esc
    if nb.undecided:
        return UNDECIDED, esc
    return _code_for(nb.center.verdict), esc


def _code_for(v: Verdict) -> int:
    return {
        Verdict.BASIN_INFINITY: ESCAPE,
        Verdict.ATTRACTING: ATTRACTED,
        Verdict.BOUNDED: BOUNDED,
        Verdict.UNDECIDED: UNDECIDED,
    }[v]


def _spectral_pixel(p, X, delta, rp) -> tuple[int, int]:
    try:
        mc = classify_matrix_spectral(p, X, ClassifyParams(delta, rp.max_iter, rp.eps))
    except NumericError:
        return UNDECIDED, -1
    esc_iters = [c.center.escape_iter for c in mc.eigen_classes if c.center.escape_iter is not None]
    esc = min(esc_iters) if esc_iters else -1
    if mc.verdict is MatrixVerdict.JULIA:
        return JULIA, esc
    if mc.verdict is MatrixVerdict.UNDECIDED:
        return UNDECIDED, esc
    if esc >= 0:
        return ESCAPE, esc
    if all(c.center.verdict is Verdict.ATTRACTING for c in mc.eigen_classes):
        return ATTRACTED, -1
    return BOUNDED, -1


def _orbit_pixel(p, X, rp) -> tuple[int, int]:
    st = bounded_orbit(p, X, rp.orbit_iter, rp.bound)
    if st.kind is OrbitKind.ESCAPED:
        return ESCAPE, st.iterations
    if st.kind is OrbitKind.BOUNDED:
        return BOUNDED, -1
    return UNDECIDED, -1


def _render_rows(args) -> tuple[np.ndarray, np.ndarray]:
    p, spec, family, mode, rp, rows = args
    delta = rp.delta if rp.delta is not None else spec.half_diagonal
    codes = np.empty((len(rows), spec.px_w), dtype=np.uint8)
    esc = np.empty((len(rows), spec.px_w), dtype=np.int32)
    for r, i in enumerate(rows):
        for j in range(spec.px_w):
            c = spec.point(i, j)
            if family.kind == "scalar":
                code, e = _scalar_pixel(p, c, delta, rp)
            elif mode is Mode.SPECTRAL:
                code, e = _spectral_pixel(p, family.matrix(c), delta, rp)
            else:
                code, e = _orbit_pixel(p, family.matrix(c), rp)
            codes[r, j] = code
            esc[r, j] = e
    return codes, esc


def render_grid(
    p: MonicPoly,
    spec: GridSpec,
    family: SliceFamily,
    mode: Mode | str = Mode.SPECTRAL,
    params: RenderParams = RenderParams(),
    workers: int = 1,
) -> ClassGrid:
    """Classify every pixel of ``spec``.

    Rows are independent, so ``workers > 1`` farms row blocks out to worker
    processes; the result does not depend on the worker count.
    """
    mode = Mode(mode)
    if workers < 1:
        raise ValueError("workers must be >= 1")
    blocks = [list(range(i, spec.px_h, max(workers, 1))) for i in range(workers)]
    jobs = [(p, spec, family, mode, params, rows) for rows in blocks if rows]
    if workers == 1:
        results = [_render_rows(jobs[0])]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_render_rows, jobs))
    codes = np.empty((spec.px_h, spec.px_w), dtype=np.uint8)
    esc = np.empty((spec.px_h, spec.px_w), dtype=np.int32)
    for (_, _, _, _, _, rows), (c, e) in zip(jobs, results):
        codes[rows] = c
        esc[rows] = e
    return ClassGrid(spec, mode, codes, esc)


def grid_rgb(grid: ClassGrid) -> np.ndarray:
    h, w = grid.codes.shape
    rgb = np.empty((h, w, 3), dtype=np.uint8)
    for code, colour in PALETTE.items():
        rgb[grid.codes == code] = colour
    ei, ej = np.nonzero(grid.codes == ESCAPE)
    for i, j in zip(ei, ej):
        rgb[i, j] = escape_rgb(int(grid.escape_iter[i, j]))
    return rgb


def write_ppm(grid: ClassGrid) -> bytes:
    """Binary P6 image of the verdict grid, rows top to bottom."""
    h, w = grid.codes.shape
    header = f"P6\n{w} {h}\n255\n".encode("ascii")
    return header + grid_rgb(grid).tobytes()


def sidecar(p: MonicPoly, grid: ClassGrid, family: SliceFamily, params: RenderParams) -> dict:
    delta = params.delta if params.delta is not None else grid.spec.half_diagonal
    prm = asdict(params)
    prm["delta"] = delta
    return {
        "poly": format_poly(p),
        "family": family.describe(),
        "mode": grid.mode.value,
        "grid": grid.spec.to_json(),
        "params": prm,
        "histogram": grid.histogram(),
        "palette": {CODE_NAMES[k]: list(v) for k, v in PALETTE.items()},
    }


def save_render(path: str, p: MonicPoly, grid: ClassGrid, family: SliceFamily,
                params: RenderParams) -> dict:
    with open(path, "wb") as fh:
        fh.write(write_ppm(grid))
    meta = sidecar(p, grid, family, params)
    side = path.rsplit(".", 1)[0] + ".json" if "." in path else path + ".json"
    with open(side, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
    meta["sidecar"] = side
    return meta
