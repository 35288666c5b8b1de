import numpy as np
import pytest

from matfatou.poly import MonicPoly
from matfatou.render import (
    ATTRACTED,
    BOUNDED,
    ESCAPE,
    JULIA,
    PALETTE,
    UNDECIDED,
    ClassGrid,
    GridSpec,
    Mode,
    RenderParams,
    SliceFamily,
    escape_rgb,
    render_grid,
    save_render,
    write_ppm,
)

Z2 = MonicPoly.power(2)


def _grid(code, esc=-1, px=16):
    spec = GridSpec.square(0, 4, px)
    return ClassGrid(
        spec,
        Mode.SPECTRAL,
        np.full((px, px), code, dtype=np.uint8),
        np.full((px, px), esc, dtype=np.int32),
    )


def test_ppm_all_attracted():
    data = write_ppm(_grid(ATTRACTED))
    header = b"P6\n16 16\n255\n"
    assert data.startswith(header)
    body = data[len(header):]
    assert len(body) == 768
    assert body == bytes(PALETTE[ATTRACTED]) * 256


def test_ppm_escape_shading():
    assert escape_rgb(1) == (244, 155, 39)
    data = write_ppm(_grid(ESCAPE, esc=1))
    assert data[-3:] == bytes(escape_rgb(1))
    assert escape_rgb(0) != escape_rgb(16)
    assert escape_rgb(5) == escape_rgb(5 + 32)
    assert PALETTE[JULIA] == (255, 255, 255)


def test_grid_geometry():
    spec = GridSpec.square(0, 4.25, 17)
    assert spec.point(8, 8) == 0
    assert spec.point(8, 12) == 1
    assert spec.point(4, 8) == 1j
    assert spec.point(0, 0).real < 0 < spec.point(0, 0).imag
    with pytest.raises(ValueError):
        GridSpec.square(0, 4, 8)
    with pytest.raises(ValueError):
        GridSpec(0, -1, 1, 16, 16)


def test_slice_family():
    assert np.array_equal(SliceFamily.jordan(2).matrix(3), [[3, 1], [0, 3]])
    fam = SliceFamily.affine(np.eye(2), np.diag([1, 2]))
    assert np.array_equal(fam.matrix(1j), np.diag([1 + 1j, 1 + 2j]))
    with pytest.raises(ValueError):
        SliceFamily.jordan(1)
    with pytest.raises(ValueError):
        SliceFamily.affine(np.eye(2), np.eye(3))
    with pytest.raises(ValueError):
        SliceFamily("spiral")


def test_scalar_z2_picture():
    g = render_grid(Z2, GridSpec.square(0, 4, 32), SliceFamily.scalar())
    spec = g.spec
    for i in range(32):
        for j in range(32):
            c = spec.point(i, j)
            code = g.codes[i, j]
            if abs(abs(c) - 1) > 2 * spec.half_diagonal:
                assert code == (ATTRACTED if abs(c) < 1 else ESCAPE)
            elif abs(abs(c) - 1) < 0.9 * spec.half_diagonal:
                assert code == JULIA
    assert g.histogram()["julia-proximate"] > 0


def test_render_deterministic():
    spec = GridSpec.square(0, 3, 16)
    a = write_ppm(render_grid(Z2, spec, SliceFamily.scalar()))
    b = write_ppm(render_grid(Z2, spec, SliceFamily.scalar()))
    assert a == b


def test_workers_byte_identical():
    spec = GridSpec.square(0.1j, 3, 20)
    fam = SliceFamily.jordan(2)
    a = write_ppm(render_grid(Z2, spec, fam, Mode.SPECTRAL, workers=1))
    b = write_ppm(render_grid(Z2, spec, fam, Mode.SPECTRAL, workers=2))
    assert a == b


def test_spectral_jordan_matches_scalar():
    spec = GridSpec.square(0, 4, 48)
    s = render_grid(Z2, spec, SliceFamily.scalar())
    j = render_grid(Z2, spec, SliceFamily.jordan(2), Mode.SPECTRAL)
    differ = s.codes != j.codes
    assert differ.mean() <= 0.01
    soft = np.isin(s.codes, [JULIA, UNDECIDED]) | np.isin(j.codes, [JULIA, UNDECIDED])
    assert not (differ & ~soft).any()


def test_direct_orbit_bounded_set_strictly_smaller():
    # px 17 over width 4.25 puts c = 1 and c = i exactly on pixel centres
    spec = GridSpec.square(0, 4.25, 17)
    s = render_grid(Z2, spec, SliceFamily.scalar())
    o = render_grid(Z2, spec, SliceFamily.jordan(3), Mode.ORBIT, RenderParams(orbit_iter=200))
    matrix_bounded = o.codes == BOUNDED
    assert not (matrix_bounded & ~s.bounded_mask).any()
    assert (s.bounded_mask & ~matrix_bounded).any()
    # the unit circle points are in the filled Julia set but their Jordan block escapes
    for i, j in [(8, 12), (4, 8)]:
        assert s.bounded_mask[i, j]
        assert o.codes[i, j] == ESCAPE


def test_save_render_writes_sidecar(tmp_path):
    spec = GridSpec.square(0, 4, 16)
    fam = SliceFamily.scalar()
    g = render_grid(Z2, spec, fam)
    meta = save_render(str(tmp_path / "z2.ppm"), Z2, g, fam, RenderParams())
    assert (tmp_path / "z2.ppm").read_bytes() == write_ppm(g)
    assert (tmp_path / "z2.json").exists()
    assert sum(meta["histogram"].values()) == 256
    assert meta["params"]["delta"] == pytest.approx(spec.half_diagonal)
