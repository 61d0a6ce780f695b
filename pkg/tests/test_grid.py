import math

import numpy as np
import pytest

from levykit.errors import DomainError
from levykit.grid import (SpectralGrid, read_field, write_field,
                          write_field_csv)

G1 = SpectralGrid(1, 256, 16.0)


def gaussian(grid, sig=1.0):
    x = grid.x_mesh()
    r2 = x ** 2 if grid.dim == 1 else np.sum(x ** 2, axis=-1)
    return np.exp(-r2 / (2.0 * sig * sig))


def test_constructor_validation():
    with pytest.raises(DomainError):
        SpectralGrid(3, 64, 8.0)
    with pytest.raises(DomainError):
        SpectralGrid(1, 100, 8.0)
    with pytest.raises(DomainError):
        SpectralGrid(1, 64, 0.0)


def test_axes_and_cell():
    g = SpectralGrid(1, 64, 8.0)
    assert g.h == pytest.approx(0.25)
    assert g.x_axis[0] == -8.0
    assert g.cell == pytest.approx(0.25)
    g2 = SpectralGrid(2, 64, 8.0)
    assert g2.shape == (64, 64)
    assert g2.cell == pytest.approx(0.0625)


def test_forward_matches_gaussian_transform():
    # F of exp(-pi x^2) is exp(-pi xi^2) in the e^{-2 pi i x xi} pairing
    f = np.exp(-np.pi * G1.x_axis ** 2)
    fhat = G1.forward(f)
    want = np.exp(-np.pi * G1.xi_axis ** 2)
    np.testing.assert_allclose(fhat.real, want, atol=1e-12)
    assert np.max(np.abs(fhat.imag)) < 1e-12


def test_forward_inverse_roundtrip():
    rng = np.random.Generator(np.random.Philox(3))
    for g in (G1, SpectralGrid(2, 32, 4.0)):
        f = rng.standard_normal(g.shape)
        back = g.inverse(g.forward(f))
        np.testing.assert_allclose(back.real, f, atol=1e-12)


def test_cf_synthesis_analysis_roundtrip():
    phi = np.exp(-np.abs(2 * np.pi * G1.xi_axis))
    dens = G1.synthesize_cf(phi)
    back = G1.analyze_cf(dens.real)
    np.testing.assert_allclose(back.real, phi, atol=1e-10)


def test_synthesize_cauchy():
    # CF e^{-|2 pi xi|} inverts to 1/pi (1 + x^2)^-1
    g = SpectralGrid(1, 1024, 64.0)
    dens = g.synthesize_cf(np.exp(-np.abs(2 * np.pi * g.xi_axis))).real
    want = 1.0 / (np.pi * (1.0 + g.x_axis ** 2))
    # dominated by the periodic wrap of the mass beyond the box
    assert np.max(np.abs(dens - want)) < 2e-4


def test_shift_is_exact_on_lattice():
    f = gaussian(G1)
    shifted = G1.shift(f, 5 * G1.h)
    np.testing.assert_allclose(shifted, np.roll(f, -5), atol=1e-12)
    g2 = SpectralGrid(2, 32, 4.0)
    f2 = gaussian(g2)
    s2 = g2.shift(f2, np.array([g2.h, 2 * g2.h]))
    np.testing.assert_allclose(s2, np.roll(f2, (-1, -2), axis=(0, 1)),
                               atol=1e-12)


def test_gradient_multiplier():
    k = 3.0 / G1.L / 2.0 * 8  # a lattice frequency
    f = np.sin(2 * np.pi * k * G1.x_axis)
    df = G1.apply_multiplier(f, G1.gradient_mult())
    want = 2 * np.pi * k * np.cos(2 * np.pi * k * G1.x_axis)
    np.testing.assert_allclose(df, want, atol=1e-9)


def test_lp_norm_and_integral():
    f = gaussian(G1)
    # int e^{-x^2/2} = sqrt(2 pi), int e^{-x^2} = sqrt(pi)
    assert G1.integral(f) == pytest.approx(math.sqrt(2 * math.pi), rel=1e-12)
    assert G1.lp_norm(f, 2.0) == pytest.approx(math.pi ** 0.25, rel=1e-12)
    assert G1.lp_norm(f, 1.0) == pytest.approx(math.sqrt(2 * math.pi),
                                               rel=1e-12)


def test_field_io_roundtrip(tmp_path):
    path = str(tmp_path / "f.lvf")
    f = gaussian(G1)
    write_field(path, G1, f)
    g2, v = read_field(path)
    assert g2.n == G1.n and g2.L == G1.L and g2.dim == 1
    np.testing.assert_array_equal(v, f)


def test_field_io_rejects_wrong_shape(tmp_path):
    with pytest.raises(DomainError):
        write_field(str(tmp_path / "f.lvf"), G1, np.zeros(7))


def test_field_io_rejects_garbage(tmp_path):
    p = tmp_path / "junk.lvf"
    p.write_bytes(b"not a field at all")
    with pytest.raises(DomainError):
        read_field(str(p))


def test_csv_writer_one_dimensional_only(tmp_path):
    g2 = SpectralGrid(2, 32, 4.0)
    with pytest.raises(DomainError):
        write_field_csv(str(tmp_path / "f.csv"), g2, gaussian(g2))
    path = tmp_path / "f.csv"
    write_field_csv(str(path), G1, gaussian(G1))
    rows = path.read_text().strip().split("\n")
    assert len(rows) == G1.n
    x0, v0 = rows[0].split(",")
    assert float(x0) == -16.0
    assert float(v0) == pytest.approx(gaussian(G1)[0])
