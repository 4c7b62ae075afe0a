import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modxl import (ArrayGeometry, PolarLocation, kernel_b, kernel_e, kernel_p,
                   response_nusw, response_subarray_common,
                   response_subarray_distinct, response_upw, response_usw)
from modxl.response import write_response_csv


def loop_distances(g, loc):
    q = loc.cartesian
    out = []
    for n in g.module_indices:
        for m in g.element_indices:
            y = (n * g.Gamma + m) * g.d
            out.append(math.hypot(q[0], q[1] - y))
    return np.array(out)


def test_nusw_and_usw_against_loop(small_geom):
    loc = PolarLocation(10.0, math.pi / 6)
    dist = loop_distances(small_geom, loc)
    k = 2 * math.pi / small_geom.wavelength
    nusw = response_nusw(small_geom, loc).entries
    usw = response_usw(small_geom, loc).entries
    assert np.allclose(nusw, loc.r / dist * np.exp(-1j * k * dist), atol=1e-12)
    assert np.allclose(usw, np.exp(-1j * k * dist), atol=1e-12)
    assert np.allclose(np.angle(nusw), np.angle(usw))


def test_single_element_array():
    g = ArrayGeometry(1, 1, 1, 1.0)
    loc = PolarLocation(3.3, 0.2)
    a = response_nusw(g, loc).entries
    assert a.shape == (1,)
    assert a[0] == pytest.approx(np.exp(-2j * math.pi * 3.3))


def test_broadside_mirror_symmetry(small_geom):
    a = response_nusw(small_geom, PolarLocation(7.0, 0.0)).entries
    assert np.allclose(a, a[::-1])


def test_upw_examples(small_geom):
    assert np.allclose(response_upw(small_geom, 0.0).entries, 1.0)
    g = ArrayGeometry(3, 3, 5, 1.0, 0.5)
    a = response_upw(g, math.pi / 6).entries
    expect = [np.exp(1j * math.pi * (5 * n + m) / 2)
              for n in (-1, 0, 1) for m in (-1, 0, 1)]
    assert np.allclose(a, expect)
    th = 0.37
    assert np.allclose(a := response_upw(g, th).entries,
                       np.kron(kernel_p(g, th).entries, kernel_b(g, th).entries))


def test_kernels(small_geom):
    assert np.allclose(kernel_p(small_geom, 0.0).entries, np.ones(3))
    assert np.allclose(kernel_b(small_geom, 0.0).entries, np.ones(3))
    e = kernel_e(small_geom, PolarLocation(4.0, 0.0)).entries
    r_n = np.sqrt(16 + (5 * np.array([-1, 0, 1]) * 0.5) ** 2)
    assert np.allclose(e, np.exp(-2j * math.pi * r_n))
    with pytest.raises(TypeError):
        kernel_b(small_geom)


def test_subarray_special_cases():
    loc = PolarLocation(50.0, 0.4)
    g1 = ArrayGeometry(1, 5, 5, 0.1)
    k = 2 * math.pi / g1.wavelength
    dist = response_subarray_distinct(g1, loc).entries
    assert np.allclose(dist, np.exp(-1j * k * loc.r) * response_upw(g1, loc.theta).entries)
    gm = ArrayGeometry(5, 1, 3, 0.1)
    assert np.allclose(response_subarray_distinct(gm, loc).entries,
                       kernel_e(gm, loc).entries)


def test_subarray_common_is_kron(ref_geom):
    loc = PolarLocation(200.0, 0.1)
    e, b = kernel_e(ref_geom, loc).entries, kernel_b(ref_geom, loc.theta).entries
    loop = np.array([e[n] * b[m] for n in range(ref_geom.N) for m in range(ref_geom.M)])
    assert np.allclose(response_subarray_common(ref_geom, loc).entries, loop,
                       rtol=0, atol=1e-15)


def test_subarray_models_close_to_usw(ref_geom):
    loc = PolarLocation(200.0, 0.0)
    usw = response_usw(ref_geom, loc).entries
    for fn in (response_subarray_distinct, response_subarray_common):
        a = fn(ref_geom, loc).entries
        assert abs(np.vdot(a, usw)) / ref_geom.size > 0.99
        assert np.max(np.abs(np.angle(a / usw))) < 0.7
    g = ArrayGeometry(5, 9, 11, 0.1)
    S = (g.M - 1) * g.d
    far = PolarLocation(10 * 2 * S * S / g.wavelength, 0.3)
    err = np.max(np.abs(np.angle(response_subarray_distinct(g, far).entries
                                 / response_usw(g, far).entries)))
    assert err < 0.1


@settings(max_examples=40, deadline=None)
@given(r=st.floats(1, 1e4), theta=st.floats(-1.5, 1.5),
       N=st.integers(1, 6), M=st.integers(1, 6), extra=st.integers(0, 8))
def test_unit_norms(r, theta, N, M, extra):
    g = ArrayGeometry(N, M, M + extra, 0.1)
    loc = PolarLocation(r, theta)
    NM = g.size
    for a in (response_usw(g, loc), response_upw(g, theta),
              response_subarray_distinct(g, loc), response_subarray_common(g, loc)):
        assert np.sum(np.abs(a.entries) ** 2) == pytest.approx(NM, rel=1e-12)


def test_usw_converges_to_upw(ref_geom):
    prev = 0.0
    for r in (1e3, 1e4, 1e5, 1e6, 1e7):
        loc = PolarLocation(r, 0.0)
        c = abs(np.vdot(response_usw(ref_geom, loc).entries,
                        response_upw(ref_geom, 0.0).entries)) / ref_geom.size
        assert c >= prev - 1e-12
        prev = c
    assert prev > 1 - 1e-6


def test_collocated_matches_flat_ula():
    g = ArrayGeometry(4, 3, 3, 0.1)
    flat = ArrayGeometry(1, 12, 12, 0.1)
    loc = PolarLocation(2.0, -0.4)
    assert np.allclose(response_usw(g, loc).entries, response_usw(flat, loc).entries)
    assert np.allclose(response_upw(g, 0.3).entries, response_upw(flat, 0.3).entries)


def test_response_csv(tmp_path, small_geom):
    a = response_usw(small_geom, PolarLocation(5.0, 0.1))
    path = tmp_path / "a.csv"
    write_response_csv(small_geom, a, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "n,m,re,im"
    assert len(lines) == 10
    back = np.array([complex(float(l.split(",")[2]), float(l.split(",")[3]))
                     for l in lines[1:]])
    assert np.array_equal(back, a.entries)
    assert lines[1].startswith("-1,-1,")
