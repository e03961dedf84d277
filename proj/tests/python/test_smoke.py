import math
import os
import sys

_here = os.path.dirname(os.path.abspath(__file__))
_module_dir = os.environ.get("EXITSPEC_MODULE_DIR")
if _module_dir:
    sys.path.insert(0, _module_dir)
    sys.path.insert(0, os.path.join(_here, "..", "..", "python"))

import pytest

import exitspec


def test_flat_spectrum_closed_form():
    spec = exitspec.moment_spectrum(b=0.0, m=2, R=1.0, K=3)
    expect = [0.5, 1.0 / 16.0, 1.0 / 48.0, 11.0 / 1024.0]
    for got, want in zip(spec["A_hat"], expect):
        assert abs(got - want) < 1e-10
    assert spec["provenance"] == "boundary_derivative"


def test_hyperbolic_profile_eval():
    prof = exitspec.solve_hierarchy(b=-1.0, m=2, R=1.0, K=1)
    assert abs(prof.eval(1, 0.0) - 2.0 * math.log(math.cosh(0.5))) < 1e-10
    assert prof.eval(1, 1.0) == pytest.approx(0.0, abs=1e-12)


def test_custom_warping_expression():
    spec = exitspec.moment_spectrum(w="sinh(r)", m=2, R=1.0, K=0)
    assert abs(spec["A_hat"][0] - math.tanh(0.5)) < 1e-8
    with pytest.raises(exitspec.ValidationError):
        exitspec.moment_spectrum(w="2*r", m=2, R=1.0, K=0)


def test_compare_space_balance():
    rep = exitspec.compare_space(b=-1.0, g="1", h="0", m=2, R=1.0, K=2)
    assert rep["balanced"]
    assert rep["strictly_balanced"]
    assert rep["lemma_min"] > 0.0
    broken = exitspec.compare_space(b=0.0, g="1", h="2", m=2, R=1.0, K=2)
    assert not broken["balanced"]
    assert "bound_spectrum" not in broken


def test_intrinsic_ordering():
    cmp = exitspec.compare_intrinsic(N_b=-1.0, bound_b=0.0, m=2, R=1.0, K=3, direction="le")
    assert cmp["all_hold"]
    with pytest.raises(exitspec.HypothesisError):
        exitspec.compare_intrinsic(N_b=0.0, bound_b=-1.0, m=2, R=1.0, K=2, direction="le")


def test_simulate_quick():
    res = exitspec.simulate(b=0.0, m=2, R=1.0, r0=0.0, dt=1e-3, paths=2000, seed=5, K=1)
    (row,) = res["moments"]
    assert row["quad_value"] == pytest.approx(0.25, abs=1e-12)
    assert abs(row["z"]) < 6.0


def test_mesh_verify_disk():
    rep = exitspec.mesh_verify(generate="disk", gen_size=1.25, gen_n=24, R=1.0, K=1)
    assert rep["euler_characteristic"] == 1
    assert rep["mesh_spectrum"]["A_hat"][0] == pytest.approx(0.5, rel=0.02)
    assert rep["max_abs_C_core"] < 1e-9
