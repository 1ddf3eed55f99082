import math

import pytest

import dstori


def test_closed_forms():
    th = math.log(2.0)
    assert dstori.y_theta(th) == pytest.approx(0.5, abs=1e-15)
    assert dstori.area_rectangle_theta(1.0) == pytest.approx(1.0, abs=1e-9)
    assert dstori.trace_gh(th, 2.0) == pytest.approx(math.sqrt(3.0), abs=1e-12)
    assert dstori.trace_commutator_gh(1.0, 3.0) == pytest.approx(2 * math.cosh(1.0), abs=1e-9)


def test_build_report():
    r = dstori.build(1.0, 2.0)
    assert r["euler_characteristic"] == 0
    assert r["gauss_bonnet_residual"] < 1e-6
    angles = sorted(o["angle"] for o in r["orbits"])
    assert angles[-1] == pytest.approx(1.0, abs=1e-9)
    l_shape = dstori.build(1.0, 3.0, 0.4)
    assert l_shape["area"] == pytest.approx(1.0, abs=1e-9)


def test_rotation_and_realize():
    rn = dstori.rotation(1.0, 2.0)
    assert rn["kind"] == "rational"
    half = dstori.realize_rational(1.0, 1, 2)
    assert half["cyclic_order_ok"]
    gold = dstori.realize_irrational(1.0, 0.6180339887, 1e-6)
    assert abs(gold["measured"] - 0.6180339887) <= 1e-6


def test_sweep_is_monotone():
    rows = dstori.rotation_sweep(1.0, points=50)
    lifts = [r["lift"] for r in rows]
    assert lifts[0] == 0
    assert lifts[-1] == pytest.approx(1.0)
    assert all(b >= a - 1e-6 for a, b in zip(lifts, lifts[1:]))


def test_errors_carry_codes():
    with pytest.raises(dstori.DstoriError) as info:
        dstori.build(-1.0, 2.0)
    assert info.value.code in ("NonPositiveAngle", "DomainError")
    with pytest.raises(dstori.DstoriError):
        dstori.run_suite("no-such-suite")


def test_suite_from_python():
    res = dstori.run_suite("gauss-bonnet", {"seed": 2})
    assert res[0]["passed"]
