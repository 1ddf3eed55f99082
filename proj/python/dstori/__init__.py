"""Singular de Sitter tori: gluing, lightlike dynamics and rotation numbers.

Thin wrapper over the native core. Results come back as plain dicts and lists.
"""

import json

from . import _core
from ._core import DstoriError

__all__ = [
    "DstoriError",
    "y_theta",
    "area_rectangle_theta",
    "trace_gh",
    "trace_commutator_gh",
    "build",
    "rotation",
    "rotation_sweep",
    "realize_rational",
    "realize_irrational",
    "realize_pair",
    "run_suite",
]

y_theta = _core.y_theta
area_rectangle_theta = _core.area_rectangle_theta
trace_gh = _core.trace_gh
trace_commutator_gh = _core.trace_commutator_gh


def build(theta, x, y=None):
    """Report of the one-singularity torus, or of the L-shaped one when y is given."""
    return json.loads(_core.build_report(theta, x, y))


def rotation(theta, x, y=None, section="bottom"):
    return json.loads(_core.rotation(theta, x, y, section))


def rotation_sweep(theta, points=200, workers=4):
    return json.loads(_core.rotation_sweep(theta, points, workers))


def realize_rational(theta, p, q):
    return json.loads(_core.realize_rational(theta, p, q))


def realize_irrational(theta, rho, tol=1e-6):
    return json.loads(_core.realize_irrational(theta, rho, tol))


def realize_pair(theta, rho_alpha, rho_beta, tol=1e-3):
    return json.loads(_core.realize_pair(theta, rho_alpha, rho_beta, tol))


def run_suite(name="all", config=None):
    return json.loads(_core.run_suite(name, json.dumps(config) if config else ""))
