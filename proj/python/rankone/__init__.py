"""Numerical workbench for rank-one concave integrands of planar gradients."""

import json as _json

from . import _core
from ._core import (
    NonConvergenceError,
    PreconditionError,
    beurling_ratio,
    burkholder_real_form,
    envelope_error,
    pde_residuals,
    run_cli,
    vnorm,
)

__all__ = [
    "NonConvergenceError",
    "PreconditionError",
    "beurling_ratio",
    "burkholder_real_form",
    "envelope_error",
    "eval",
    "example_11",
    "pde_residuals",
    "probe",
    "radial_energy",
    "run_cli",
    "verify",
    "vnorm",
]


def eval(integrand, p, xi, zeta, M=0.0, lam=0.0, sign=1):  # noqa: A001
    return _core.eval(integrand, p, complex(xi), complex(zeta), M, lam, sign)


def verify(case, p=3.0, M=0.0, samples=10000, seed=1):
    return _json.loads(_core.verify(case, p, M, samples, seed))


def probe(integrand, p, M=0.0, base_count=101, phase_count=32, t_count=41):
    return _json.loads(_core.probe(integrand, p, M, base_count, phase_count, t_count))


def radial_energy(profile, p):
    """profile: dict with family, params, R and orientation."""
    return _json.loads(_core.radial_energy(_json.dumps(profile), p))


def example_11(p, R=1.0, r_outer=4.0):
    return _json.loads(_core.example_11(p, R, r_outer))
