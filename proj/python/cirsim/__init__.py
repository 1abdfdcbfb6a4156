"""Monte Carlo engine for jump-diffusion short-rate models with delay.

Thin dict-based wrappers over the compiled core; model and config documents
use the same JSON schema as the command-line tool.
"""

import json as _json

from ._core import (
    __version__,
    ConfigError,
    EngineError,
    IoError,
    UnknownNuError,
    ValidationError,
    gamma_functional,
    m_functional,
    normal_inverse_cdf,
    philox4x64,
    raw_u64,
    raw_uniform,
)
from . import _core


def validate(model):
    """Check model assumptions; returns {'passed': bool, 'checks': [...]}."""
    return _json.loads(_core.validate_json(_json.dumps(model)))


def limits(model):
    """Analytic long-term limits: {'mu', 'nu', 'limit_x'[, 'limit_y']}."""
    return _json.loads(_core.limits_json(_json.dumps(model)))


def mean_ode_oracle(model, t):
    """E[X(t)] from the exact mean ODE m' = 2*beta*m + delta, m(0) = history(0)."""
    return _core.mean_ode_oracle(_json.dumps(model), t)


def simulate_path(model, h, horizon, seed=0, stream=0, policy="absolute"):
    """One path on the grid; returns {'times', 'x', 'integral_x'[, 'y', 'integral_y']}."""
    return _core.simulate_one(_json.dumps(model), h, horizon, seed, stream, policy)


def run(config, workers=None, out_dir=None):
    """Run an experiment; returns {'report': ..., 'manifest': ...}.

    Artifacts are written only when the config names an output directory or
    out_dir is given.
    """
    return _json.loads(_core.run_json(_json.dumps(config), workers, out_dir))


__all__ = [
    "__version__",
    "ConfigError",
    "EngineError",
    "IoError",
    "UnknownNuError",
    "ValidationError",
    "gamma_functional",
    "limits",
    "m_functional",
    "mean_ode_oracle",
    "normal_inverse_cdf",
    "philox4x64",
    "raw_u64",
    "raw_uniform",
    "run",
    "simulate_path",
    "validate",
]
