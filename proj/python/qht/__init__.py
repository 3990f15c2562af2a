"""Python bindings for the qht open-system channel toolkit."""

import json as _json

from ._qht import (  # noqa: F401
    Channel,
    QhtError,
    analyze_json,
    controlled_interaction,
    demon_instance,
    eig_hermitian,
    entropy_gain,
    entropy_vn,
    h_matrices,
    haar_unitary,
    kron,
    partial_trace,
    random_density,
    swap_unitary,
    unitality,
    unitary_exp,
    verify_theorem,
)
from ._qht import sweep_json as _sweep_json
from ._qht import demo_json as _demo_json


def analyze(spec, seed=0):
    """Analyze a system description given as a dict or JSON text."""
    text = spec if isinstance(spec, str) else _json.dumps(spec)
    return _json.loads(analyze_json(text, seed))


def sweep(family="controlled", trials=100, d_sys=0, d_res=0, seed=0,
          tol_diag=1e-9, tol_unital=1e-8, threads=1):
    return _json.loads(_sweep_json(family, trials, d_sys, d_res, seed,
                                   tol_diag, tol_unital, threads))


def demo(name):
    return _json.loads(_demo_json(name))
