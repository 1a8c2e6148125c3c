"""Numeric configuration shared by the compute modules.

The fingerprint hashes every default that can change computed values, so
harnesses can detect silent numeric-configuration drift between builds.
"""

import hashlib
import json

__version__ = "1.0.0"

NUMERIC_DEFAULTS = {
    "n_core_rays": 48,
    "n_halo_rays": 64,
    "z_samples_per_ray": 256,
    "x_resolution": 0.01,
    "grid_pad": 0.1,
    "w_floor": 0.01,
    "mu_quad_order": 32,
    "mu_quad_breaks": [0.0, 0.02, 0.1, 0.4, 0.9, 0.98, 1.0],
    "halo_inner_offset": 1e-3,
    "w_edge_cap": 0.997,
    "norm_integral_epsrel": 1e-12,
    "kepler_tol": 1e-13,
    "kepler_max_iter": 60,
}


def numeric_fingerprint() -> str:
    payload = json.dumps(NUMERIC_DEFAULTS, sort_keys=True).encode()
    return hashlib.sha256(payload).hexdigest()[:12]
