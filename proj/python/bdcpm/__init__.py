"""Beam-domain channel power estimation for massive MIMO uplink.

Thin wrapper over the compiled ``_core`` extension. Configurations are passed
as dictionaries of SystemConfig fields; omitted fields take the desk defaults.
"""

import json as _json
import pkgutil as _pkgutil

__path__ = _pkgutil.extend_path(__path__, __name__)

from ._core import BdcpmError, Context as _Context, bench, build_id  # noqa: E402
from . import _core  # noqa: E402

__all__ = ["BdcpmError", "Context", "bench", "build_id", "config_hash", "desk_config", "sweep_nmse"]


def desk_config():
    return _json.loads(_core.desk_config_json())


def config_hash(config=None):
    return _core.config_hash(_json.dumps(config or {}))


def Context(config=None):
    return _Context(_json.dumps(config or {}))


def sweep_nmse(config=None, snr_db=(30.0,), samples=(10,), estimators=("kl-fast",), reps=1, threads=1):
    """Run an NMSE sweep and return the result table as CSV text."""
    return _core.sweep_nmse(_json.dumps(config or {}), list(snr_db), list(samples), list(estimators), reps, threads)
