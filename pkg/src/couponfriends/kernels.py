"""Backend selection for the hot loops.

The compiled ``_ckernels`` extension is used when importable; otherwise the
pure-Python ``_pykernels`` module. Set ``COUPONFRIENDS_PURE_PYTHON=1`` to
force the fallback. Both produce bit-identical results.
"""
import os

from . import _pykernels

BACKENDS = {"python": _pykernels}

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None
else:
    BACKENDS["cython"] = _ckernels

if os.environ.get("COUPONFRIENDS_PURE_PYTHON", "") not in ("", "0") or _ckernels is None:
    BACKEND = "python"
else:
    BACKEND = "cython"

backend = BACKENDS[BACKEND]

next_u64 = backend.next_u64
bounded = backend.bounded
sample_pairs = backend.sample_pairs
collect = backend.collect
exchange = backend.exchange
until_m_sets = backend.until_m_sets
run_trials = backend.run_trials
until_m_sets_batch = backend.until_m_sets_batch
