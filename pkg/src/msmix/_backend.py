"""Backend selection for the hot kernels.

The compiled extension is preferred when present; setting the environment
variable MSMIX_PURE_PYTHON to a nonzero value forces the numpy fallback.
Both backends implement identical iteration rules, so results agree to
rounding; the test suite asserts this whenever the extension is available.
"""

import os

if os.environ.get("MSMIX_PURE_PYTHON", "0") not in ("", "0"):
    from . import _kernels_py as impl
else:
    try:
        from . import _kernels as impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as impl


def backend_name() -> str:
    return impl.BACKEND_NAME


pressure_batch = impl.pressure_batch
chi_root_batch = impl.chi_root_batch
