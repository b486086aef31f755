import pytest

from aalkit import _scan_py

try:
    from aalkit import _scan_c
except ImportError:
    _scan_c = None

KERNELS = [pytest.param(_scan_py, id="python")]
if _scan_c is not None:
    KERNELS.append(pytest.param(_scan_c, id="cython"))


@pytest.fixture(params=KERNELS)
def kernel(request):
    """Both scanning kernels; every kernel test runs against each."""
    return request.param
