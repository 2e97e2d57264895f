import pytest

from hpk.kernel import Kernel, is_error_box


@pytest.fixture
def kernel():
    return Kernel()


@pytest.fixture
def run(kernel):
    """Compile and run one program, failing the test on compile errors."""

    def go(text):
        box = kernel.compile_string(text)
        assert not is_error_box(box), box.value
        return kernel.run_box(box)

    return go
