import sys

import numpy as np
import pytest

from rwpsr.linops import (
    DecimationFactors,
    DegradationOperator,
    build_difference_regularizer,
    build_regularizer,
)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def random_psf(rng, size=3):
    k = rng.random((size, size)) + 0.05
    return k / k.sum()


def random_problem(rng, hr_shape=(12, 12), factors=DecimationFactors(2, 2), reg="random",
                   with_targets=True, epsilon=1e-8):
    """A small random instance: (b, op, reg)."""
    op = DegradationOperator.from_kernel(random_psf(rng), hr_shape, factors)
    if reg == "difference":
        stack = build_difference_regularizer(hr_shape, epsilon)
        if with_targets:
            stack = build_regularizer(
                hr_shape,
                [k for k in _difference_kernels()],
                [rng.standard_normal(hr_shape) for _ in range(2)],
                epsilon=epsilon,
                centers=[(0, 1), (1, 0)],
            )
    else:
        kern = rng.standard_normal((3, 3))
        targets = [rng.standard_normal(hr_shape)] if with_targets else None
        stack = build_regularizer(hr_shape, [kern], targets, epsilon=epsilon)
    b = rng.standard_normal(factors.lr_shape(hr_shape))
    return b, op, stack


def _difference_kernels():
    return [np.array([[1.0, -1.0]]), np.array([[1.0], [-1.0]])]


def natural_image(name):
    """512x512 grayscale test images in [0, 1] bundled with scikit-image."""
    data = pytest.importorskip("skimage.data")
    if name == "camera":
        return data.camera() / 255.0
    if name == "astronaut":
        from skimage.color import rgb2gray

        return rgb2gray(data.astronaut())
    raise KeyError(name)


def pytest_terminal_summary(terminalreporter):
    """Repeat the acceptance verdicts at the end of the run."""
    results = getattr(sys.modules.get("tests.test_acceptance"), "RESULTS", [])
    if results:
        terminalreporter.section("acceptance criteria")
        for line in results:
            terminalreporter.write_line(line)
