"""Shared curves for the test suite"""

import numpy as np
import pytest

from curvegeom import ClosedCurve
from csf_checker.corpus import CurveKind, CurveSpec, generate


def regular_polygon(n, radius=1.0, center=(0.0, 0.0), phase=0.0):
    theta = phase + 2.0 * np.pi * np.arange(n) / n
    return ClosedCurve(
        np.column_stack([center[0] + radius * np.cos(theta), center[1] + radius * np.sin(theta)])
    )


def ellipse(n, a=2.0, b=1.0):
    return generate(CurveSpec(CurveKind.ELLIPSE, {"a": a, "b": b}, n_points=n))


def figure_eight(n=256):
    t = 2.0 * np.pi * np.arange(n) / n + 0.1
    return ClosedCurve(np.column_stack([np.cos(t), np.sin(t) * np.cos(t)]))


@pytest.fixture
def unit_circle():
    return regular_polygon(512)


@pytest.fixture
def ellipse_512():
    return ellipse(512)


@pytest.fixture
def ellipse_1024():
    return ellipse(1024)


@pytest.fixture
def bean():
    return generate(CurveSpec(CurveKind.PRESET, {"name": "bean"}, n_points=512))


@pytest.fixture
def kidney():
    return generate(CurveSpec(CurveKind.PRESET, {"name": "kidney"}, n_points=512))


@pytest.fixture
def lemniscate():
    return figure_eight()
