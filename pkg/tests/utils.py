import unittest
from typing import Sequence, Tuple

import constants
from model.data import load_data, load_model
from model.sur import Dataset, SparsityPattern

# Stationary points of the diagonal model on the multimodal dataset, to 6 digits.
MULTIMODAL_REAL_POINTS = [
    (0.778796, 1.538029),
    (1.622609, 2.034745),
    (2.764418, 2.504006),
]
MULTIMODAL_COMPLEX_POINT = (complex(1.480687, -1.547274), complex(2.16845, 0.765283))


def model_path(name: str) -> str:
    return str(constants.FIXTURES_DIR / "models" / f"{name}.json")


def data_path(name: str) -> str:
    return str(constants.FIXTURES_DIR / "data" / f"{name}.json")


def load_fixture(model: str, data: str) -> Tuple[SparsityPattern, Dataset]:
    """Loads a (pattern, dataset) pair from the fixtures directory."""
    return load_model(model_path(model)).to_pattern(), load_data(data_path(data)).to_dataset()


def assert_points_close(
    test_case: unittest.TestCase,
    actual: Sequence[Sequence[complex]],
    expected: Sequence[Sequence[complex]],
    tol: float,
):
    """Checks that two point lists have the same length and agree coordinatewise in order."""
    test_case.assertEqual(len(actual), len(expected))
    for a, e in zip(actual, expected):
        test_case.assertEqual(len(a), len(e))
        for ca, ce in zip(a, e):
            test_case.assertLessEqual(abs(complex(ca) - complex(ce)), tol, f"{a} != {e}")
