"""Shared fixtures for the test suite."""

from pathlib import Path

import pytest

from examforge.exam_model import ScoringScheme, default_matrix
from examforge.harness import fixture_exam, grading_fixture_items

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def matrix():
    return default_matrix()


@pytest.fixture
def scheme():
    return ScoringScheme()


@pytest.fixture
def exam(matrix):
    return fixture_exam(100, matrix)


@pytest.fixture
def grading_items():
    return grading_fixture_items()
