import pytest

from gridclass.grid import signed_from_text

# Matrices exercised throughout the suite. Text is reading order (top row
# first); "1 1 / 1 -1" admits no sign assignment and gets doubled to 4x4.
SUITE_MATRICES = [
    "1",
    "-1",
    "1 -1",
    "1 / 1",
    "1 1",
    "1 0 / 0 1",
    "0 1 / 1 0",
    "1 1 / 1 -1",
]

SMALL_MATRICES = [m for m in SUITE_MATRICES if m != "1 1 / 1 -1"]


@pytest.fixture(params=SUITE_MATRICES, ids=lambda m: m.replace(" ", "").replace("/", "|"))
def suite_matrix(request):
    return signed_from_text(request.param)


@pytest.fixture(params=SMALL_MATRICES, ids=lambda m: m.replace(" ", "").replace("/", "|"))
def small_matrix(request):
    return signed_from_text(request.param)
