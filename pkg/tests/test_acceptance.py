import pytest

from ctransport.acceptance import CRITERIA

from conftest import ACCEPTANCE_LINES

# seeds used by run_all(0), so pytest and `ctransport selftest` report the same numbers
SEEDS = {1: (), 2: (0,), 3: (0,), 4: (0,), 5: (1,), 6: (2,), 7: (), 8: (3,), 9: (4,), 10: ()}


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda c: c.__name__)
def test_criterion(criterion):
    number = int(criterion.__name__.rsplit("_", 1)[1])
    result = criterion(*SEEDS[number])
    line = result.line()
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert result.passed, line
