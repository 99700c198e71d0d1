import numpy as np
import pytest

from monotrend.errors import InvalidInput
from monotrend.trends import TRENDS, get_trend, logistic, m1, m2, square


class TestTrends:
    def test_m1_is_exp(self):
        assert m1(0.5) == pytest.approx(np.exp(0.5))

    def test_m2_pieces(self):
        np.testing.assert_allclose(m2([0.1, 0.25, 0.2525, 0.255, 0.3]),
                                   [0.1, 0.25, 0.375, 0.75, 1.05])

    def test_m2_jump_as_printed(self):
        eps = 1e-9
        assert m2(0.255 + eps) - m2(0.255) == pytest.approx(0.255, abs=1e-6)

    def test_logistic_midpoint(self):
        assert logistic(0.5) == 0.5

    @pytest.mark.parametrize("name", sorted(TRENDS))
    def test_non_decreasing(self, name):
        t = np.linspace(0, 1, 2001)
        assert np.all(np.diff(get_trend(name)(t)) >= 0)

    def test_square(self):
        assert square(0.3) == pytest.approx(0.09)

    def test_unknown(self):
        with pytest.raises(InvalidInput):
            get_trend("cubic")
