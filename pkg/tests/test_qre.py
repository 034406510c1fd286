"""
QDE to QRE rewriting and evaluation of recurrences
"""
import pytest

from qfps.engine.errors import InsufficientPrefixError, ParameterError
from qfps.engine.parser import parse
from qfps.engine.qde import find_qde, parse_qde
from qfps.engine.qre import ConvolutionTerm, evaluate_qre, qde_to_qre, qre_to_dict
from qfps.engine.series import series_of


def _prefix(text: str, count: int):
    return series_of(parse(text), count - 1).coefficients(0, count)


class TestRewriting:
    def test_tan(self):
        r = qde_to_qre(parse_qde("y2 - 2*y*y1"))
        n = r.ring.gens[0]
        assert r.linear == ((2, (n + 1) * (n + 2)),)
        assert r.convolutions == (ConvolutionTerm(r.ring(-2), 1, 0, 0),)
        assert r.max_offset() == 2

    def test_bernoulli(self):
        r = qde_to_qre(parse_qde("z*y1 + (z-1)*y + y^2"))
        n = r.ring.gens[0]
        assert dict(r.linear) == {0: n - 1, -1: r.ring.one}
        assert r.convolutions == (ConvolutionTerm(r.ring.one, 0, 0, 0),)
        assert r.max_offset() == 0

    def test_log_one_plus_sin(self):
        r = qde_to_qre(parse_qde("y3 + y1*y2"))
        n = r.ring.gens[0]
        assert r.linear == ((3, (n + 1) * (n + 2) * (n + 3)),)
        assert r.convolutions == (ConvolutionTerm(r.ring.one, 2, 1, 0),)
        assert r.max_offset() == 3

    def test_parameters_carried(self):
        r = qde_to_qre(find_qde(parse("sec(z)^k", {"k"})))
        assert r.params == ("k",)
        with pytest.raises(ParameterError):
            r.residual([1, 0, 1, 0, 1], 0)

    def test_rendering(self):
        r = qde_to_qre(parse_qde("y2 - 2*y*y1"))
        text = str(r)
        assert text.endswith(" = 0")
        assert "sum(" in text
        assert r"\sum" in r.latex()
        document = qre_to_dict(r)
        assert document["max_offset"] == 2
        assert document["convolution_terms"][0]["coefficient"] == "-2"

    def test_negated_sum_coefficient(self):
        r = qde_to_qre(parse_qde("-(k+1)*y^2 + y1", ["k"]))
        assert str(r) == "(n + 1)*a[n + 1] - (k + 1)*sum(a[m]*a[n - m], m = 0 .. n) = 0"


class TestResidual:
    @pytest.mark.parametrize("text", ["tan(z)", "z/(exp(z)-1)", "log(1+sin(z))", "sec(z)", "1/(1+sin(z))"])
    def test_series_prefix_satisfies_recurrence(self, text):
        r = qde_to_qre(find_qde(parse(text)))
        coeffs = _prefix(text, 30)
        for n in range(30 - r.max_offset()):
            assert r.residual(coeffs, n) == 0

    def test_short_prefix(self):
        r = qde_to_qre(parse_qde("y2 - 2*y*y1"))
        with pytest.raises(InsufficientPrefixError) as exc:
            r.residual(_prefix("tan(z)", 3), 4)
        assert exc.value.available == 3


class TestEvaluate:
    def test_next_coefficient_of_tan(self):
        r = qde_to_qre(parse_qde("y2 - 2*y*y1"))
        coeffs = _prefix("tan(z)", 16)
        for n in range(12):
            form = evaluate_qre(r, coeffs[:n + 2], n)
            assert form.index == n + 2
            assert form.is_linear
            assert form.solve() == coeffs[n + 2]

    def test_quadratic_in_the_unknown(self):
        r = qde_to_qre(parse_qde("z*y1 + (z-1)*y + y^2"))
        form = evaluate_qre(r, [], 0)
        assert form.index == 0
        assert not form.is_linear
        assert form.solve() is None
        assert form.is_satisfied_by(1)
        assert form.is_satisfied_by(0)

    def test_missing_lower_coefficients(self):
        r = qde_to_qre(parse_qde("y2 - 2*y*y1"))
        with pytest.raises(InsufficientPrefixError):
            evaluate_qre(r, [], 3)
