"""
Series representations, expansions through the recurrence, identity decisions and Bernoulli numbers
"""
import pytest
from sympy.polys.domains import QQ

from qfps.data.corpus import corpus_loader
from qfps.engine.errors import DomainError, ParameterError
from qfps.engine.expr import sub
from qfps.engine.parser import parse
from qfps.engine.rep import (
    VerdictKind, bernoulli_from_representation, bernoulli_numbers, fps, prove, qtaylor,
    ramanujan_convolution,
)
from qfps.engine.series import series_of

PUBLISHED = [e for e in corpus_loader.entries(include_slow=False) if e.published_initial_values]
UNROLLED = [e for e in corpus_loader.entries(include_slow=False) if not e.params and e.max_order is None]


class TestFPS:
    @pytest.mark.parametrize("entry", PUBLISHED, ids=lambda e: e.name)
    def test_published_initial_values(self, entry, rat):
        published = [rat(v) for v in entry.published_initial_values]
        rep = fps(parse(entry.expr), initial_values=len(published))
        assert rep.shift == entry.shift
        assert list(rep.initial_values[:len(published)]) == published

    @pytest.mark.parametrize("entry", UNROLLED, ids=lambda e: e.name)
    def test_unrolling_matches_series(self, entry):
        f = parse(entry.expr)
        rep = fps(f)
        expected = series_of(f, rep.shift + 29).coefficients(rep.shift, 30)
        assert rep.coefficients(30) == expected

    def test_tan_recurrence(self):
        rep = fps(parse("tan(z)"))
        n = rep.qre.ring.gens[0]
        assert rep.recurrence.lead == 2
        assert rep.recurrence.denominator == (n + 1) * (n + 2)
        assert list(rep.initial_values[:2]) == [0, 1]
        assert not rep.is_implicit

    def test_bernoulli_default_initial_values(self):
        rep = fps(parse("z/(exp(z)-1)"))
        assert rep.initial_values[0] == 1
        assert "a[0] = 1" in str(rep)

    def test_laurent_shift(self):
        rep = fps(parse("1/log(1+z)"))
        assert rep.shift == -1
        assert rep.valuation == -1

    def test_zero(self):
        rep = fps(parse("0"))
        assert rep.qde.leading_index == 2
        assert rep.initial_values == ()
        assert rep.proven_zero
        assert rep.induction_bound == rep.valid_from

    def test_parameters_rejected(self):
        with pytest.raises(ParameterError):
            fps(parse("sec(z)^k", {"k"}))

    def test_latex(self):
        assert r"\sum" in fps(parse("sec(z)")).series_text(latex=True)

    def test_series_text(self):
        assert fps(parse("tan(z)")).series_text() == "sum(a[n]*z^n, n = 0 .. infinity)"
        assert fps(parse("1/log(1+z)")).series_text() == "sum(a[n]*z^(n - 1), n = 0 .. infinity)"
        assert fps(parse("1/log(1+z)")).series_text(latex=True) == r"\sum_{n=0}^{\infty} a_{n} z^{n - 1}"

    @pytest.mark.parametrize("k", [12, 13, 14, 20, 40, 64])
    def test_monomials(self, k):
        rep = fps(parse(f"z^{k}"))
        assert rep.shift == 0
        assert rep.valuation == k
        assert not rep.is_implicit
        assert rep.coefficients(k + 4) == [0] * k + [1, 0, 0, 0]


class TestQTaylor:
    def test_sec(self):
        s = qtaylor(parse("sec(z)"), 7)
        assert s.coefficients(0, 8) == [1, 0, QQ(1, 2), 0, QQ(5, 24), 0, QQ(61, 720), 0]

    def test_tan(self):
        s = qtaylor(parse("tan(z)"), 7)
        assert s == series_of(parse("tan(z)"), 7)

    def test_laurent(self):
        s = qtaylor(parse("1/log(1+z)"), 2)
        assert s.coefficients(-1, 4) == [1, QQ(1, 2), QQ(-1, 12), QQ(1, 24)]

    def test_zero(self):
        assert qtaylor(parse("0"), 5).is_zero


class TestProve:
    @pytest.mark.parametrize("identity", corpus_loader.identities(), ids=lambda i: i.name)
    def test_corpus_identities(self, identity):
        a, b = parse(identity.left), parse(identity.right)
        verdict = prove(a, b)
        if identity.equal:
            assert verdict.kind is VerdictKind.EQUAL
            assert series_of(sub(a, b), 30).is_zero
        else:
            assert verdict.kind is VerdictKind.NOT_EQUAL
            e = verdict.witness.exponent
            assert verdict.witness.left == series_of(a, e).coefficient(e)
            assert verdict.witness.right == series_of(b, e).coefficient(e)
            assert verdict.witness.left != verdict.witness.right

    def test_tan_against_sin(self):
        verdict = prove(parse("tan(z)"), parse("sin(z)"))
        assert verdict.kind is VerdictKind.NOT_EQUAL
        assert verdict.witness.exponent == 3
        assert (verdict.witness.left, verdict.witness.right) == (QQ(1, 3), QQ(-1, 6))

    def test_equal_verdict_carries_certificate(self):
        verdict = prove(parse("log(tan(z/2)+sec(z/2))"), parse("arcsinh(sin(z)/(1+cos(z)))"))
        assert verdict.kind is VerdictKind.EQUAL
        assert verdict.certificate is not None
        assert verdict.certificate.proven_zero

    def test_difference_beyond_the_valuation_cap(self):
        verdict = prove(parse("tan(z)"), parse("tan(z) + z^70"))
        assert verdict.kind is VerdictKind.NOT_EQUAL
        assert verdict.witness.exponent == 70
        assert (verdict.witness.left, verdict.witness.right) == (0, 1)

    def test_multiple_angle(self):
        verdict = prove(parse("sin(2*z)"), parse("2*sin(z)*cos(z)"))
        assert verdict.kind is VerdictKind.EQUAL


class TestBernoulli:
    def test_numbers(self):
        numbers = bernoulli_numbers(21)
        assert numbers[:5] == [1, QQ(-1, 2), QQ(1, 6), 0, QQ(-1, 30)]
        assert numbers[20] == QQ(-174611, 330)
        assert all(numbers[m] == 0 for m in range(3, 21, 2))

    def test_from_representation(self):
        rep = fps(parse("z/(exp(z)-1)"))
        assert bernoulli_from_representation(rep, 21) == bernoulli_numbers(21)

    def test_convolution_identity(self):
        numbers = bernoulli_numbers(21)
        for n in range(1, 9):
            assert ramanujan_convolution(numbers, n) == numbers[2 * n + 2]

    def test_convolution_starts_at_one(self):
        with pytest.raises(DomainError):
            ramanujan_convolution(bernoulli_numbers(4), 0)
