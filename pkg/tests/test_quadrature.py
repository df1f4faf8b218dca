"""
@file test_quadrature.py
@Description: Checks of the Gauss-Hermite, Gauss-Laguerre and Gauss-Legendre rules
"""
import math
import os
import sys

import numpy as np
import pytest
from scipy.special import gamma as gamma_fn
from scipy.special import gammaln

current = os.path.dirname(os.path.realpath(__file__))
parent_directory = os.path.dirname(current)

sys.path.append(parent_directory)

from mg_secrecy import quadrature
from mg_secrecy.errors import InvalidArgumentError, NumericalError
from mg_secrecy.quadrature import MAX_ORDER, RuleKind, graded_rule, make_rule

WEIGHT_SUMS = {RuleKind.HERMITE: math.sqrt(math.pi), RuleKind.LAGUERRE: 1.0, RuleKind.LEGENDRE: 2.0}


def moment(kind, k):
    if kind is RuleKind.HERMITE:
        return 0.0 if k % 2 else gamma_fn((k + 1) / 2.0)
    if kind is RuleKind.LAGUERRE:
        return math.factorial(k)
    return 0.0 if k % 2 else 2.0 / (k + 1)


def test_hermite_two_points():
    rule = make_rule(RuleKind.HERMITE, 2)
    np.testing.assert_allclose(rule.nodes, [-1 / math.sqrt(2), 1 / math.sqrt(2)], rtol=1e-14)
    np.testing.assert_allclose(rule.weights, [math.sqrt(math.pi) / 2] * 2, rtol=1e-14)


def test_laguerre_one_point():
    rule = make_rule(RuleKind.LAGUERRE, 1)
    np.testing.assert_allclose(rule.nodes, [1.0], rtol=1e-14)
    np.testing.assert_allclose(rule.weights, [1.0], rtol=1e-14)


def test_legendre_two_points():
    rule = make_rule("legendre", 2)
    np.testing.assert_allclose(rule.nodes, [-1 / math.sqrt(3), 1 / math.sqrt(3)], rtol=1e-14)
    np.testing.assert_allclose(rule.weights, [1.0, 1.0], rtol=1e-14)


@pytest.mark.parametrize("order", [1, 2, 5, 20, 64, 128])
def test_weight_sums_and_node_layout(order):
    h = make_rule(RuleKind.HERMITE, order)
    assert np.all(h.weights > 0)
    assert abs(h.weights.sum() - math.sqrt(math.pi)) <= 1e-12 * math.sqrt(math.pi)
    np.testing.assert_array_equal(h.nodes, -h.nodes[::-1])

    g = make_rule(RuleKind.LEGENDRE, order)
    assert np.all(g.weights > 0)
    assert abs(g.weights.sum() - 2.0) <= 2e-12
    assert np.all(np.abs(g.nodes) < 1.0)
    np.testing.assert_array_equal(g.nodes, -g.nodes[::-1])

    for rule in (h, g):
        assert np.all(np.diff(rule.nodes) > 0)


@pytest.mark.parametrize("order", [1, 2, 5, 20, 64])
def test_laguerre_layout(order):
    rule = make_rule(RuleKind.LAGUERRE, order)
    assert np.all(rule.weights > 0)
    assert abs(rule.weights.sum() - 1.0) <= 1e-12
    assert rule.nodes[0] > 0
    assert np.all(np.diff(rule.nodes) > 0)


@pytest.mark.parametrize("kind,orders", [
    (RuleKind.HERMITE, range(1, 65)),
    (RuleKind.LEGENDRE, range(1, 65)),
    (RuleKind.LAGUERRE, range(1, 65)),
])
def test_monomials_integrated_exactly(kind, orders):
    for n in orders:
        rule = make_rule(kind, n)
        for k in range(2 * n):
            terms = rule.weights * rule.nodes ** k
            exact = moment(kind, k)
            scale = max(abs(exact), np.sum(np.abs(terms)))
            assert abs(terms.sum() - exact) <= 1e-9 * scale, (kind, n, k)


def test_rules_are_cached_and_read_only():
    rule = make_rule(RuleKind.HERMITE, 20)
    assert make_rule("hermite", 20) is rule
    with pytest.raises(ValueError):
        rule.nodes[0] = 0.0


@pytest.mark.parametrize("kind,order", [
    (RuleKind.HERMITE, 0),
    (RuleKind.LEGENDRE, MAX_ORDER + 1),
    (RuleKind.LAGUERRE, 2.5),
    (RuleKind.LAGUERRE, True),
    ("chebyshev", 4),
])
def test_invalid_rules_rejected(kind, order):
    with pytest.raises(InvalidArgumentError):
        make_rule(kind, order)


def test_legendre_on_interval():
    nodes, weights = make_rule(RuleKind.LEGENDRE, 3).on_interval(0.0, 3.0)
    assert np.all((nodes > 0) & (nodes < 3))
    assert math.isclose(np.dot(weights, nodes ** 2), 9.0, rel_tol=1e-13)
    with pytest.raises(InvalidArgumentError):
        make_rule(RuleKind.HERMITE, 3).on_interval(0.0, 1.0)


def test_graded_rule_resolves_endpoint_singularities():
    nodes, weights = graded_rule(0.0, 1.0, 20, left_depth=30)
    assert math.isclose(np.dot(weights, np.sqrt(nodes)), 2.0 / 3.0, rel_tol=1e-12)

    nodes, weights = graded_rule(0.0, 2.0, 20, right_depth=30)
    # int_0^2 -log(2 - x) dx = 2 - 2 log 2
    assert math.isclose(np.dot(weights, -np.log(2.0 - nodes)), 2.0 - 2.0 * math.log(2.0), rel_tol=1e-10)
    assert np.all(np.diff(nodes) > 0)


@pytest.mark.parametrize("kind", list(RuleKind))
def test_every_order_is_finite(kind):
    for n in range(1, MAX_ORDER + 1):
        rule = make_rule(kind, n)
        assert np.all(np.isfinite(rule.nodes)) and np.all(np.isfinite(rule.weights)), n
        assert np.all(rule.weights >= 0.0), n
        assert abs(rule.weights.sum() - WEIGHT_SUMS[kind]) <= 1e-10 * WEIGHT_SUMS[kind], n


@pytest.mark.parametrize("alpha", [-0.5, -0.4, 0.7, 3.0])
def test_generalized_laguerre_moments(alpha):
    for n in (1, 5, 20, 40):
        rule = make_rule(RuleKind.LAGUERRE, n, alpha=alpha)
        assert rule.alpha == alpha
        assert np.all(rule.nodes > 0)
        for k in range(2 * n):
            terms = rule.weights * rule.nodes ** k
            # int_0^inf x^(alpha + k) e^(-x) dx
            exact = math.exp(gammaln(alpha + k + 1.0))
            assert abs(terms.sum() - exact) <= 1e-9 * max(exact, np.sum(np.abs(terms))), (n, k)


def test_laguerre_at_the_maximum_order():
    rule = make_rule(RuleKind.LAGUERRE, MAX_ORDER)
    assert abs(rule.weights.sum() - 1.0) <= 1e-12
    assert abs(np.dot(rule.weights, rule.nodes) - 1.0) <= 1e-10


@pytest.mark.parametrize("kind,alpha", [
    (RuleKind.LAGUERRE, -1.0),
    (RuleKind.LAGUERRE, math.inf),
    (RuleKind.HERMITE, 0.5),
    (RuleKind.LEGENDRE, -0.5),
])
def test_invalid_exponents_rejected(kind, alpha):
    with pytest.raises(InvalidArgumentError):
        make_rule(kind, 4, alpha=alpha)


def test_non_finite_rules_are_refused(monkeypatch):
    def broken(n):
        return np.zeros(n), np.full(n, np.nan)

    monkeypatch.setitem(quadrature._GENERATORS, RuleKind.LEGENDRE, broken)
    quadrature._cached_rule.cache_clear()
    try:
        with pytest.raises(NumericalError):
            make_rule(RuleKind.LEGENDRE, 7)
    finally:
        quadrature._cached_rule.cache_clear()
