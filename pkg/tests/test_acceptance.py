"""Acceptance criteria. The conftest hook prints one PASS/FAIL line per criterion."""

import cmath
import time

import numpy as np
import pytest

from oracles import jones_from_bracket
from ribbonlab.catalog import ClassicalParams, SOSParams, jimbo_model, sos_model, standard_models
from ribbonlab.drinfeld import drinfeld_from_model
from ribbonlab.invariants import BraidWord, link_invariant, markov_move_suite
from ribbonlab.numerics import double_commutant_dimension, spectral
from ribbonlab.ribbon import GroupLikeVector, evaluate_glf, mcrit_check, quotient_vanishing, ribbon_solve
from ribbonlab.verify import (
    build_lyubashenko_double,
    check_bmw,
    check_double_star_triangular,
    check_glf_commutant,
    check_hecke,
    check_star_triangular,
    is_closable,
)

MODELS = ["A1", "A2", "A3", "B2", "C2", "D2", "SOS(2,2)", "SOS(2,3)", "SOS(3,2)"]


def test_criterion_1_star_triangle_everywhere():
    start = time.perf_counter()
    models = standard_models()
    for name in MODELS:
        rep = check_star_triangular(models[name].model)
        assert rep.passed and rep.residual < 1e-9, (name, rep.residual)
    assert time.perf_counter() - start < 10


@pytest.mark.parametrize("name", MODELS)
def test_criterion_2_closable_and_double(catalog_models, name):
    model = catalog_models[name].model
    assert is_closable(model)
    rep = check_double_star_triangular(build_lyubashenko_double(model))
    assert rep.residual < 1e-9


@pytest.mark.parametrize("name", ["B2", "C2"])
def test_criterion_3_bmw_and_clusters(catalog_models, name):
    entry = catalog_models[name]
    p = ClassicalParams.create(entry.params["type"], entry.params["rank"],
                               **({"q_half": 1.2} if name == "B2" else {"q": 1.2}))
    # lambda = -nu q^(-N-nu) for the orthogonal and symplectic families
    assert p.lam == pytest.approx(-p.nu * p.q ** (-p.N - p.nu))
    rep = check_bmw(entry.model, p.lam, p.q)
    assert rep.passed and rep.residual < 1e-9
    sd = spectral(entry.model.operator, 1e-7)
    assert len(sd.eigenvalues) == 3
    expected = [1 / p.lam, -p.q, 1 / p.q]
    for z in expected:
        assert min(abs(z - e) for e in sd.eigenvalues) < 1e-9


@pytest.mark.parametrize("name", ["A1", "A2", "A3"])
def test_criterion_3_hecke_a_type(catalog_models, name):
    entry = catalog_models[name]
    a, b = entry.hecke
    q = entry.q
    assert (a, b) == pytest.approx((1 / q, -q))
    rep = check_hecke(entry.model, a, b)
    assert rep.passed and rep.residual < 1e-9


@pytest.mark.parametrize("eta", [1, -1])
@pytest.mark.parametrize(
    "type_,kw",
    [("B", {"q_half": 1.2}), ("B", {"q_half": 0.8}), ("C", {"q": 1.2}), ("C", {"q": 0.7})],
)
def test_criterion_4_drinfeld_anchor(type_, kw, eta):
    p = ClassicalParams.create(type_, 2, eta=eta, **kw)
    entry = jimbo_model(p)
    U1 = drinfeld_from_model(entry.model).U1.matrix
    assert abs(U1[0, 0] - eta * p.q) / abs(p.q) < 1e-10
    expected = eta * p.q ** (p.N + p.nu) * entry.m_plus
    assert np.abs(np.diag(U1) - expected).max() < 1e-9
    assert np.abs(U1 - np.diag(np.diag(U1))).max() < 1e-9


@pytest.mark.parametrize("name", MODELS)
def test_criterion_5_ribbon(catalog_models, name):
    entry = catalog_models[name]
    solutions = ribbon_solve(drinfeld_from_model(entry.model))
    assert len(solutions) == 2
    for sol in solutions:
        assert max(sol.residuals.values()) < 1e-8, sol.residuals
        assert check_glf_commutant(entry.model, sol.M).passed
        assert mcrit_check(sol.M, entry.s2).passed


def _counts(entry):
    ideals = entry.ideal_vectors()
    return sum(quotient_vanishing(entry.m_operator(s), ideals).passed for s in ("plus", "minus"))


@pytest.mark.parametrize("rank", [1, 2])
def test_criterion_6_det_on_a_type(rank):
    entry = jimbo_model(ClassicalParams.create("A", rank, q=1.3))
    N = rank + 1
    for sign, s in ((1, "plus"), (-1, "minus")):
        assert evaluate_glf(entry.m_operator(s), entry.det) == pytest.approx(sign ** N, abs=1e-9)
    assert _counts(entry) == (2 if N % 2 == 0 else 1)


@pytest.mark.parametrize("n,level", [(2, 2), (2, 3), (3, 2)])
def test_criterion_6_det_on_sos(n, level):
    entry = sos_model(SOSParams(n, level))
    unit = GroupLikeVector.unit(entry.graph)
    nv = len(entry.graph.vertices)
    for sign, s in ((1, "plus"), (-1, "minus")):
        val = evaluate_glf(entry.m_operator(s), entry.det - unit)
        assert val == pytest.approx(nv * (sign ** n - 1), abs=1e-9)
    assert _counts(entry) == (2 if n % 2 == 0 else 1)


@pytest.mark.parametrize("q", [1.3, 0.7, cmath.exp(1j * cmath.pi / 5)])
def test_criterion_7_trefoil_against_bracket(q):
    entry = jimbo_model(ClassicalParams.create("A", 1, q=q))
    M = entry.m_operator("plus")
    A = 1j * complex(q) ** -0.5
    trefoil = link_invariant(entry.model, M, BraidWord.parse("1 1 1", 2)).value()
    assert abs(trefoil - jones_from_bracket(2, [1, 1, 1], A)) < 1e-8
    assert abs(trefoil - 1) > 1e-3
    unknot = link_invariant(entry.model, M, BraidWord(1)).value()
    assert abs(unknot - 1) < 1e-12
    drift = markov_move_suite(entry.model, M, BraidWord.parse("1 1 1", 2), trials=20)
    assert drift.passed and drift.residual < 1e-8


@pytest.mark.parametrize("name,expected", [("A1", 2), ("A2", 2), ("A3", 2), ("B2", 3), ("C2", 3), ("D2", 3)])
def test_criterion_8_double_commutant(catalog_models, name, expected):
    start = time.perf_counter()
    assert double_commutant_dimension(catalog_models[name].model.operator) == expected
    assert time.perf_counter() - start < 5
