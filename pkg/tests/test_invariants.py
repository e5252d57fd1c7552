import cmath
import random
import warnings

import numpy as np
import pytest

from oracles import jones_from_bracket, kauffman_bracket_closure, trefoil_jones
from ribbonlab.catalog import ClassicalParams, jimbo_model
from ribbonlab.core import BlockOperator, OrientedGraph, FaceModel, identity
from ribbonlab.errors import NotEnhanced, TooLarge, ZeroUnknot
from ribbonlab.invariants import (
    _guard,
    BraidWord,
    braid_image,
    braid_representation,
    link_invariant,
    markov_move_suite,
    markov_trace,
)
from ribbonlab.numerics import invert
from ribbonlab.verify import enhancement_constants

Q_POINTS = [1.3, 0.7, cmath.exp(1j * cmath.pi / 5)]

PRESENTATIONS = {
    "unknot": [(1, ""), (2, "1"), (3, "1 -2")],
    "trefoil": [(2, "1 1 1"), (3, "1 1 1 2")],
    "figure-eight": [(3, "1 -2 1 -2"), (3, "-2 1 -2 1")],
}


def a1(q):
    return jimbo_model(ClassicalParams.create("A", 1, q=q))


def kauffman_variable(q):
    # the matched point of the bracket variable for the A1 model with M = diag(1/q, q)
    return 1j * complex(q) ** -0.5


class TestBraidWord:
    def test_parse(self):
        b = BraidWord.parse("1 -2 1")
        assert b.n == 3 and b.word == ((1, 1), (2, -1), (1, 1))
        assert (b.e_plus, b.e_minus, b.writhe) == (2, 1, 1)
        assert str(b) == "1 -2 1"

    def test_explicit_strands(self):
        assert BraidWord.parse("", 1).n == 1
        assert BraidWord.parse("1", 4).n == 4

    @pytest.mark.parametrize("text,n", [("0", None), ("3", 3), ("x", None)])
    def test_rejects(self, text, n):
        with pytest.raises(ValueError):
            BraidWord.parse(text, n)

    def test_inverse_and_product(self):
        b = BraidWord.parse("1 -2")
        assert str(b.inverse()) == "2 -1"
        assert len(b * b.inverse()) == 4


class TestRepresentation:
    def test_one_strand_has_no_generators(self):
        assert braid_representation(a1(1.3).model, 1) == {}

    def test_two_strands_is_w(self):
        e = a1(1.3)
        rep = braid_representation(e.model, 2)
        np.testing.assert_array_equal(rep[(1, 1)].matrix, e.model.operator.matrix)
        np.testing.assert_allclose(rep[(1, -1)].matrix, invert(e.model.operator).matrix)

    @pytest.mark.parametrize("name", ["A2", "C2", "SOS(2,3)", "SOS(3,2)"])
    def test_braid_and_far_commutation(self, catalog_models, name):
        e = catalog_models[name]
        n = 4 if e.graph.dim(1) <= 4 else 3
        rep = braid_representation(e.model, n)
        s = {i: rep[(i, 1)].matrix for i in range(1, n)}
        for i in range(1, n - 1):
            assert np.abs(s[i] @ s[i + 1] @ s[i] - s[i + 1] @ s[i] @ s[i + 1]).max() < 1e-9
        if n == 4:
            assert np.abs(s[1] @ s[3] - s[3] @ s[1]).max() < 1e-12

    def test_guard(self):
        g = OrientedGraph(["v"], [(f"x{i}", "v", "v") for i in range(11)])
        model = FaceModel(g, {})
        with pytest.raises(TooLarge):
            braid_representation(model, 6)
        # 5^6 words only warn; materializing them would need gigabytes, so call the guard alone
        with pytest.warns(UserWarning, match="sparse"):
            _guard(OrientedGraph(["v"], [(f"x{i}", "v", "v") for i in range(5)]), 6)


class TestMarkovTrace:
    def test_quantum_dimension_a1(self):
        q = 1.3
        e = a1(q)
        val = markov_trace(identity(e.graph, 1), e.m_operator("plus"))
        assert list(val.values()) == [pytest.approx(q + 1 / q)]

    def test_sos_quantum_dimension(self, catalog_models):
        e = catalog_models["SOS(2,2)"]
        D = e.m_plus
        val = markov_trace(identity(e.graph, 1), e.m_operator("plus"))
        for v in e.graph.vertices:
            expected = sum(D[k] for k, x in enumerate(e.graph.edges) if x.src == v)
            assert val[v] == pytest.approx(expected)

    @pytest.mark.parametrize("name", ["A1", "A2", "C2", "SOS(2,2)", "SOS(3,2)"])
    def test_conjugation_invariance(self, catalog_models, name):
        e = catalog_models[name]
        rng = random.Random(4)
        M = e.m_operator("plus")
        n = 3
        rep = braid_representation(e.model, n)
        for _ in range(5):
            f = BraidWord(n, tuple((rng.randint(1, n - 1), rng.choice((1, -1))) for _ in range(4)))
            g = BraidWord(n, tuple((rng.randint(1, n - 1), rng.choice((1, -1))) for _ in range(3)))
            lhs = markov_trace(braid_image(e.model, g * f * g.inverse(), rep), M)
            rhs = markov_trace(braid_image(e.model, f, rep), M)
            for v in lhs:
                assert lhs[v] == pytest.approx(rhs[v], abs=1e-9)

    @pytest.mark.parametrize("name", ["A1", "A2", "SOS(2,2)", "SOS(2,3)"])
    @pytest.mark.parametrize("sign", [1, -1])
    def test_stabilization_multiplies_by_c(self, catalog_models, name, sign):
        e = catalog_models[name]
        M = e.m_operator("plus")
        c_plus, c_minus = enhancement_constants(e.model, M)
        beta = BraidWord.parse("1 -1 1", 2)
        stab = BraidWord(3, beta.word + ((2, sign),))
        base = markov_trace(braid_image(e.model, beta), M)
        moved = markov_trace(braid_image(e.model, stab), M)
        c = c_plus if sign > 0 else c_minus
        for v in base:
            assert moved[v] == pytest.approx(c * base[v], abs=1e-9)


class TestOracle:
    def test_bracket_of_unknot_diagram(self):
        A = 0.9 + 0.2j
        assert kauffman_bracket_closure(1, [], A) == pytest.approx(-A ** 2 - A ** -2)

    def test_trefoil_closed_form(self):
        # the right-handed trefoil's mirror has Jones polynomial V(1/t)
        for t in (1.3, 0.6 + 0.2j):
            A = t ** -0.25
            assert jones_from_bracket(2, [1, 1, 1], A) == pytest.approx(trefoil_jones(1 / t))

    @pytest.mark.parametrize("q", Q_POINTS)
    @pytest.mark.parametrize("link", sorted(PRESENTATIONS))
    def test_a1_matches_bracket(self, q, link):
        e = a1(q)
        M = e.m_operator("plus")
        A = kauffman_variable(q)
        for n, word in PRESENTATIONS[link]:
            beta = BraidWord.parse(word, n)
            rep = link_invariant(e.model, M, beta)
            ints = [int(x) for x in word.split()]
            assert rep.value() == pytest.approx(jones_from_bracket(n, ints, A), abs=1e-8)


class TestLinkInvariant:
    @pytest.mark.parametrize("link", sorted(PRESENTATIONS))
    @pytest.mark.parametrize("name", ["A1", "A2", "SOS(2,2)", "SOS(2,3)"])
    def test_presentation_independence(self, catalog_models, name, link):
        e = catalog_models[name]
        M = e.m_operator("plus")
        values = [link_invariant(e.model, M, BraidWord.parse(w, n)).normalized for n, w in PRESENTATIONS[link]]
        for other in values[1:]:
            for v in values[0]:
                assert other[v] == pytest.approx(values[0][v], abs=1e-9)

    @pytest.mark.parametrize("name", ["A1", "SOS(2,2)", "SOS(3,2)"])
    def test_unknot_is_one(self, catalog_models, name):
        e = catalog_models[name]
        rep = link_invariant(e.model, e.m_operator("plus"), BraidWord(1))
        assert all(x == pytest.approx(1) for x in rep.normalized.values())

    def test_framing_changes_by_c(self):
        e = a1(1.3)
        M = e.m_operator("plus")
        c_plus, _ = enhancement_constants(e.model, M)
        one = link_invariant(e.model, M, BraidWord.parse("1 1 1", 2))
        two = link_invariant(e.model, M, BraidWord.parse("1 1 1 2", 3))
        v = e.graph.vertices[0]
        assert two.framed[v] == pytest.approx(c_plus * one.framed[v])
        assert two.normalized[v] == pytest.approx(one.normalized[v])

    def test_mirror_is_conjugate_at_unitary_q(self):
        e = a1(cmath.exp(1j * cmath.pi / 5))
        M = e.m_operator("plus")
        right = link_invariant(e.model, M, BraidWord.parse("1 1 1", 2)).value()
        left = link_invariant(e.model, M, BraidWord.parse("-1 -1 -1", 2)).value()
        assert left == pytest.approx(right.conjugate())
        assert abs(right.imag) > 0.1

    @pytest.mark.parametrize("q", Q_POINTS)
    def test_trefoil_differs_from_unknot(self, q):
        e = a1(q)
        assert abs(link_invariant(e.model, e.m_operator("plus"), BraidWord.parse("1 1 1", 2)).value() - 1) > 0.1

    def test_sos_vertex_spread_is_reported(self, catalog_models):
        e = catalog_models["SOS(2,3)"]
        rep = link_invariant(e.model, e.m_operator("plus"), BraidWord.parse("1 1 1", 2))
        js = rep.to_json()
        assert js["vertex_spread"] == pytest.approx(rep.vertex_spread())
        assert set(js["normalized"]) == set(e.graph.vertices)

    def test_not_enhanced(self):
        e = a1(1.3)
        with pytest.raises(NotEnhanced):
            link_invariant(e.model, identity(e.graph, 1), BraidWord.parse("1", 2))

    def test_zero_quantum_dimension(self):
        # q = i makes q + 1/q vanish
        e = a1(1j)
        M = e.m_operator("plus")
        with pytest.raises(ZeroUnknot):
            link_invariant(e.model, M, BraidWord(1), constants=(1.0, 1.0))


class TestMarkovSuite:
    def test_identity_braid(self):
        e = a1(1.3)
        rep = markov_move_suite(e.model, e.m_operator("plus"), BraidWord(1), trials=5)
        assert rep.passed and rep.residual < 1e-10

    def test_trefoil(self):
        e = a1(1.3)
        rep = markov_move_suite(e.model, e.m_operator("plus"), BraidWord.parse("1 1 1", 2), trials=20)
        assert rep.passed and rep.residual < 1e-8
        assert rep.details == {"trials": 20, "seed": 0}

    def test_seed_is_deterministic(self):
        e = a1(0.7)
        beta = BraidWord.parse("1 -2 1", 3)
        a = markov_move_suite(e.model, e.m_operator("plus"), beta, trials=6, seed=3)
        b = markov_move_suite(e.model, e.m_operator("plus"), beta, trials=6, seed=3)
        assert a.residual == b.residual

    def test_explicit_constants_override(self):
        e = a1(1.3)
        beta = BraidWord.parse("1", 2)
        forced = link_invariant(e.model, e.m_operator("plus"), beta, constants=(2.0, 0.5))
        good = link_invariant(e.model, e.m_operator("plus"), beta)
        assert forced.c_plus == 2.0
        assert forced.value() == pytest.approx(good.value() * good.c_plus / 2.0)


def test_no_warning_at_small_sizes():
    e = a1(1.3)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        braid_representation(e.model, 4)


def test_diagonal_weight_operator_type():
    e = a1(1.3)
    assert isinstance(e.m_operator("plus"), BlockOperator)
