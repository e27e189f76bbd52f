import pytest

from primindex.errors import GraphError, HypothesisViolation, WordError
from primindex.services.constructions import (
    NielsenMove,
    apply_nielsen,
    corollary_bound,
    double_cycle_cover,
    glued_cycles_certificate,
    glued_cycles_cover,
    kernel_phi_cover,
    lemma_one_basis,
    power_basis,
    power_basis_construction,
    rewrite_through_nielsen,
    schreier_cover,
)
from primindex.services.stallings import (
    contains,
    cover_to_graph,
    enumerate_covers,
    is_cover,
    isomorphic,
    subgroup_graph,
)
from primindex.services.whitehead import is_primitive
from primindex.services.words import Word, apply_letter_map, power_word


def test_nielsen_move_validation():
    with pytest.raises(WordError):
        NielsenMove(0, Word((1,), 2))
    with pytest.raises(WordError):
        NielsenMove(2, Word((1,), 2))
    with pytest.raises(WordError):
        NielsenMove(0, Word((2,), 2), side="middle")


@pytest.mark.parametrize("side", ["left", "right"])
def test_rewrite_through_nielsen_matches_moved_basis(w, side):
    old = [w("a"), w("b"), w("a b^2")]
    moves = [NielsenMove(0, Word((2, -3), 3), side), NielsenMove(2, Word((1,), 3), "left")]
    new = apply_nielsen(old, moves)
    for text in ("x1", "x2 X3", "x3^2 x1 X2"):
        u = w(text, 3)
        rewritten = rewrite_through_nielsen(u, moves)
        assert apply_letter_map(rewritten, dict(enumerate(new, start=1))) == apply_letter_map(
            u, dict(enumerate(old, start=1))
        )


@pytest.mark.parametrize("d", range(2, 21))
def test_double_cycle_is_the_kernel_cover(d):
    g = double_cycle_cover(d)
    assert is_cover(g)
    assert isomorphic(g, kernel_phi_cover(d))


def test_double_cycle_needs_degree_two():
    with pytest.raises(HypothesisViolation):
        double_cycle_cover(1)


def test_schreier_cover_rejects_non_surjective_map():
    with pytest.raises(HypothesisViolation):
        schreier_cover((2, 0), 4)
    assert schreier_cover((1, 1), 2).degree == 2


@pytest.mark.parametrize("d", range(2, 21))
def test_lemma_one_basis(w, d):
    basis = lemma_one_basis(d)
    assert basis.valid, basis.checks
    assert basis.y[0] == w("a") ** d
    assert basis.y[d] == w("b") ** d
    assert all(basis.y[i] == w(f"a^{i} b^{i}") for i in range(1, d))
    assert basis.to_json()["Y"][1] == "a b"


def test_lemma_one_rewrite(w):
    basis = lemma_one_basis(2)
    assert basis.rewrite(power_word(5, 5)).letters == (1, 1, 2, 3, 3)
    assert lemma_one_basis(3).rewrite(power_word(7, 7)).letters == (1, 1, 2, 4, 4)


@pytest.mark.parametrize("n,t,d,dp,degree", [(3, 3, 2, 2, 2), (5, 7, 2, 2, 2), (7, 5, 3, 2, 3), (7, 9, 4, 2, 4)])
def test_glued_cycles_certificate(n, t, d, dp, degree):
    cert = glued_cycles_certificate(n, t, d, dp)
    assert cert.valid, cert.checks
    assert cert.degree == degree
    assert contains(cert.cover, power_word(n, t))
    assert is_primitive(cert.rewritten)
    assert cert.eta_moved.letters.count(3) == 1
    assert cert.to_json()["degree"] == degree


def test_glued_cycles_cover_returns_witness():
    cover, witness = glued_cycles_cover(3, 3, 2, 2)
    assert witness == power_word(3, 3)
    assert cover.num_vertices == 2


@pytest.mark.parametrize("args", [(4, 3, 2, 2), (3, 3, 4, 2), (3, 5, 2, 5)])
def test_glued_cycles_hypotheses(args):
    with pytest.raises(HypothesisViolation):
        glued_cycles_certificate(*args)


def test_corollary_bound():
    assert corollary_bound(3, 3).degree == 2
    assert corollary_bound(12, 12).degree == 8
    with pytest.raises(HypothesisViolation):
        corollary_bound(2, 3)


@pytest.mark.parametrize("degree", [1, 2, 3, 4])
def test_power_basis_on_every_subgroup(degree):
    for c in enumerate_covers(2, degree):
        g = cover_to_graph(c)
        result = power_basis_construction(g)
        assert result.valid, (c.perms, result.checks)
        assert len(result.basis) == degree + 1
        assert result.rewrite(Word((1,) * result.k, 2)).letters == (result.a_position + 1,)
        assert result.rewrite(Word((2,) * result.l, 2)).letters == (result.b_position + 1,)


def test_power_basis_of_kernel_cover(w):
    basis = power_basis(kernel_phi_cover(3))
    assert w("a^3") in basis
    assert w("b^3") in basis
    assert isomorphic(subgroup_graph(basis, 2), kernel_phi_cover(3))


def test_power_basis_needs_a_cover(w):
    with pytest.raises(GraphError):
        power_basis_construction(subgroup_graph([w("a b A")], 2))
