from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from builders import (
    BUILDERS,
    diag_matrix,
    dual,
    field_algebra,
    fixture_morphisms,
    mat2,
    sign_action,
    upper_triangular,
)
from defcomplex.algebra import (
    Algebra,
    EquivariantMorphism,
    GroupClosureError,
    check_action,
    check_associativity,
    check_bimodule,
    check_morphism,
    close_actions,
    close_group,
    identity_morphism,
    induced_bimodule,
    trivial_action,
)
from defcomplex.linalg import GF, QQ, Matrix


def broken_dual():
    """1.1 = 1, 1.x = x, x.x = 1 but x.1 = 0: not associative."""
    return Algebra.from_triples(QQ, 2, [(0, 0, 0, 1), (0, 1, 1, 1), (1, 1, 0, 1)], ["1", "x"])


@pytest.mark.parametrize("name", sorted(BUILDERS))
def test_fixture_algebras_are_associative(name):
    assert check_associativity(BUILDERS[name]()).passed


def test_altered_dual_is_still_associative():
    # setting x.x = 1 in DUAL gives k[x]/(x^2 - 1), which is associative
    a = Algebra.from_triples(QQ, 2, [(0, 0, 0, 1), (0, 1, 1, 1), (1, 0, 1, 1), (1, 1, 0, 1)])
    assert check_associativity(a).passed


def test_broken_algebra_reports_violation():
    report = check_associativity(broken_dual())
    assert not report.passed
    i, j, k, l = report.violations[0]
    a = broken_dual()
    lhs = a.multiply(a.multiply(a.basis_vector(i), a.basis_vector(j)), a.basis_vector(k))
    rhs = a.multiply(a.basis_vector(i), a.multiply(a.basis_vector(j), a.basis_vector(k)))
    assert lhs[l] != rhs[l]


def test_structure_index_out_of_range():
    with pytest.raises(IndexError):
        Algebra.from_triples(QQ, 2, [(0, 0, 2, 1)])


def test_find_unit():
    assert dual().find_unit() == (1, 0)
    assert mat2().find_unit() == (1, 0, 0, 1)
    assert Algebra.from_triples(QQ, 1, []).find_unit() is None


@pytest.mark.parametrize("name", sorted(BUILDERS))
def test_algebra_is_a_bimodule_over_itself(name):
    a = BUILDERS[name]()
    assert check_bimodule(a, a.as_bimodule()).passed


# -- groups ----------------------------------------------------------------


def test_identity_generator_gives_trivial_group():
    a = dual()
    assert close_group(a, [Matrix.identity(QQ, 2)]).order == 1


def test_sign_action_has_order_two():
    _, g = sign_action("dual")
    assert g.order == 2 and check_action(g).passed


def test_unbounded_generator_exceeds_cap():
    with pytest.raises(GroupClosureError, match="closure exceeds cap"):
        close_group(dual(), [diag_matrix(QQ, [1, 2])], cap=16)


def test_singular_generator():
    with pytest.raises(GroupClosureError, match="generator not invertible"):
        close_group(dual(), [diag_matrix(QQ, [1, 0])])


def test_shift_is_not_multiplicative():
    # over F_2 the shift x -> x + 1 has order 2, so closure succeeds and the product check fires
    F = GF(2)
    with pytest.raises(GroupClosureError, match="violates multiplicativity"):
        close_group(dual(F), [Matrix.from_rows(F, [[1, 1], [0, 1]])])


def test_shift_over_rationals_never_closes():
    with pytest.raises(GroupClosureError, match="closure exceeds cap"):
        close_group(dual(), [Matrix.from_rows(QQ, [[1, 1], [0, 1]])], cap=8)


def test_check_action_flags_shift():
    from defcomplex.algebra import GroupAction

    F = GF(2)
    m = Matrix.from_rows(F, [[1, 1], [0, 1]])
    ga = GroupAction(dual(F), (Matrix.identity(F, 2), m), 0, ((0, 1), (1, 0)), (1,))
    kinds = {v[0] for v in check_action(ga).violations}
    assert kinds == {"multiplicativity"}


@pytest.mark.parametrize("name", sorted(BUILDERS))
def test_trivial_action_passes(name):
    assert check_action(trivial_action(BUILDERS[name]())).passed


def test_group_elements_closed_under_inverse():
    _, g = sign_action("mat2")
    for i in range(g.order):
        j = g.inverse_index(i)
        assert g.elements[i] @ g.elements[j] == Matrix.identity(QQ, 4)


def test_joint_closure_aligns_elements():
    k, d = field_algebra(), dual()
    ak, ad = close_actions([(k, [Matrix.identity(QQ, 1)]), (d, [diag_matrix(QQ, [1, -1])])])
    assert ak.mult_table == ad.mult_table and ak.order == ad.order == 2


# -- morphisms -------------------------------------------------------------


@pytest.mark.parametrize("sign", [True, False])
def test_fixture_morphisms_pass(sign):
    for name, phi in fixture_morphisms(with_sign=sign).items():
        assert check_morphism(phi).passed, name


def test_x_to_one_is_not_multiplicative():
    phi = EquivariantMorphism(dual(), dual(), Matrix.from_rows(QQ, [[1, 1], [0, 0]]))
    assert ("multiplicativity", 1, 1) in check_morphism(phi).violations


def test_non_equivariant_morphism():
    # E12 -> x is multiplicative, but the group fixes E12 while negating x
    d, t = dual(), upper_triangular()
    at, ad = close_actions([(t, [diag_matrix(QQ, [1, 1, 1])]), (d, [diag_matrix(QQ, [1, -1])])])
    phi = EquivariantMorphism(t, d, Matrix.from_rows(QQ, [[1, 0, 1], [0, 1, 0]]), at, ad)
    assert ("equivariance", 1) in check_morphism(phi).violations


def test_mismatched_groups_rejected():
    d = dual()
    with pytest.raises(ValueError):
        EquivariantMorphism(d, d, Matrix.identity(QQ, 2), close_group(d, [diag_matrix(QQ, [1, -1])]), trivial_action(d))


def test_induced_bimodule_examples():
    ms = fixture_morphisms()
    assert induced_bimodule(identity_morphism(dual())) == dual().as_bimodule()
    proj = induced_bimodule(ms["proj_dual_k"])
    assert proj.act_left((0, 1), (1,)) == (0,) and proj.act_right((1,), (0, 1)) == (0,)
    incl = induced_bimodule(ms["incl_k_dual"])
    assert incl.act_left((1,), (3, 5)) == (3, 5)


@pytest.mark.parametrize("sign", [True, False])
def test_induced_bimodules_are_bimodules(sign):
    for name, phi in fixture_morphisms(with_sign=sign).items():
        assert check_bimodule(phi.source, induced_bimodule(phi)).passed, name


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=8, max_size=8))
def test_associativity_check_agrees_with_direct_products(vals):
    tensor = [[[vals[(i * 2 + j) * 2 + k] for k in range(2)] for j in range(2)] for i in range(2)]
    a = Algebra.from_tensor(QQ, tensor)
    direct = all(
        a.multiply(a.multiply(a.basis_vector(i), a.basis_vector(j)), a.basis_vector(k))
        == a.multiply(a.basis_vector(i), a.multiply(a.basis_vector(j), a.basis_vector(k)))
        for i, j, k in product(range(2), repeat=3)
    )
    assert check_associativity(a).passed == direct
