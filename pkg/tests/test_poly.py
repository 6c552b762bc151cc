import pytest

from kleinpair.poly import (NotDivisible, RingSpec, buchberger, exact_divide, normal_form, parse_poly,
                            quotient_basis, quotient_dimension_oracle, verify_groebner)

R222 = RingSpec(("x", "y", "z"), (2, 2, 2))
R233 = RingSpec(("x", "y", "z"), (2, 3, 3))


def P(R, s):
    x, y, z = R.gens()
    return eval(s.replace("^", "**"), {"x": x, "y": y, "z": z}) * R.one()


def test_principal_ideal_of_variable():
    G = buchberger([P(R222, "x")])
    assert [str(g) for g in G.generators] == [str(P(R222, "x"))]
    assert normal_form(P(R222, "x^2"), G).is_zero()


def test_groebner_against_rank_oracle():
    gens = [P(R222, "x^2 - y*z"), P(R222, "x")]
    G = buchberger(gens)
    assert verify_groebner(G)
    from kleinpair.poly import standard_monomials
    for d in range(0, 13, 2):
        assert len(standard_monomials(G, d)) == quotient_dimension_oracle(gens, d)


def test_jacobian_of_x3_plus_yz():
    f = P(R233, "x^3 + y*z")
    G = buchberger([f.diff(i) for i in range(3)])
    assert sorted(str(g) for g in G.generators) == sorted(str(P(R233, s)) for s in ("x^2", "y", "z"))
    assert normal_form(P(R233, "x^3"), G).is_zero()
    assert normal_form(P(R233, "x"), G) == P(R233, "x")


def test_exact_division():
    a, b = P(R222, "x^2 - y*z"), P(R222, "x^2 + y*z")
    assert exact_divide(a * b, a) == b
    assert exact_divide(R222.zero(), a).is_zero()
    with pytest.raises(NotDivisible):
        exact_divide(P(R222, "x"), P(R222, "y"))


@pytest.mark.parametrize("n", range(2, 7))
def test_milnor_basis_of_an(n):
    R = RingSpec(("x", "y", "z"), (2, n, n))
    f = P(R, f"x^{n} + y*z")
    basis = quotient_basis(buchberger([f.diff(i) for i in range(3)]))
    assert basis == [(k, 0, 0) for k in range(n - 1)]


def test_infinite_quotient():
    assert quotient_basis(buchberger([P(R222, "y"), P(R222, "z")])) == "infinite"


def test_parse_format_round_trip():
    from fractions import Fraction
    x, y, z = R233.gens()
    p = Fraction(3, 2) * x**2 * y - z**2 + 7
    assert parse_poly(R233, str(p)) == p
