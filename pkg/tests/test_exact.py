from fractions import Fraction

import pytest

from kleinpair.exact import (ExactMatrix, InconsistentSystem, canonicalize, format_scalar, parse_scalar,
                             rank, solve_linear, zeta)


def test_zeta4_squared_is_minus_one():
    assert zeta(4) ** 2 == -1
    assert isinstance(canonicalize(zeta(4) ** 2), Fraction)


def test_sum_of_primitive_cube_roots():
    assert zeta(3) + zeta(3) ** 2 == -1


def test_zeta6_minimal_polynomial():
    z = zeta(6)
    assert z * z - z + 1 == 0


def test_field_operations_round_trip():
    z = zeta(8) + Fraction(1, 3) * zeta(5)
    assert (z / z) == 1
    assert z * z.inverse() == 1
    assert parse_scalar(format_scalar(z)) == z


def test_solve_identity():
    sol = solve_linear(ExactMatrix.identity(2), [1, zeta(4)])
    assert list(sol.particular) == [1, zeta(4)]
    assert sol.kernel == ()


def test_solve_zero_kernel():
    sol = solve_linear([[0, 0], [0, 0]], [0, 0])
    assert len(sol.kernel) == 2


def test_solve_inconsistent():
    with pytest.raises(InconsistentSystem):
        solve_linear([[1, 1], [2, 2]], [1, 3])


def test_rank():
    assert rank([[1, 2], [2, 4], [0, zeta(3)]]) == 2
