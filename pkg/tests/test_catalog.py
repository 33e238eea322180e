import pytest

from homsym.catalog import REPRODUCTION_ROWS, ParameterDomainError, all_entries, catalog, identify_catalog, parse_type
from homsym.exact import to_scalar
from homsym.lie import jacobi_passes


def test_type_iii_entry():
    e = catalog("III")
    assert e.constants[1, 1, 3] == 1 and e.constants[1, 3, 1] == -1
    assert set(e.zero_pattern()) == {(1, 3), (2, 3)}


def test_vi_minus_one_pattern():
    e = catalog("VI", "-1")
    h = e.pattern.array
    assert h[0, 0] == h[1, 1] and h[0, 1] and not h[0, 2] and not h[1, 2]


@pytest.mark.parametrize("t,q", [("VI", "1"), ("VI", "0"), ("VII", "2"), ("VII", "-3"), ("II", "1"), ("VI", None)])
def test_parameter_domain(t, q):
    with pytest.raises(ParameterDomainError):
        catalog(t, q)


def test_type_names():
    assert parse_type("type ix") == "IX"
    with pytest.raises(ParameterDomainError):
        parse_type("X")


def test_all_catalog_sets_pass_jacobi():
    assert len(REPRODUCTION_ROWS) == 12
    for e in all_entries():
        assert jacobi_passes(e.constants), e.label


def test_symbolic_q_is_allowed():
    e = catalog("VI", "q")
    assert jacobi_passes(e.constants) and e.expected is None


def test_identify_roundtrip():
    for e in all_entries():
        assert identify_catalog(e.constants).label == e.label


def test_type_v_side_relation():
    e = catalog("V")
    assert len(e.pattern.side_relations) == 1
    rel = e.pattern.side_relations[0]
    K = e.pattern.domain
    assert rel == to_scalar("h33**2 - h11*h22 + h12**2", K) or -rel == to_scalar("h33**2 - h11*h22 + h12**2", K)
    assert e.free_count == 3
