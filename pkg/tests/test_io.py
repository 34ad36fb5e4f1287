import json
from fractions import Fraction

import pytest

from entropylab.errors import DescriptionError
from entropylab.io import describe, dumps, load_description, parse_map, to_csv
from entropylab.maps import PolynomialMap, StuntedParams


def test_parse_stunted():
    p = parse_map('{"kind": "stunted", "d": 2, "zeta": ["1/2", 0.25]}')
    assert isinstance(p, StuntedParams)
    assert p.zeta == (Fraction(1, 2), Fraction(1, 4))
    assert parse_map(describe(p)) == p


def test_parse_polynomial_and_family(tmp_path):
    f = parse_map({"kind": "polynomial", "coeffs": [0, 4, -4], "domain": [0, 1]})
    assert isinstance(f, PolynomialMap) and f.d == 1
    path = tmp_path / "map.json"
    path.write_text(json.dumps({"kind": "family", "name": "logistic", "params": {"lambda": 3}}))
    g = parse_map(str(path))
    assert g.coefficients == (0.0, 3.0, -3.0)
    assert parse_map(describe(g)).coefficients == g.coefficients


@pytest.mark.parametrize("bad", [
    "{not json", "[1, 2]", '{"kind": "other"}', '{"kind": "stunted", "d": 1}',
    '{"kind": "stunted", "d": 1, "zeta": ["9"]}', '{"kind": "stunted", "d": "1", "zeta": [0]}',
    '{"kind": "polynomial", "coeffs": [0, 1], "domain": [0, 1]}',
    '{"kind": "family", "name": "logistic", "params": {"lambda": 7}}',
    '{"kind": "family", "name": "nope"}',
])
def test_bad_descriptions(bad):
    with pytest.raises(DescriptionError):
        parse_map(bad)


def test_load_description_passthrough():
    d = {"kind": "stunted"}
    assert load_description(d) is d


def test_dumps():
    text = dumps({"a": 0.1, "b": Fraction(3, 4), "c": [1, None, True], "d": float("inf")})
    data = json.loads(text)
    assert data == {"a": 0.1, "b": "3/4", "c": [1, None, True], "d": None}
    assert "0.10000000000000001" in text


def test_csv():
    text = to_csv(("x", "y", "note"), [(Fraction(1, 3), 0.5, ""), (2, None, "err")])
    assert text.splitlines() == ["x,y,note", "1/3,0.5,", "2,,err"]
