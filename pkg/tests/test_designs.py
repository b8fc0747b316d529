from __future__ import annotations

import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from splitauth.algebra import AbelianGroup
from splitauth.constructions import catalog, latin_square_td
from splitauth.designs import (
    AmdCode,
    BaseBlocks,
    BibdParams,
    DesignError,
    Gdd,
    OrderedGdd,
    SchemaError,
    SourceDistribution,
    SplittingGdd,
    SplittingSystem,
    block_str,
    c_splitting_profile,
    dump,
    dumps,
    from_document,
    load,
    loads,
    to_document,
)

from helpers import random_small_system


def test_system_normalizes_parts():
    sys = SplittingSystem(4, [[[0, 1], [2]], [[3], [0]]])
    assert sys.b == 2 and sys.m == 2
    assert sys.blocks[0] == (frozenset({0, 1}), frozenset({2}))
    assert sys.replication() == [2, 1, 1, 1]


@pytest.mark.parametrize("v, blocks, fragment", [
    (3, [], "at least one block"),
    (3, [[[0, 1]]], "m >= 2"),
    (3, [[[0], [1]], [[0], [1], [2]]], "expected 2"),
    (3, [[[0], []]], "empty"),
    (3, [[[0, 1], [1, 2]]], "overlap"),
    (3, [[[0], [3]]], "out of range"),
])
def test_system_rejects_malformed(v, blocks, fragment):
    with pytest.raises(DesignError, match=fragment):
        SplittingSystem(v, blocks)


def test_repeated_blocks_and_profile():
    sys = SplittingSystem(3, [[[0], [1]], [[2], [0]], [[0], [1]]])
    assert sys.repeated_blocks() == [[0, 2]]
    assert c_splitting_profile(sys) == 1
    assert c_splitting_profile(SplittingSystem(3, [[[0, 1], [2]]])) is None


def test_bibd_params():
    p = BibdParams(25, 3, 2)
    assert p.r == 6 and p.b == 25 and p.admissible
    assert not BibdParams(13, 2, 2).admissible
    assert BibdParams.lambda_from(9, 9, 2, 2) == 1


def test_amd_code_validation():
    Z9 = AbelianGroup.cyclic(9)
    code = AmdCode(Z9, [[0, 1], [2, 4]])
    assert code.m == 2 and code.n == 9 and code.regularity() == 2
    assert AmdCode(Z9, [[0], [2, 4]]).regularity() is None
    with pytest.raises(DesignError, match="overlaps"):
        AmdCode(Z9, [[0, 1], [1, 4]])
    with pytest.raises(DesignError, match="empty"):
        AmdCode(Z9, [[0, 1], []])
    with pytest.raises(DesignError):
        AmdCode(AbelianGroup((3, 3)), [[0], [1]])


def test_source_distribution():
    d = SourceDistribution(("3/4", "1/4"))
    assert d[0] == Fraction(3, 4) and d.m == 2
    assert SourceDistribution.point_mass(3, 1).probs == (0, 1, 0)
    with pytest.raises(DesignError, match="sum"):
        SourceDistribution((Fraction(1, 2), Fraction(1, 3)))
    with pytest.raises(DesignError):
        SourceDistribution((Fraction(3, 2), Fraction(-1, 2)))


def test_gdd_validation_and_type():
    g = latin_square_td(3)
    assert g.type_string() == "3^3"
    assert g.replication() == [3] * 9
    with pytest.raises(DesignError, match="partition"):
        Gdd(4, [[0, 1], [2]], [], 2)
    with pytest.raises(DesignError, match="size"):
        Gdd(4, [[0, 1], [2, 3]], [(0, 2, 3)], 2)
    with pytest.raises(DesignError, match="repeats"):
        Gdd(4, [[0, 1], [2, 3]], [(0, 0)], 2)


def test_round_trip_every_catalog_entry():
    for name in ["five_point", "array9", "sbibd9", "amd_z9", "amd_z10", "z25_base", "sbibd25", "uniform2", "skew2"]:
        obj = catalog(name)
        assert loads(dumps(obj)) == obj, name


def test_round_trip_gdds(tmp_path):
    g = latin_square_td(4)
    og = OrderedGdd(g.n, g.design_groups, g.blocks, g.k)
    assert loads(dumps(g)) == g
    back = loads(dumps(og))
    assert isinstance(back, OrderedGdd) and back == og
    sg = SplittingGdd(4, 2, [[[0], [2]]], [[0, 1], [2, 3]])
    dump(sg, tmp_path / "sg.json")
    assert load(tmp_path / "sg.json") == sg


def test_amd_code_in_product_group_uses_coordinates():
    G = AbelianGroup((2, 2))
    code = AmdCode(G, [[(0, 1)], [(1, 0), (1, 1)]])
    doc = to_document(code)
    assert doc["encodings"] == [[[0, 1]], [[1, 0], [1, 1]]]
    assert from_document(doc) == code


def test_base_blocks_document():
    bb = BaseBlocks(AbelianGroup.cyclic(25), [[[0, 1], [2, 4], [12, 20]]])
    assert to_document(bb)["blocks"] == [[[0, 1], [2, 4], [12, 20]]]


@pytest.mark.parametrize("doc, path", [
    ({"kind": "splitting_system", "v": 3, "blocks": [[[0], [1]], [[0], "x"]]}, "$.blocks[1][1]"),
    ({"kind": "splitting_system", "blocks": []}, "$.v"),
    ({"kind": "splitting_system", "v": 3, "m": 3, "blocks": [[[0], [1]]]}, "$.m"),
    ({"kind": "amd_code", "group": [9], "sources": 3, "encodings": [[0], [1]]}, "$.sources"),
    ({"kind": "gdd", "points": 2, "design_groups": [[0], [1]], "k": 2, "blocks": [[0, 1.5]]}, "$.blocks[0][1]"),
    ({"kind": "source_distribution", "probs": ["1/2", "one half"]}, "$.probs[1]"),
    ({"kind": "mystery"}, "$.kind"),
    ([1, 2], "$"),
])
def test_schema_errors_carry_paths(doc, path):
    with pytest.raises(SchemaError) as info:
        from_document(doc)
    assert info.value.path == path


def test_invalid_json():
    with pytest.raises(SchemaError, match="invalid JSON"):
        loads("{not json")


def test_semantic_error_becomes_schema_error():
    text = json.dumps({"kind": "splitting_system", "v": 3, "blocks": [[[0, 1], [1]]]})
    with pytest.raises(SchemaError, match="overlap"):
        loads(text)


def test_block_str():
    assert block_str([[1, 0], [4, 2]]) == "({0,1}, {2,4})"


@settings(max_examples=60)
@given(st.integers(0, 2**32 - 1))
def test_random_system_round_trip(seed):
    sys = random_small_system(random.Random(seed), v_max=12)
    assert loads(dumps(sys)) == sys
