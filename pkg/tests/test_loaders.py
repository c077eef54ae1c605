import json

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from src.config import DEFAULT_SEED, RESULTS_DIR, RunConfig
from src.errors import ConfigParse, DimensionMismatch
from src.frames import frame_bounds
from src.verification.loaders.file_loader import (
    ConfigFileLoader,
    FamilyFileLoader,
    coerce_value,
    emit_config,
    parse_config,
)

names = st.from_regex(r"[a-z][a-z_]{0,8}", fullmatch=True)
param_values = st.one_of(
    st.integers(min_value=-1000, max_value=1000),
    st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False),
    st.sampled_from(["one", "inv_x", "smooth", "linear", "const"]),
)
grids = st.lists(st.floats(min_value=0.0, max_value=4.0, allow_nan=False), max_size=5).map(tuple)

configs = st.builds(
    RunConfig,
    case=st.one_of(st.none(), st.sampled_from(["exp", "rkhs", "diagonal"])),
    params=st.dictionaries(names, param_values, max_size=4),
    family=st.one_of(st.none(), st.sampled_from(["evaluation/families/two_vectors.json", "runs/#2/pair.json"])),
    levels=st.one_of(st.none(), st.integers(min_value=1, max_value=8)),
    k_grid=grids,
    m_grid=grids,
    fn_pairs=st.lists(st.tuples(st.sampled_from(["one", "sqrt", "t"]), st.sampled_from(["one", "sqrt"])), max_size=3).map(tuple),
    seed=st.integers(min_value=0, max_value=2 ** 31),
    output_dir=st.sampled_from([RESULTS_DIR, "out", "/tmp/semiframe", "runs/#1", " padded "]),
)


@seed(31)
@settings(max_examples=60, deadline=None)
@given(config=configs)
def test_config_round_trip(config):
    assert parse_config(emit_config(config)) == config


def test_parse_example():
    config = parse_config(
        "# weighted exponentials\n"
        "case = exp\n"
        "param.g = inv_x\n"
        "param.b = 0.5\n"
        "levels = 5   # five refinements\n"
        "k_grid = 0, 0.5, 1\n"
        "fn_pairs = sqrt:one, t:sqrt\n"
    )
    assert config.case == "exp"
    assert config.params == {"g": "inv_x", "b": 0.5}
    assert config.levels == 5
    assert config.k_grid == (0.0, 0.5, 1.0)
    assert config.fn_pairs == (("sqrt", "one"), ("t", "sqrt"))
    assert config.seed == DEFAULT_SEED


@pytest.mark.parametrize("text, fragment", [
    ("case = exp\nlevels = many\n", "line 2"),
    ("case = exp\ncase = rkhs\n", "Duplicate key 'case' at line 2"),
    ("colour = red\n", "unknown key"),
    ("this is not a pair\n", "Invalid syntax at line 1"),
    ("fn_pairs = sqrt\n", "g:h"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(ConfigParse, match=fragment):
        parse_config(text)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigParse, match="not found"):
        ConfigFileLoader(str(tmp_path / "missing.cfg")).load()


def test_coerce_value():
    assert coerce_value(" 3 ") == 3
    assert coerce_value("0.25") == 0.25
    assert coerce_value("inv_x") == "inv_x"


def test_family_file(two_vectors_file):
    family = FamilyFileLoader(str(two_vectors_file)).load()
    assert family.dim == 2 and family.size == 2
    bounds = frame_bounds(family)
    assert (bounds.lower, bounds.upper) == (pytest.approx(2.0), pytest.approx(2.0))


def test_family_file_with_domain(tmp_path):
    path = tmp_path / "domain.json"
    path.write_text(json.dumps({
        "dim": 2,
        "vectors": [[[1.0, 0.0], [0.0, 1.0]]],
        "domain": [[[0.0, 0.0], [1.0, 0.0]]],
    }))
    family = FamilyFileLoader(str(path)).load()
    np.testing.assert_allclose(family.vectors, [[1.0, 1j]])
    assert family.domain is not None
    np.testing.assert_allclose(family.grid.weights, [1.0])


@pytest.mark.parametrize("content, fragment", [
    ("{not json", "not valid JSON"),
    (json.dumps({"vectors": []}), "missing field"),
    (json.dumps({"dim": 2, "vectors": [[[1.0], [0.0, 1.0]]]}), "malformed"),
])
def test_family_file_errors(tmp_path, content, fragment):
    path = tmp_path / "bad.json"
    path.write_text(content)
    with pytest.raises(ConfigParse, match=fragment):
        FamilyFileLoader(str(path)).load()


def test_family_file_dimension_mismatch(tmp_path):
    path = tmp_path / "short.json"
    path.write_text(json.dumps({"dim": 2, "vectors": [[[1.0, 0.0]]]}))
    with pytest.raises(DimensionMismatch, match="expected 2"):
        FamilyFileLoader(str(path)).load()


def test_hash_in_paths_survives_emit():
    config = RunConfig(family="a # b.json", output_dir="runs/#1", params={"label": "x#y", "g": "one"})
    text = emit_config(config)
    assert 'output_dir = "runs/#1"' in text
    assert parse_config(text) == config


def test_numeric_looking_string_stays_string():
    config = RunConfig(params={"tag": "3", "b": 3})
    parsed = parse_config(emit_config(config))
    assert parsed.params == {"tag": "3", "b": 3}


def test_comment_after_quoted_value():
    config = parse_config('output_dir = "out#1"  # trailing note\nparam.g = one # symbol\n')
    assert config.output_dir == "out#1"
    assert config.params == {"g": "one"}


def test_bad_quoted_value():
    with pytest.raises(ConfigParse):
        parse_config('case = "exp\\q"\n')
