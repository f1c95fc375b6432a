import pytest

from embedscan.tolerances import ENV_VAR, ToleranceConfig, resolve_tolerance


def test_defaults():
    tol = ToleranceConfig()
    assert tol.row_sum_tol == 1e-10
    assert tol.nonneg_tol == 1e-9
    assert tol.eig_distinct_rel_tol == 1e-8
    assert tol.defect_rank_tol == 1e-9
    assert tol.reconstruct_tol == 1e-8


@pytest.mark.parametrize("kwargs", [
    {"row_sum_tol": 0.0},
    {"nonneg_tol": -1e-9},
    {"row_sum_tol": 1e-6, "nonneg_tol": 1e-9},
])
def test_invalid_bundles_rejected(kwargs):
    with pytest.raises(ValueError):
        ToleranceConfig(**kwargs)


def test_parse_scalar_sets_entry_tolerances():
    tol = ToleranceConfig.parse("1e-7")
    assert tol.row_sum_tol == tol.nonneg_tol == 1e-7
    assert tol.reconstruct_tol == 1e-8


def test_parse_json_overrides_named_fields():
    tol = ToleranceConfig.parse('{"reconstruct_tol": 1e-6}')
    assert tol.reconstruct_tol == 1e-6
    assert tol.nonneg_tol == 1e-9


def test_parse_unknown_field():
    with pytest.raises(ValueError):
        ToleranceConfig.parse('{"bogus": 1}')


def test_dict_round_trip():
    tol = ToleranceConfig(nonneg_tol=2e-9)
    assert ToleranceConfig.from_dict(tol.to_dict()) == tol


def test_precedence_flag_env_default():
    env = {ENV_VAR: "1e-7"}
    assert resolve_tolerance("1e-6", env).nonneg_tol == 1e-6
    assert resolve_tolerance(None, env).nonneg_tol == 1e-7
    assert resolve_tolerance(None, {}) == ToleranceConfig()
