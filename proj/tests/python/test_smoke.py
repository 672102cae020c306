import json
import math
import os
import pathlib

import pytest

import lipent

CONFIGS = pathlib.Path(os.environ.get("LIPENT_CONFIG_DIR", pathlib.Path(__file__).parents[2] / "configs"))

CIRCLE8 = {"generator": "circle", "count": 8, "circumference": 8}
TINY = {"d": 1, "d_c": 1, "kappa": 1, "depth": 1, "activation": "relu"}


def test_version():
    assert lipent.__version__ == "0.1.0"


def test_code_length_on_circle():
    r = lipent.code_length(CIRCLE8, 1.0)
    assert r["covering"] == 3
    assert r["bits"] == 2
    assert math.isclose(r["entropy"], math.log2(3))
    assert r["sandwich_holds"]
    assert r["packing_3eps"] <= r["covering"] <= r["packing"]


def test_hat_family_certificate():
    r = lipent.hat_family(CIRCLE8, 1 / 6)
    assert r["ok"]
    assert r["min_pair_distance"] >= 0.5 - 1e-12


def test_gv_and_bump():
    code = lipent.gilbert_varshamov(16)
    assert len(code["words"]) >= math.ceil(math.exp(2))
    bump = lipent.bump_family(1, 2, 8)
    assert bump["ok"]
    assert math.isclose(bump["min_pair_l1"], 0.09375)


def test_isometry_constant():
    measure = {"lambda": "j^-2a", "alpha": 1, "J": 4, "law": "gaussian"}
    r = lipent.isometry_check([0.5] * 5, 1, 4, measure, 2.0, 1000, 1)
    assert math.isclose(r["lhs"], 0.25)
    assert math.isclose(r["rhs"], 0.25)


def test_fno_roundtrip():
    assert lipent.param_count(TINY) == {"q": 6, "bound": 10, "lower_ok": True, "upper_ok": True}
    assert lipent.param_length(TINY) == 6
    theta = [0.5, 0.1, -0.2, 0.7, 0.05, 1.0]
    u = [0.1, 0.5, -0.3, 0.9]
    y = lipent.forward(TINY, theta, u, 4)
    wide = dict(TINY, d_c=2, kappa=2)
    padded = lipent.zero_pad_embed(TINY, theta, wide)
    assert len(padded) == lipent.param_length(wide)
    assert lipent.forward(wide, padded, u, 4) == pytest.approx(y, rel=1e-12, abs=1e-15)


def test_quantize_and_bounds():
    assert lipent.quantize([0.07, 0.05, -1.0], 1.0, 0.1) == pytest.approx([0.1, 0.0, -1.0])
    assert lipent.theoretical_lip_bound_log2(1, 1, 1, 1, 1.0) == pytest.approx(math.log2(3) + 3.5)
    b = lipent.bit_budget_asymptotic(8)
    assert b["depth_bits"] == 3
    assert -2 <= b["scaled"] <= 2


def test_errors_are_typed():
    with pytest.raises(lipent.LipentError, match="OutOfRange"):
        lipent.quantize([1.5], 1.0, 0.1)
    with pytest.raises(lipent.LipentError):
        lipent.param_count({"d": 1, "colour": 3})


def test_run_experiment_is_deterministic():
    config = json.loads((CONFIGS / "chain_uniform_circle8.json").read_text())
    csv1, meta1, ok1 = lipent.run_experiment(config)
    csv2, meta2, ok2 = lipent.run_experiment(config)
    assert ok1 and ok2
    assert csv1 == csv2
    assert csv1.startswith("eps,")
