import json
import math

import numpy as np
import pytest

from spinforge.params import TWO_PI, DeviceParams, default_params

MHZ = TWO_PI * 1e6
GHZ = TWO_PI * 1e9


def test_default_values_match_reference_device():
    p = default_params()
    assert p.j / MHZ == pytest.approx(19.7, rel=1e-12)
    assert p.delta_ez / MHZ == pytest.approx(214.0, rel=1e-12)
    assert p.ez1 / MHZ == pytest.approx(29.23, rel=1e-12)
    assert p.delta_ez1 / MHZ == pytest.approx(-46.94, rel=1e-12)
    assert p.bz_ext / GHZ == pytest.approx(14.0, rel=1e-12)
    assert p.by_l0 / MHZ == pytest.approx(5.0, rel=1e-12)
    assert p.by_r0 / MHZ == pytest.approx(55.0, rel=1e-12)
    assert p.phi == pytest.approx(3 * math.pi / 2, abs=0)


def test_derived_fields():
    p = default_params()
    # bz_r0 = bz_l0 + delta_ez by definition of the splitting
    assert p.bz_r0 / GHZ == pytest.approx(4.501, rel=1e-12)
    # mean Zeeman splitting evaluated from the defaults
    assert p.ez / GHZ == pytest.approx(18.394, rel=1e-12)
    assert p.zeeman_gap / MHZ == pytest.approx(214.0 - 46.94, rel=1e-12)


def test_cyclic_round_trip_is_machine_precision():
    vals = dict(bz_ext=14e9, delta_ez=214e6, bz_l0=4.287e9, by_l0=5e6,
                by_r0=55e6, j=19.7e6, ez1=29.23e6, delta_ez1=-46.94e6)
    p = DeviceParams.from_cyclic(**vals)
    for k, v in vals.items():
        assert getattr(p, k) / TWO_PI == pytest.approx(v, rel=1e-15)


def test_json_round_trip(tmp_path):
    p = default_params()
    f = tmp_path / "params.json"
    p.save(f)
    q = DeviceParams.load(f)
    assert q == p
    # keys are flat and in MHz
    d = json.loads(f.read_text())
    assert d["j"] == pytest.approx(19.7)
    assert d["bz_ext"] == pytest.approx(14e3)


def test_from_dict_missing_key():
    with pytest.raises(ValueError, match="missing"):
        DeviceParams.from_dict({"j": 19.7})


def test_invalid_params_rejected():
    with pytest.raises(ValueError):
        default_params().replace(j=0.0)
    with pytest.raises(ValueError):
        default_params().replace(delta_ez1=-TWO_PI * 300e6)


def test_strong_exchange_warns():
    with pytest.warns(UserWarning, match="weak-exchange"):
        default_params().replace(j=TWO_PI * 60e6)
