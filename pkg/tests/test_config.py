"""
@file test_config.py
@Description: Parsing and validation of INI run configurations
"""
import glob
import os
import sys

import pytest

current = os.path.dirname(os.path.realpath(__file__))
parent_directory = os.path.dirname(current)

sys.path.append(parent_directory)

from mg_secrecy.config import load_config
from mg_secrecy.errors import ConfigError
from mg_secrecy.fading import FadingFamily
from mg_secrecy.sweep import SweepSpec

RECIPES = sorted(glob.glob(os.path.join(parent_directory, "dev", "recipes", "*.ini")))

BASE = """\
[main]
family = nakagami
m = 2

[eve]
family = nakagami
m = 2
avg_snr_db = 0

[constellation]
orders = 4, 16
target_rate = 1

[sweep]
points_db = 0, 10, 20
outputs = asr, sop

[precision]
laguerre_order = 40
"""


def write(tmp_path, text, name="run.ini"):
    path = tmp_path / name
    path.write_text(text)
    return path


def line_of(text, fragment):
    for i, line in enumerate(text.splitlines(), 1):
        if line.startswith(fragment):
            return i
    raise AssertionError(fragment)


def test_valid_configuration(tmp_path):
    config = load_config(write(tmp_path, BASE))
    assert config.main.family is FadingFamily.NAKAGAMI
    assert list(config.eves) == ["eve"]
    assert config.constellation.orders == [4, 16]
    assert config.constellation.target_rate == 1.0
    assert config.sweep.points_db == [0.0, 10.0, 20.0]
    assert config.precision.laguerre_order == 40
    assert config.precision.hermite_order == 20
    assert config.needs_rate()

    s = config.scenario(16, "eve")
    assert s.constellation.order == 16
    assert s.laguerre_order == 40
    assert s.main.avg_snr == 1.0
    assert s.eve.params == {"m": 2.0}


def test_range_of_points(tmp_path):
    text = BASE.replace("points_db = 0, 10, 20", "start_db = 0\nstop_db = 40\nstep_db = 5")
    config = load_config(write(tmp_path, text))
    assert config.sweep.points_db == [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0]


def test_single_order_and_several_eavesdroppers(tmp_path):
    text = BASE.replace("orders = 4, 16", "order = 64").replace(
        "[eve]\n", "[eve.near]\nfamily = hoyt\nq = 0.5\navg_snr_db = 5\n\n[eve.far]\n")
    config = load_config(write(tmp_path, text))
    assert config.constellation.orders == [64]
    assert list(config.eves) == ["near", "far"]
    spec = SweepSpec.from_config(config)
    assert [(g.modulation, g.eve) for g in spec.groups] == [("64-QAM", "near"), ("64-QAM", "far")]
    assert spec.header["eve"]["near"]["family"] == "hoyt"


def test_custom_mixture_file(tmp_path):
    write(tmp_path, "[mixture]\navg_snr_db = 0\ncomponents =\n    1.0, 1.0, 1.0\n", "rayleigh.ini")
    text = BASE.replace("family = nakagami\nm = 2\n\n[eve]", "family = custom\nfile = rayleigh.ini\navg_snr_db = 10\n\n[eve]")
    config = load_config(write(tmp_path, text))
    s = config.scenario(4, "eve")
    assert s.main.family is FadingFamily.CUSTOM
    assert s.main.avg_snr == pytest.approx(10.0)
    assert s.main.zeta[0] == pytest.approx(0.1)


@pytest.mark.parametrize("old,new,anchor,fragment", [
    ("points_db = 0, 10, 20", "points_db =", "points_db", "[sweep] points_db"),
    ("points_db = 0, 10, 20", "points_db = 0, 20, 10", "points_db", "strictly increasing"),
    ("points_db = 0, 10, 20", "points_db = 0, ten", "points_db", "[sweep] points_db"),
    ("outputs = asr, sop", "outputs = asr, ber", "outputs", "[sweep] outputs"),
    ("orders = 4, 16", "orders = 4, 8", "orders", "[constellation] orders"),
    ("orders = 4, 16", "order = 32", "order", "[constellation] order"),
    ("laguerre_order = 40", "hermite_order = 0", "hermite_order", "[precision] hermite_order"),
    ("laguerre_order = 40", "bisection_tol = -1", "bisection_tol", "[precision] bisection_tol"),
    ("family = nakagami\nm = 2\n\n[eve]", "family = rician\nm = 2\n\n[eve]", "family = rician", "[main] family"),
    ("m = 2\n\n[eve]", "m = 2\ncolor = red\n\n[eve]", "color", "[main] color"),
    ("m = 2\n\n[eve]", "q = 0.5\n\n[eve]", "[main]", "needs key(s) m"),
    ("target_rate = 1\n", "", "[constellation]", "target_rate"),
    ("[precision]", "[plot]", "[plot]", "unknown section"),
])
def test_errors_point_at_the_offending_line(tmp_path, old, new, anchor, fragment):
    text = BASE.replace(old, new, 1)
    assert text != BASE
    path = write(tmp_path, text)
    with pytest.raises(ConfigError) as info:
        load_config(path)
    message = str(info.value)
    assert message.startswith("{}:{}:".format(path, line_of(text, anchor))), message
    assert fragment in message


@pytest.mark.parametrize("old,new", [
    ("[eve]\nfamily = nakagami\nm = 2\navg_snr_db = 0\n", ""),
    ("[sweep]\npoints_db = 0, 10, 20\noutputs = asr, sop\n", ""),
    ("orders = 4, 16", "orders = 4, 16\norder = 64"),
    ("points_db = 0, 10, 20", "start_db = 0\nstop_db = 10"),
    ("points_db = 0, 10, 20", "start_db = 10\nstop_db = 0\nstep_db = 1"),
])
def test_structural_errors(tmp_path, old, new):
    text = BASE.replace(old, new, 1)
    assert text != BASE
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, text))


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nothing.ini")


def test_bad_family_parameter_reported_when_building(tmp_path):
    config = load_config(write(tmp_path, BASE.replace("m = 2\n\n[eve]", "m = 0.3\n\n[eve]")))
    with pytest.raises(ConfigError) as info:
        config.scenario(4, "eve")
    assert "Nakagami m" in str(info.value)


def test_rate_not_needed_for_rate_outputs_absent(tmp_path):
    text = BASE.replace("target_rate = 1\n", "").replace("outputs = asr, sop", "outputs = asr, i_lim")
    config = load_config(write(tmp_path, text))
    assert not config.needs_rate()
    assert config.constellation.target_rate is None


@pytest.mark.parametrize("recipe", RECIPES, ids=os.path.basename)
def test_shipped_recipes_load(recipe):
    config = load_config(recipe)
    spec = SweepSpec.from_config(config)
    assert spec.groups and spec.points_db
    assert spec.columns()[:3] == ["modulation", "eve", "snr_db"]
