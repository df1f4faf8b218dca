"""
@file test_cli.py
@Description: Command line subcommands, output destinations and exit codes
"""
import json
import os
import sys

import pytest

current = os.path.dirname(os.path.realpath(__file__))
parent_directory = os.path.dirname(current)

sys.path.append(parent_directory)

from mg_secrecy import cli
from mg_secrecy.errors import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, EXIT_VALIDATION, NumericalError
from mg_secrecy.secrecy import SecrecyAnalyzer

RUN = """\
[main]
family = nakagami
m = 2

[eve]
family = nakagami
m = 2
avg_snr_db = 0

[constellation]
order = 4
target_rate = 1

[sweep]
points_db = 10, 20
outputs = asr, sop, mc
mc_metric = sop
"""


@pytest.fixture
def config(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text(RUN)
    return str(path)


def rows_of(text):
    return [line for line in text.splitlines() if line and not line.startswith("#")]


def test_asr_to_stdout(config, capsys):
    assert cli.main(["asr", "--config", config]) == EXIT_OK
    lines = rows_of(capsys.readouterr().out)
    assert lines[0] == "modulation,eve,snr_db,asr_bits,i_lim_bits,i_con_bits"
    assert len(lines) == 3


def test_sop_to_file(config, tmp_path):
    out = tmp_path / "sop.csv"
    assert cli.main(["sop", "--config", config, "--out", str(out)]) == EXIT_OK
    assert rows_of(out.read_text())[0] == "modulation,eve,snr_db,sop,limit_sop,p_con"


def test_sop_without_a_rate(tmp_path):
    path = tmp_path / "norate.ini"
    path.write_text(RUN.replace("target_rate = 1\n", "").replace("outputs = asr, sop, mc\nmc_metric = sop\n",
                                                                 "outputs = asr\n"))
    assert cli.main(["sop", "--config", str(path)]) == EXIT_CONFIG


def test_mc_json(config, tmp_path):
    out = tmp_path / "mc.json"
    assert cli.main(["mc", "--config", config, "--out", str(out), "--samples", "2000", "--seed", "0x2a",
                     "--format", "json"]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["columns"] == ["modulation", "eve", "snr_db", "mc_value", "mc_stderr"]
    assert doc["seed"] == 42 and doc["samples"] == 2000
    assert len(doc["rows"]) == 2


def test_asymptote_table(config, capsys):
    assert cli.main(["asymptote", "--config", config]) == EXIT_OK
    lines = rows_of(capsys.readouterr().out)
    assert lines[0] == "modulation,eve,g_d,i_lim_bits,g_a_asr,limit_sop,g_a_sop,h_m"
    assert lines[1].startswith("4-QAM,eve,2.0,")


def test_sweep_writes_every_requested_output(config, tmp_path):
    out = tmp_path / "sweep.csv"
    assert cli.main(["sweep", "--config", config, "--out", str(out), "--samples", "2000"]) == EXIT_OK
    header = rows_of(out.read_text())[0]
    assert header == "modulation,eve,snr_db,asr_bits,i_lim_bits,i_con_bits,sop,limit_sop,p_con,mc_value,mc_stderr"


def test_validate_pass_and_fail(config, tmp_path):
    out = tmp_path / "report.csv"
    assert cli.main(["validate", "--config", config, "--out", str(out), "--samples", "100000",
                     "--seed", "3"]) == EXIT_OK
    assert "# result: PASS" in out.read_text()

    bad = tmp_path / "bad.ini"
    bad.write_text(RUN.replace("mc_metric = sop", "mc_metric = sop\nmc_target_rate = 1.5"))
    assert cli.main(["validate", "--config", str(bad), "--out", str(out), "--samples", "100000"]) == EXIT_VALIDATION
    assert "# result: FAIL" in out.read_text()


def test_config_errors(tmp_path):
    assert cli.main(["asr", "--config", str(tmp_path / "missing.ini")]) == EXIT_CONFIG
    bad = tmp_path / "bad.ini"
    bad.write_text(RUN.replace("points_db = 10, 20", "points_db ="))
    assert cli.main(["asr", "--config", str(bad)]) == EXIT_CONFIG


def test_asymptote_of_a_custom_mixture(tmp_path):
    (tmp_path / "mix.ini").write_text("[mixture]\navg_snr_db = 0\ncomponents =\n    1.0, 1.0, 1.0\n")
    path = tmp_path / "custom.ini"
    path.write_text(RUN.replace("family = nakagami\nm = 2\n\n[eve]", "family = custom\nfile = mix.ini\n\n[eve]"))
    assert cli.main(["asymptote", "--config", str(path)]) == EXIT_CONFIG


def test_numerical_failure(config, monkeypatch):
    def broken(self, s):
        raise NumericalError("ASR is not finite (nan)")

    monkeypatch.setattr(SecrecyAnalyzer, "asr", broken)
    assert cli.main(["asr", "--config", config]) == EXIT_NUMERICAL


@pytest.mark.parametrize("argv", [
    ["asr"],
    ["plot", "--config", "run.ini"],
    ["mc", "--config", "run.ini", "--samples", "1"],
    ["mc", "--config", "run.ini", "--seed", "-1"],
    ["asr", "--config", "run.ini", "--format", "xml"],
])
def test_bad_arguments(argv):
    with pytest.raises(SystemExit) as info:
        cli.main(argv)
    assert info.value.code == 2
