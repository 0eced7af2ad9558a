import json
import subprocess
import sys
import xml.etree.ElementTree as ET
from fractions import Fraction

import pytest

from markov_slopes import cli
from markov_slopes.arith import UndecidedAtCap
from markov_slopes.fock import sigma_minus
from markov_slopes.markov import MarkovCache


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, (json.loads(out.out) if code == 0 else None), out.err


def test_markov_number(capsys):
    code, doc, _ = run(capsys, "markov", "2/5")
    assert code == 0
    assert doc["results"]["markov_number"] == "194"
    assert doc["command"] == ["markov-slopes", "markov", "2/5"]
    assert doc["timing"]["seconds"] >= 0


def test_markov_distance(capsys):
    _, doc, _ = run(capsys, "markov", "--pair", "2", "0")
    assert doc["results"]["markov_distance"] == "7/3"


def test_sigma_digits(capsys):
    _, doc, _ = run(capsys, "sigma", "--digits", "4")
    assert doc["results"]["sigma_minus"] == "-1.2417"
    assert doc["results"]["sigma_plus"] == "-1.1432"


def test_scan_line(capsys):
    _, doc, _ = run(capsys, "scan-line", "--slope", "-1", "--through", "4,3", "--bound", "10")
    res = doc["results"]
    assert res["classification"] == "Increasing"
    assert res["distances"] == ["169", "194", "233", "281"]


def test_negative_fractional_slope(capsys):
    code, doc, _ = run(capsys, "find-antimodal", "--slope", "-7/6", "--kmax", "20", "--limit", "1")
    assert code == 0
    assert doc["results"]["witnesses"][0]["through"] == [17, 16]


def test_psi_and_slopes(capsys):
    _, doc, _ = run(capsys, "--prec", "200", "psi", "1/3", "--deriv", "right")
    enc = cli.enclosure_from_json(doc["results"]["derivative"])
    assert enc.precision_bits == 200 and enc.certainly_negative()
    _, doc, _ = run(capsys, "slopes", "1", "0")
    assert doc["results"]["mu_minus"] is None
    assert cli.enclosure_from_json(doc["results"]["mu_plus"]).overlaps(sigma_minus())


def test_enclosures_round_trip(capsys):
    _, doc, _ = run(capsys, "slopes", "5", "2")
    text = json.dumps(doc["results"])
    for key in ("mu_minus", "mu_plus", "ell", "L", "R"):
        enc = cli.enclosure_from_json(doc["results"][key])
        assert cli.enclosure_json(enc) == doc["results"][key]
    assert json.dumps(json.loads(text)) == text


def test_census(capsys):
    _, doc, _ = run(capsys, "census", "--bound", "50")
    assert doc["results"]["max_multiplicity"] == 1


def test_verify_is_deterministic(capsys):
    _, a, _ = run(capsys, "verify", "--suite", "aigner", "--bound", "60")
    _, b, _ = run(capsys, "verify", "--suite", "aigner", "--bound", "60")
    assert a["results"] == b["results"]
    assert a["results"]["pass"] is True


def test_ball_svg(tmp_path, capsys):
    out = tmp_path / "ball.svg"
    code, doc, _ = run(capsys, "ball-svg", "--bound", "12", "--out", str(out))
    assert code == 0
    root = ET.parse(out).getroot()
    assert root.get("version") == "1.1"
    ns = {"s": "http://www.w3.org/2000/svg"}
    arcs = root.findall("s:polyline[@class='arc']", ns)
    stubs = root.findall("s:polyline[@class='stub']", ns)
    assert len(arcs) == 12
    assert stubs and len(stubs) % 12 == 0


@pytest.mark.parametrize(
    "argv",
    [
        ["frobnicate"],
        ["markov", "3/x"],
        ["markov", "4/2"],
        ["psi", "2/3"],
        ["psi", "0", "--deriv", "left"],
        ["--prec", "0", "sigma"],
        ["--prec", "many", "sigma"],
        ["scan-line", "--slope", "-1", "--through", "4;3", "--bound", "5"],
        ["find-antimodal", "--slope", "-1", "--kmax", "5"],
    ],
)
def test_usage_errors_exit_two(argv, capsys):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_precision_cap_exits_three(monkeypatch, capsys):
    def stall(args):
        raise UndecidedAtCap("stalled")

    monkeypatch.setattr(cli, "cmd_sigma", stall)
    code, _, err = run(capsys, "sigma")
    assert code == 3
    assert "precision cap" in err


def test_cache_env(tmp_path, monkeypatch, capsys):
    from markov_slopes import markov

    cache = MarkovCache()
    cache.label((5, 12))
    path = tmp_path / "cache.tsv"
    cache.save(path)
    previous = markov.default_cache()
    monkeypatch.setenv("MARKOV_CACHE", str(path))
    try:
        _, doc, _ = run(capsys, "markov", "5/12")
        assert (5, 12) in markov.default_cache()
        assert doc["results"]["markov_number"] == str(cache.label((5, 12)))
    finally:
        markov.set_default_cache(previous)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "markov_slopes", "markov", "--pair", "2", "2"],
        capture_output=True, text=True, check=True,
    )
    assert Fraction(json.loads(proc.stdout)["results"]["markov_distance"]) == Fraction(34, 3)
