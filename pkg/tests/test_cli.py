from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import pytest
import yaml

from dfcbounds.cli import figure_rows, main
from dfcbounds.specs import SpecError, parse_spec, parse_spec_dict

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

TWO_NODE = {
    "network": {"nodes": [1, 2], "channel": {"kind": "bsc", "p": 0.3}, "edges": [{"between": [1, 2]}]},
    "observations": {"iid": {"kind": "bernoulli", "p": 0.5}},
    "function": {"kind": "parity"},
    "distortion": "hamming",
}


def machine(out: str) -> dict:
    return json.loads(out.split("--- machine-readable ---\n", 1)[1])


def test_between_sugar():
    spec = parse_spec_dict(TWO_NODE)
    keys = sorted(e.key for e in spec.net.edges)
    assert keys == [("1", "2"), ("2", "1")]
    assert spec.net.edges[0].channel == spec.net.edges[1].channel


def test_round_trip_is_identity_on_normal_form():
    for path in CONFIGS.glob("*.yaml"):
        spec = parse_spec(path)
        norm = spec.to_dict()
        assert parse_spec_dict(norm).to_dict() == norm
        assert parse_spec_dict(json.loads(json.dumps(norm))).to_dict() == norm


def test_dangling_node_named():
    bad = yaml.safe_load(yaml.safe_dump(TWO_NODE))
    bad["network"]["edges"].append({"from": 1, "to": 9})
    with pytest.raises(SpecError, match="'9'"):
        parse_spec_dict(bad)


def test_unknown_keys_strict_only():
    bad = dict(TWO_NODE, extra=1)
    with pytest.raises(SpecError, match="unknown keys"):
        parse_spec_dict(bad)
    parse_spec_dict(bad, strict=False)


def test_incompatible_distortion():
    bad = dict(TWO_NODE, function={"kind": "identity"}, distortion="quadratic")
    with pytest.raises(SpecError):
        parse_spec_dict(bad)


def test_bounds_two_node(capsys):
    code = main(["bounds", "--spec", str(CONFIGS / "two_node_parity.yaml"), "--delta", "0.01"])
    out = capsys.readouterr().out
    assert code == 0
    res = machine(out)
    assert res["result"]["combined_integer"] == 14
    assert res["version"] == "0.1.0"
    assert res["seeds"] == {"seed": 0}
    assert res["input"]["query"]["delta"] == 0.01


def test_bounds_ring_multicut(capsys, tmp_path):
    out_csv = tmp_path / "ring.csv"
    assert main(["bounds", "--spec", str(CONFIGS / "ring6_parity.yaml"), "--out", str(out_csv)]) == 0
    res = machine(capsys.readouterr().out)
    multicut = next(e for e in res["result"]["entries"] if e["name"] == "multicut")
    assert multicut["inputs"]["n"] == 4 and multicut["inputs"]["Delta"] == 4
    rows = list(csv.DictReader(out_csv.open()))
    assert {r["method"] for r in rows} >= {"cutset", "sdpi_single", "multicut"}


def test_bounds_disconnected(capsys):
    assert main(["bounds", "--spec", str(CONFIGS / "disconnected.yaml")]) == 0
    assert machine(capsys.readouterr().out)["result"]["combined"] == "inf"


def test_bounds_max_criterion(capsys):
    assert main(["bounds", "--spec", str(CONFIGS / "gaussian_sum.yaml")]) == 0
    res = machine(capsys.readouterr().out)
    rd = next(e for e in res["result"]["entries"] if e["name"] == "rate_distortion")
    assert rd["value"] == pytest.approx(27.98, abs=0.01)


def test_partition_command(capsys):
    assert main(["partition", "--spec", str(CONFIGS / "ring6_parity.yaml")]) == 0
    out = capsys.readouterr().out
    assert "S_2 = {2, 6}" in out and "S_3 = {3, 5}" in out and "Delta = 4" in out


def test_simulate_auto(capsys):
    assert main(["simulate", "--spec", str(CONFIGS / "two_node_parity.yaml"), "--alg", "parity_repetition"]) == 0
    out = capsys.readouterr().out
    assert "empirical T = 9" in out and "T >= 4" in out


def test_simulate_fixed_csv(capsys):
    assert main(["simulate", "--spec", str(CONFIGS / "two_node_parity.yaml"), "--alg", "parity_repetition",
                 "--T", "5", "--samples", "4000"]) == 0
    body = capsys.readouterr().out.split("--- machine")[0]
    rows = list(csv.DictReader(io.StringIO(body)))
    assert [r["node"] for r in rows] == ["1", "2"]
    assert all(float(r["ci_lo"]) <= float(r["p_hat"]) <= float(r["ci_hi"]) for r in rows)


def test_simulate_incompatible(capsys):
    code = main(["simulate", "--spec", str(CONFIGS / "ring6_parity.yaml"), "--alg", "chain_relay", "--T", "2"])
    assert code == 2
    assert "path network" in capsys.readouterr().err


def test_figures():
    _, rows = figure_rows("cutset-vs-sdpi", p=0.3, T_max=10)
    assert [r[3] for r in rows] == ["cutset"] * 4 + ["sdpi"] * 6
    _, rows = figure_rows("chain-exact-vs-weak", n=3, T_max=2, eta=0.3)
    assert rows[0][1] == pytest.approx(rows[0][2])
    _, rows = figure_rows("chain-exact-vs-weak", n=8, T_max=40, eta=0.3)
    assert rows[-1][2] > rows[-1][1]


def test_figures_csv_file(tmp_path, capsys):
    path = tmp_path / "fig.csv"
    assert main(["figures", "cutset-vs-sdpi", "--out", str(path)]) == 0
    assert path.read_text().splitlines()[0] == "T,cutset_bound,sdpi_bound,tighter"


def test_sdpi_command(capsys):
    assert main(["sdpi", "--channel", "bsc:0.3"]) == 0
    res = machine(capsys.readouterr().out)
    ch = res["result"]["channels"][0]
    assert ch["eta"] == pytest.approx(0.16) and ch["eta_source"] == "exact"
