import io
import json
import math

import numpy as np
import pandas as pd
import pytest

from graph import parse_edge_list, probability_vector
from main import RunConfig, main, parse_times


@pytest.fixture
def edge_file(tmp_path):
    def write(name, text):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)
    return write


def run_cli(capsys, *argv):
    status = main(list(argv))
    out, err = capsys.readouterr()
    return status, out, err


def test_steady_ring(capsys, edge_file):
    ring = edge_file("ring5.txt", "0 1\n1 2\n2 3\n3 4\n4 0\n")
    status, out, _ = run_cli(capsys, "steady", "--input", ring, "--chain", "dtmc")
    assert status == 0
    frame = pd.read_csv(io.StringIO(out))
    assert list(frame.columns) == ["index", "p"]
    assert out.splitlines()[1:] == [f"{i},0.2" for i in range(5)]


def test_entropy_trace_triangle(capsys, edge_file):
    triangle = edge_file("triangle.txt", "0 1\n1 2\n0 2\n")
    status, out, _ = run_cli(capsys, "entropy-trace", "--input", triangle, "--chain", "dtmc",
                             "--init", "point:0", "--steps", "20")
    assert status == 0
    frame = pd.read_csv(io.StringIO(out))
    assert list(frame.columns) == ["step", "value"]
    assert len(frame) == 21
    assert np.all(np.diff(frame["value"]) >= -1e-10)
    assert frame["value"].iloc[-1] == pytest.approx(math.log2(3), abs=1e-5)


def test_classify_star(capsys, edge_file):
    star = edge_file("star5.txt", "0 4\n1 4\n2 4\n3 4\n")
    status, out, _ = run_cli(capsys, "classify", "--input", star, "--format", "json")
    assert status == 0
    record = json.loads(out)
    assert record["graph_entropy_bits"] == 2.0
    assert record["is_min_entropic_star"] is True
    assert record["regularity_degree"] is None


def test_classify_defaults_to_json(capsys, edge_file):
    star = edge_file("star5.txt", "0 4\n1 4\n2 4\n3 4\n")
    status, out, _ = run_cli(capsys, "classify", "--input", star)
    assert status == 0
    record = json.loads(out)
    assert record["graph_entropy_bits"] == 2.0
    assert "\"graph_entropy_bits\": 2.0" in out


def test_classify_csv_on_request(capsys, edge_file):
    star = edge_file("star5.txt", "0 4\n1 4\n2 4\n3 4\n")
    status, out, _ = run_cli(capsys, "classify", "--input", star, "--format", "csv")
    assert status == 0
    assert out.splitlines()[0] == "graph_entropy_bits,is_max_entropic,regularity_degree,is_min_entropic_star"


def test_generate_round_trips(capsys):
    status, out, _ = run_cli(capsys, "generate", "--kind", "star", "--vertices", "4")
    assert status == 0
    g = parse_edge_list(out)
    assert g.num_vertices == 4 and g.num_edges == 3


def test_build_json(capsys):
    status, out, _ = run_cli(capsys, "build", "--generate", "ring:4", "--chain", "ctmc")
    assert status == 0
    payload = json.loads(out)
    assert payload["m"] == 4
    assert payload["rows"][0] == [-2.0, 1.0, 0.0, 1.0]


def test_transient_ctmc_linspace(capsys):
    status, out, _ = run_cli(capsys, "transient", "--generate", "complete:3", "--chain", "ctmc",
                             "--init", "point:1", "--linspace", "0:2:5")
    assert status == 0
    frame = pd.read_csv(io.StringIO(out))
    assert list(frame.columns) == ["time", "state0", "state1", "state2"]
    np.testing.assert_allclose(frame["time"], [0, 0.5, 1, 1.5, 2])
    for _, row in frame.iterrows():
        probability_vector(row[["state0", "state1", "state2"]].to_numpy())


def test_kl_trace_writes_inf(capsys):
    status, out, _ = run_cli(capsys, "kl-trace", "--generate", "complete:3", "--init", "point:0", "--steps", "2")
    assert status == 0
    assert out.splitlines()[2] == "1,inf"


def test_kl_trace_json_infinity(capsys):
    status, out, _ = run_cli(capsys, "kl-trace", "--generate", "complete:3", "--init", "point:0",
                             "--steps", "1", "--format", "json")
    assert status == 0
    assert json.loads(out)[1]["value"] == "Infinity"


def test_measures_from_channel_file(capsys, edge_file):
    channel = edge_file("bsc.csv", "0.75,0.25\n0.25,0.75\n")
    status, out, _ = run_cli(capsys, "measures", "--channel", channel, "--format", "json")
    assert status == 0
    record = json.loads(out)
    assert record["m1"] == pytest.approx(0.5 * math.log2(3), abs=1e-11)
    assert record["m2"] == record["m1"]


def test_measures_natural_log(capsys, edge_file):
    channel = edge_file("bsc.csv", "0.75,0.25\n0.25,0.75\n")
    status, out, _ = run_cli(capsys, "measures", "--channel", channel, "--format", "json", "--log-base", "e")
    assert status == 0
    assert json.loads(out)["m1"] == pytest.approx(0.5 * math.log(3), abs=1e-11)


def test_simulate_is_reproducible(capsys, tmp_path):
    outputs = []
    for i in range(2):
        target = tmp_path / f"sim{i}.csv"
        status, _, _ = run_cli(capsys, "simulate", "--generate", "ring:5", "--init", "point:0",
                               "--steps", "3", "--paths", "5000", "--seed", "123", "--output", str(target))
        assert status == 0
        outputs.append(target.read_bytes())
    assert outputs[0] == outputs[1]


def test_init_from_file(capsys, edge_file):
    pmf = edge_file("pmf.csv", "index,p\n0,0.5\n1,0.5\n2,0\n")
    status, out, _ = run_cli(capsys, "transient", "--generate", "complete:3", "--init", f"file:{pmf}",
                             "--steps", "1")
    assert status == 0
    assert out.splitlines()[1] == "0,0.5,0.5,0"


def test_oracle(capsys):
    status, out, _ = run_cli(capsys, "oracle", "--vertices", "4")
    assert status == 0
    assert json.loads(out)["star_attains_minimum"] is True


def test_validation_error_exit_1(capsys, edge_file):
    bad = edge_file("loop.txt", "0 0\n")
    status, _, err = run_cli(capsys, "steady", "--input", bad)
    assert status == 1
    assert "line 1" in err


def test_horizon_kind_mismatch(capsys):
    status, _, _ = run_cli(capsys, "transient", "--generate", "ring:4", "--chain", "ctmc", "--steps", "3")
    assert status == 1


def test_point_out_of_range(capsys):
    status, _, _ = run_cli(capsys, "transient", "--generate", "ring:4", "--init", "point:4", "--steps", "3")
    assert status == 1


def test_missing_file_exit_2(capsys, tmp_path):
    status, _, err = run_cli(capsys, "steady", "--input", str(tmp_path / "absent.txt"))
    assert status == 2
    assert "I/O error" in err


def test_unknown_subcommand_exit_1(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1
    assert "usage" in capsys.readouterr().err


def test_reducible_steady_exit_1(capsys, edge_file):
    digraph = edge_file("digraph.txt", "0 1\n0 2\n")
    status, _, err = run_cli(capsys, "steady", "--input", digraph, "--directed", "--orientation", "in")
    assert status == 1
    assert "reducible" in err


class TestRunConfig:
    def test_defaults(self):
        config = RunConfig(command="steady", input="g.txt")
        assert config.init == "degree"
        assert config.base == 2.0

    def test_seed_reduced_to_64_bits(self):
        assert RunConfig(command="simulate", input="g.txt", steps=1, seed=-1).seed == (1 << 64) - 1

    @pytest.mark.parametrize("init", ["point:x", "file:", "gaussian"])
    def test_bad_init(self, init):
        with pytest.raises(ValueError):
            RunConfig(command="steady", input="g.txt", init=init)

    def test_needs_one_graph_source(self):
        with pytest.raises(ValueError):
            RunConfig(command="steady")
        with pytest.raises(ValueError):
            RunConfig(command="steady", input="g.txt", generate="ring:4")


def test_parse_times():
    assert parse_times("0,1.5,3", None) == [0.0, 1.5, 3.0]
    assert parse_times(None, "0:1:3") == [0.0, 0.5, 1.0]
    with pytest.raises(ValueError):
        parse_times(None, "0:1")


def test_init_from_bare_numbers(capsys, edge_file):
    pmf = edge_file("pmf.txt", "0.25\n0.25\n0.5\n")
    status, out, _ = run_cli(capsys, "transient", "--generate", "complete:3", "--init", f"file:{pmf}",
                             "--steps", "0")
    assert status == 0
    assert out.splitlines()[1] == "0,0.25,0.25,0.5"


def test_init_file_not_numbers(capsys, edge_file):
    pmf = edge_file("pmf.txt", "a,b,c\nx,y,z\n")
    status, _, err = run_cli(capsys, "transient", "--generate", "complete:3", "--init", f"file:{pmf}",
                             "--steps", "1")
    assert status == 1
    assert "must be numbers" in err


def test_repeated_times_rejected(capsys):
    status, _, err = run_cli(capsys, "entropy-trace", "--generate", "ring:4", "--chain", "ctmc",
                             "--init", "point:0", "--times", "1,1")
    assert status == 1
    assert "strictly increasing" in err


def test_ignore_weights(capsys, edge_file):
    weighted = edge_file("weighted.txt", "0 1 1\n1 2 3\n")
    status, out, _ = run_cli(capsys, "build", "--input", weighted)
    assert status == 0
    assert json.loads(out)["rows"][1] == [0.25, 0.0, 0.75]

    status, out, _ = run_cli(capsys, "build", "--input", weighted, "--ignore-weights")
    assert status == 0
    assert json.loads(out)["rows"][1] == [0.5, 0.0, 0.5]
