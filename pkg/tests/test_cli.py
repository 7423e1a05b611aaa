import json
import logging

import pytest

from conftest import dataset_path, write_lines
from core.community import Partition, modularity
from core.experiment import SweepConfig, run_sweep
from core.ingest import load_graph, read_projected_edge_list
from core.projection import project
from core.weighting import filter_by_threshold, tfidf_reweight
from run import main

WOMEN_A = "1 2 3 4 5 6 7 8 9"
WOMEN_B = "10 11 12 13 14 15 17 18"


def lines(text: str) -> list[str]:
    return text.strip("\n").split("\n")


def error_line(err: str) -> str:
    return next(line for line in err.splitlines() if line.startswith("error: "))


def undirected(graph) -> dict[frozenset, float]:
    return {frozenset((a, b)): w for a, b, w in graph.edges()}


def read_partition(path):
    comment, header, *rows = path.read_text(encoding="utf-8").strip("\n").split("\n")
    assert header == "node\tcommunity"
    q = float(comment.split("=", 1)[1])
    return dict(row.split("\t") for row in rows), q


def test_stats(toy_file, capsys):
    assert main(["stats", str(toy_file)]) == 0
    out = dict(line.split("\t") for line in lines(capsys.readouterr().out))
    assert (out["n_u"], out["n_o"], out["m"]) == ("5", "6", "13")
    assert float(out["k_u"]) == pytest.approx(2.6)
    assert float(out["density"]) == pytest.approx(13 / 30)
    assert "m_U" not in out


def test_stats_with_projections(toy_file, capsys):
    assert main(["stats", "--projections", str(toy_file)]) == 0
    out = dict(line.split("\t") for line in lines(capsys.readouterr().out))
    assert out["m_U"] == str(project(load_graph(toy_file), "users").n_edges)
    assert 0 < float(out["density_O"]) <= 1


def test_top_objects(toy_file, capsys):
    assert main(["top-objects", "-k", "2", str(toy_file)]) == 0
    assert lines(capsys.readouterr().out) == ["object\tdegree\tuser_fraction", "d\t4\t0.8", "a\t2\t0.4"]


@pytest.mark.parametrize("seed", [0, 1, 7, 12345])
def test_southern_women_groups(seed, capsys):
    assert main(["southern-women", "--seed", str(seed)]) == 0
    header, *body = lines(capsys.readouterr().out)
    assert header.startswith("# tau=1.0 log_base=2.0 modularity=")
    assert float(header.rsplit("=", 1)[1]) > 0.3
    assert body == [f"group 1\t{WOMEN_A}", f"group 2\t{WOMEN_B}", "isolated\t16"]


def test_southern_women_names(capsys):
    assert main(["southern-women", "--seed", "3", "--names"]) == 0
    out = capsys.readouterr().out
    assert "1:Evelyn" in out
    assert "isolated\t16:Dorothy" in out


def test_filter_at_zero_returns_the_input(toy_file, tmp_path):
    out = tmp_path / "kept.tsv"
    assert main(["filter", "--tau", "0", "-o", str(out), str(toy_file)]) == 0
    assert list(load_graph(out).triples()) == list(load_graph(toy_file).triples())


def test_pipeline_through_files_matches_the_library(toy_file, tmp_path):
    weighted_path = tmp_path / "tfidf.tsv"
    filtered_path = tmp_path / "filtered.tsv"
    projected_path = tmp_path / "projected.tsv"
    partition_path = tmp_path / "partition.tsv"
    tau = 0.3
    assert main(["tfidf", "-o", str(weighted_path), str(toy_file)]) == 0
    assert main(["filter", "--tau", str(tau), "-o", str(filtered_path), str(weighted_path)]) == 0
    assert main(["project", "-o", str(projected_path), str(filtered_path)]) == 0
    assert main(["communities", "--seed", "4", "-o", str(partition_path), str(projected_path)]) == 0

    filtered = filter_by_threshold(tfidf_reweight(load_graph(toy_file)), tau).graph
    projected = project(filtered, "users")
    assert sorted(load_graph(filtered_path).triples()) == sorted(filtered.triples())
    assert undirected(read_projected_edge_list(projected_path)) == undirected(projected)

    assignment, q = read_partition(partition_path)
    partition = Partition.from_mapping(projected.nodes, assignment)
    assert q == pytest.approx(modularity(projected, partition), abs=1e-12)

    row = run_sweep(load_graph(toy_file), SweepConfig(thresholds=(tau,), replicates=1)).rows[0]
    assert row.real.projected_edges == projected.n_edges
    assert row.real.users_remaining == filtered.n_users


def test_tfidf_log_base(toy_file, capsys):
    assert main(["tfidf", "--log-base", "2", str(toy_file)]) == 0
    first, header, *rows = lines(capsys.readouterr().out)
    assert first.startswith("# tfidf log_base=2.0")
    assert header == "user\tobject\tw_old\tf\tidf\tw_new"
    assert len(rows) == 13


def test_project_keeps_isolated_nodes(tmp_path, capsys):
    path = write_lines(tmp_path / "e.tsv", ["u\tx\t1", "v\tx\t1", "w\ty\t1"])
    assert main(["project", "--method", "pairs", str(path)]) == 0
    out = capsys.readouterr().out
    assert "# side=users nodes=3" in out
    assert "# isolated\tw" in out
    assert out.endswith("u\tv\t1.0\n")


def test_fit_degrees_writes_json(capsys):
    assert main(["fit-degrees", "--seed", "5", "--side", "users", "builtin:planted"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["side"] == "users"
    assert payload["best"] in payload["models"]
    assert len(payload["comparisons"]) == 6


def test_experiment_writes_its_files(tmp_path, capsys):
    out = tmp_path / "sweep"
    argv = ["experiment", "--seed", "11", "--replicates", "2", "--max-threshold", "0.5", "-o", str(out), "builtin:planted"]
    assert main(argv) == 0
    printed = lines(capsys.readouterr().out)
    assert [p.rsplit("/", 1)[-1] for p in printed] == [
        "edges_users.csv", "density.csv", "modularity.csv", "report.json",
    ]
    report = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert report["config"]["replicates"] == 2
    assert report["provenance"]["master_seed"] == 11
    assert [row["tau"] for row in report["rows"]] == [0.1, 0.5]


def test_experiment_config_file(toy_file, tmp_path):
    config = write_lines(tmp_path / "sweep.env", ["THRESHOLDS=0.2,0.4", "REPLICATES=2", "MASTER_SEED=7"])
    out = tmp_path / "from-file"
    assert main(["experiment", "--config", str(config), "-o", str(out), str(toy_file)]) == 0
    report = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert report["provenance"]["master_seed"] == 7
    assert report["config"]["thresholds"] == [0.2, 0.4]

    out = tmp_path / "flag-wins"
    assert main(["experiment", "--config", str(config), "--seed", "8", "--replicates", "1",
                 "-o", str(out), str(toy_file)]) == 0
    report = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert report["provenance"]["master_seed"] == 8
    assert report["config"]["replicates"] == 1


@pytest.mark.parametrize(
    "argv, code, category",
    [
        ([], 1, "usage"),
        (["stats"], 1, "usage"),
        (["stats", "--no-such-flag", "x"], 1, "usage"),
        (["filter", "--tau", "-1", "x"], 1, "usage"),
        (["stats", "--seed", "-3", "x"], 1, "usage"),
        (["stats", "builtin:nothing"], 1, "usage"),
        (["southern-women", "--tau", "-1"], 1, "usage"),
        (["southern-women", "--log-base", "1"], 1, "usage"),
        (["tfidf", "--log-base", "nan", "x"], 1, "usage"),
        (["top-objects", "-k", "0", "/no/such/file.tsv"], 1, "usage"),
        (["experiment", "--replicates", "0", "x"], 1, "usage"),
        (["stats", "/no/such/file.tsv"], 2, "input"),
        (["communities", "/no/such/projection.tsv"], 2, "input"),
        (["experiment", "--config", "/no/such/sweep.env", "builtin:southern-women"], 2, "input"),
    ],
)
def test_exit_codes(argv, code, category, capsys):
    assert main(argv) == code
    assert error_line(capsys.readouterr().err).startswith(f"error: {category}:")


def test_parse_error_exit_code(tmp_path, capsys):
    path = write_lines(tmp_path / "bad.tsv", ["u\tx\t1", "v\tx\tlots"])
    assert main(["stats", str(path)]) == 2
    err = error_line(capsys.readouterr().err)
    assert err.startswith("error: input:")
    assert "line 2" in err


def test_undecodable_input_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.tsv"
    path.write_bytes(b"u\xff\to2\t1\n")
    assert main(["stats", str(path)]) == 2
    err = error_line(capsys.readouterr().err)
    assert err.startswith("error: input:") and "line 1" in err


def test_malformed_projection_is_an_input_error(tmp_path, capsys):
    path = write_lines(tmp_path / "p.tsv", ["a\tb\t1", "b\ta\t2"])
    assert main(["communities", "--seed", "1", str(path)]) == 2
    err = error_line(capsys.readouterr().err)
    assert err.startswith("error: input:") and "line 2" in err


def test_computation_error_exit_code(toy_file, capsys):
    # five users are too few to fit a degree distribution
    assert main(["fit-degrees", str(toy_file)]) == 3
    assert error_line(capsys.readouterr().err).startswith("error: computation:")


def test_help_and_version(capsys):
    with pytest.raises(SystemExit) as exit_info:
        main(["stats", "--help"])
    assert exit_info.value.code == 0
    assert "--projections" in capsys.readouterr().out
    with pytest.raises(SystemExit) as exit_info:
        main(["--version"])
    assert exit_info.value.code == 0
    assert capsys.readouterr().out.startswith("bipartite ")


def test_log_level_from_environment(monkeypatch, toy_file):
    monkeypatch.setenv("BIPARTITE_LOG_LEVEL", "warning")
    assert main(["stats", str(toy_file)]) == 0
    assert logging.getLogger("bipartite").level == logging.WARNING
    assert main(["stats", "--log-level", "debug", str(toy_file)]) == 0
    assert logging.getLogger("bipartite").level == logging.DEBUG
    monkeypatch.setenv("BIPARTITE_LOG_LEVEL", "LOUD")
    assert main(["stats", str(toy_file)]) == 1


def test_other_delimiters(tmp_path, capsys):
    path = write_lines(tmp_path / "e.csv", ["user,item,rating", "u1,x,4", "u2,x,2", "u2,y,5"])
    assert main(["stats", "--delimiter", "comma", "--has-header", "--min-rating", "3", str(path)]) == 0
    out = dict(line.split("\t") for line in lines(capsys.readouterr().out))
    assert (out["n_u"], out["m"]) == ("2", "2")


def test_delimiter_from_environment(monkeypatch, tmp_path, capsys):
    path = write_lines(tmp_path / "e.csv", ["u1,x,4", "u2,x,2", "u2,y,5"])
    monkeypatch.setenv("BIPARTITE_DELIMITER", "comma")
    assert main(["stats", str(path)]) == 0
    out = dict(line.split("\t") for line in lines(capsys.readouterr().out))
    assert out["m"] == "3"
    monkeypatch.setenv("BIPARTITE_DELIMITER", "::")
    assert main(["stats", str(path)]) == 1


@pytest.mark.skipif(dataset_path("lastfm") is None, reason="set BIPARTITE_DATASET_LASTFM to a user/artist edge list")
def test_lastfm_statistics(capsys):
    assert main(["stats", "--projections", str(dataset_path("lastfm"))]) == 0
    out = dict(line.split("\t") for line in lines(capsys.readouterr().out))
    assert (out["n_u"], out["n_o"], out["m"]) == ("1892", "9748", "35813")
    assert float(out["density"]) == pytest.approx(0.0019, abs=5e-5)
    assert float(out["density_U"]) == pytest.approx(0.383, abs=5e-4)


@pytest.mark.skipif(dataset_path("movielens") is None, reason="set BIPARTITE_DATASET_MOVIELENS to a rating list")
def test_movielens_statistics(capsys):
    path = str(dataset_path("movielens"))
    assert main(["stats", "--min-rating", "4", path]) == 0
    out = dict(line.split("\t") for line in lines(capsys.readouterr().out))
    assert (out["n_u"], out["n_o"], out["m"]) == ("2000", "3336", "192922")
