import json
import os
import subprocess
import sys
from importlib import resources
from pathlib import Path

import pytest

from ktmap.cli import main
from ktmap.corpus import load_corpus
from ktmap.errors import StageError
from ktmap.export import read_graphml
from ktmap.report import PipelineConfig, run_pipeline, validate_report

TOY = resources.files("ktmap.data").joinpath("toy")


def toy_config(out_dir) -> PipelineConfig:
    return PipelineConfig.from_file(str(TOY / "config.cfg"),
                                    {"out_dir": str(out_dir)})


def strip_run_fields(doc: dict) -> dict:
    """Drop the timestamp and the run-specific output path from a report."""
    doc = json.loads(json.dumps(doc))
    doc.pop("generated_at")
    doc["config"].pop("out_dir")
    return doc


class TestPipeline:
    def test_toy_report_contents(self, tmp_path):
        report = run_pipeline(toy_config(tmp_path))
        doc = report.to_json_dict()
        validate_report(doc)

        level2 = [row for row in doc["fronts"]["table"] if row["level"] == 2]
        assert len(level2) == 2
        means = [row["mean_t"] for row in level2]
        assert max(means) - min(means) >= 0.6
        assert [h["id"] for h in doc["hubs"]["candidates"]] == ["m00"]
        assert doc["corpus"]["n_documents"] == 40
        assert doc["corpus"]["n_selected"] == 40
        assert doc["assortativity"] > 0.5
        assert len(doc["main_path"]["nodes"]) >= 2

    def test_intermediate_artifacts_written(self, tmp_path):
        run_pipeline(toy_config(tmp_path))
        for name in ("corpus.nodes.jsonl", "corpus.edges.csv",
                     "corpus.summary.json", "core.nodes.jsonl",
                     "core.edges.csv", "selection.json", "powerlaw.json",
                     "scores.csv", "assortativity.json", "fronts.csv",
                     "fronts.json", "metrics.csv", "ck_fit.json", "hubs.json",
                     "main_path.json", "report.json"):
            assert (tmp_path / name).exists(), name

    def test_deterministic_across_runs(self, tmp_path):
        """Same config, same out dir: byte-identical apart from the timestamp."""
        out = tmp_path / "run"
        run_pipeline(toy_config(out))
        first = {p.name: p.read_bytes() for p in out.iterdir()}
        run_pipeline(toy_config(out))
        for p in sorted(out.iterdir()):
            if p.name == "report.json":
                a = strip_run_fields(json.loads(first[p.name]))
                b = strip_run_fields(json.loads(p.read_bytes()))
                assert a == b
            else:
                assert p.read_bytes() == first[p.name], p.name

    def test_deterministic_across_thread_counts(self, tmp_path):
        docs = []
        for threads in ("1", "4"):
            out = tmp_path / f"t{threads}"
            env = dict(os.environ, OMP_NUM_THREADS=threads,
                       OPENBLAS_NUM_THREADS=threads)
            subprocess.run(
                [sys.executable, "-m", "ktmap.cli", "report",
                 "--config", str(TOY / "config.cfg"), "--out", str(out)],
                check=True, env=env, capture_output=True)
            with open(out / "report.json", encoding="utf-8") as fh:
                docs.append(strip_run_fields(json.load(fh)))
        assert json.dumps(docs[0], sort_keys=True) == json.dumps(docs[1], sort_keys=True)

    def test_stage_error_tagged(self, tmp_path):
        (tmp_path / "empty.jsonl").write_text("")
        (tmp_path / "edges.csv").write_text("")
        cfg = PipelineConfig(nodes=str(tmp_path / "empty.jsonl"),
                             edges=str(tmp_path / "edges.csv"),
                             out_dir=str(tmp_path / "out"))
        with pytest.raises(StageError) as err:
            run_pipeline(cfg)
        assert err.value.stage == "parse"

    def test_missing_input_rejected(self, tmp_path):
        cfg = PipelineConfig(nodes=str(tmp_path / "nope.jsonl"),
                             edges=str(tmp_path / "nope.csv"),
                             out_dir=str(tmp_path))
        with pytest.raises(ValueError, match="not found"):
            run_pipeline(cfg)

    def test_lexicon_route(self, tmp_path):
        (tmp_path / "nodes.jsonl").write_text(
            '{"id": "a", "year": 2, "terms": ["kinase", "kinase", "trial"]}\n'
            '{"id": "b", "year": 1, "terms": ["trial"]}\n')
        (tmp_path / "edges.csv").write_text("a,b\n")
        (tmp_path / "basic.txt").write_text("kinase\n")
        (tmp_path / "clinical.txt").write_text("trial\n")
        cfg = PipelineConfig(nodes=str(tmp_path / "nodes.jsonl"),
                             edges=str(tmp_path / "edges.csv"),
                             lexicon_basic=str(tmp_path / "basic.txt"),
                             lexicon_clinical=str(tmp_path / "clinical.txt"),
                             fraction=1.0, min_front_size=50,
                             out_dir=str(tmp_path / "out"))
        with pytest.raises(StageError):
            # two docs, one edge: fronts stage works but the power-law fit
            # cannot (single positive degree value) - stage tag must say so
            run_pipeline(cfg)
        # the per-document counting still happened before the failing stage
        back = load_corpus(tmp_path / "out" / "corpus.nodes.jsonl",
                           tmp_path / "out" / "corpus.edges.csv")
        assert back.docs["a"].basic_terms == 2
        assert back.docs["a"].clinical_terms == 1


class TestConfigFile:
    def test_round_trip_and_overrides(self, tmp_path):
        cfg_file = tmp_path / "c.cfg"
        cfg_file.write_text("nodes = n.jsonl\nedges = e.csv\nfraction = 0.5\n"
                            "# comment\nmin_front_size = 7\nlenient = true\n")
        cfg = PipelineConfig.from_file(cfg_file, {"fraction": 0.25})
        assert cfg.fraction == 0.25
        assert cfg.min_front_size == 7
        assert cfg.lenient is True
        assert cfg.nodes == str(tmp_path / "n.jsonl")

    def test_unknown_key_rejected(self, tmp_path):
        cfg_file = tmp_path / "c.cfg"
        cfg_file.write_text("nodes = n\nedges = e\nmystery = 1\n")
        with pytest.raises(ValueError, match="mystery"):
            PipelineConfig.from_file(cfg_file)

    def test_bad_mode_rejected(self):
        with pytest.raises(ValueError):
            PipelineConfig(nodes="n", edges="e", mode="sideways")


class TestCliStages:
    def run_cli(self, *argv) -> int:
        return main(list(argv))

    def test_stagewise_run_matches_pipeline(self, tmp_path):
        out = tmp_path / "stages"
        nodes, edges = str(TOY / "nodes.jsonl"), str(TOY / "edges.csv")
        assert self.run_cli("parse", "--nodes", nodes, "--edges", edges,
                            "--out", str(out)) == 0
        assert self.run_cli("select", "--fraction", "1.0", "--out", str(out)) == 0
        assert self.run_cli("fit-degrees", "--out", str(out)) == 0
        assert self.run_cli("score", "--out", str(out)) == 0
        assert self.run_cli("fronts", "--min-size", "25", "--out", str(out)) == 0
        assert self.run_cli("metrics", "--out", str(out)) == 0
        assert self.run_cli("hubs", "--out", str(out)) == 0
        assert self.run_cli("mainpath", "--out", str(out)) == 0

        ref = tmp_path / "pipeline"
        run_pipeline(toy_config(ref))
        for name in ("core.nodes.jsonl", "scores.csv", "fronts.csv",
                     "metrics.csv", "hubs.json", "main_path.json",
                     "powerlaw.json"):
            assert (out / name).read_text() == (ref / name).read_text(), name

    def test_missing_stage_inputs_exit_2(self, tmp_path):
        assert self.run_cli("select", "--out", str(tmp_path)) == 2
        assert self.run_cli("hubs", "--out", str(tmp_path)) == 2

    def test_usage_error_exit_1(self):
        assert self.run_cli("parse", "--nodes-only-bad-flag") == 1
        assert self.run_cli() == 1

    def test_data_error_exit_2(self, tmp_path):
        (tmp_path / "n.jsonl").write_text('{"id": "a"}\n{"id": "a"}\n')
        (tmp_path / "e.csv").write_text("")
        code = self.run_cli("parse", "--nodes", str(tmp_path / "n.jsonl"),
                            "--edges", str(tmp_path / "e.csv"),
                            "--out", str(tmp_path / "o"))
        assert code == 2

    def test_report_command(self, tmp_path):
        code = self.run_cli("report", "--config", str(TOY / "config.cfg"),
                            "--out", str(tmp_path))
        assert code == 0
        with open(tmp_path / "report.json", encoding="utf-8") as fh:
            validate_report(json.load(fh))

    def test_simulate_presets(self, tmp_path):
        for preset, extra in (("planted", ["--blocks", "2", "--leaf-size", "10",
                                           "--p-within", "0.4"]),
                              ("hierarchical", ["--iterations", "2"]),
                              ("random", ["--n", "30", "--p", "0.1"])):
            out = tmp_path / preset
            assert self.run_cli("simulate", "--preset", preset, "--seed", "1",
                                "--out", str(out), *extra) == 0
            net = load_corpus(out / "nodes.jsonl", out / "edges.csv")
            assert net.n_docs > 0
        assert (tmp_path / "planted" / "ground_truth.json").exists()

    def test_simulated_corpus_feeds_pipeline(self, tmp_path):
        sim = tmp_path / "sim"
        assert self.run_cli("simulate", "--preset", "planted", "--seed", "4",
                            "--blocks", "2", "--leaf-size", "30",
                            "--p-within", "0.3", "--p-between", "0.02",
                            "--out", str(sim)) == 0
        out = tmp_path / "run"
        assert self.run_cli("parse", "--nodes", str(sim / "nodes.jsonl"),
                            "--edges", str(sim / "edges.csv"),
                            "--out", str(out)) == 0
        assert self.run_cli("select", "--fraction", "1.0", "--out", str(out)) == 0
        assert self.run_cli("fronts", "--out", str(out)) == 0


class TestExport:
    def prepared(self, tmp_path) -> Path:
        out = tmp_path / "exp"
        run_pipeline(toy_config(out))
        return out

    def test_graphml_round_trip(self, tmp_path):
        out = self.prepared(tmp_path)
        assert main(["export", "--format", "graphml", "--out", str(out)]) == 0
        nodes, edges, attrs = read_graphml(out / "graph.graphml")
        net = load_corpus(out / "core.nodes.jsonl", out / "core.edges.csv")
        assert sorted(nodes) == list(net.ids)
        assert sorted(edges) == list(net.edges)

    def test_hub_attribute_matches_report(self, tmp_path):
        out = self.prepared(tmp_path)
        main(["export", "--format", "graphml", "--out", str(out)])
        _, _, attrs = read_graphml(out / "graph.graphml")
        with open(out / "hubs.json", encoding="utf-8") as fh:
            hub_ids = {h["id"] for h in json.load(fh)["candidates"]}
        flagged = {v for v, a in attrs.items() if a.get("hub") == "true"}
        assert flagged == hub_ids

    def test_front_attribute_matches_table(self, tmp_path):
        out = self.prepared(tmp_path)
        main(["export", "--format", "graphml", "--out", str(out)])
        _, _, attrs = read_graphml(out / "graph.graphml")
        paths = {}
        with open(out / "fronts.csv", encoding="utf-8") as fh:
            next(fh)
            for line in fh:
                node, _, path = line.strip().partition(",")
                paths[node] = path
        for node, path in paths.items():
            assert attrs[node].get("front") == path

    def test_dot_output(self, tmp_path):
        out = self.prepared(tmp_path)
        assert main(["export", "--format", "dot", "--out", str(out)]) == 0
        text = (out / "graph.dot").read_text()
        assert text.startswith("digraph")
        assert '"m00"' in text and "doublecircle" in text

    def test_unknown_format_listed(self, tmp_path):
        out = self.prepared(tmp_path)
        from ktmap.export import export_graph
        net = load_corpus(out / "core.nodes.jsonl", out / "core.edges.csv")
        with pytest.raises(ValueError, match="graphml, dot"):
            export_graph(net, out / "x", "gexf")
