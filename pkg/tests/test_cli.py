"""End-to-end command line tests: every subcommand, exit codes, manifests."""

import json

import pytest

from frex.cli import main
from frex.conllu import parse_corpus, serialize_corpus
from frex.embeddings import load_embeddings
from frex.splitting import parse_fold_plan
from frex.stats import compute_stats, render_stats_json, render_stats_tsv

from conftest import corpus, review_from_words

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def build_reviews(labeled: bool):
    reviews = []
    for i in range(1, 7):
        reviews.append(review_from_words(
            f"pr{i}", [f"great offline mode app n{i}"], app="app-pr", cat="PR",
            labels=[["O", "B", "I", "O", "O"]] if labeled else None))
        reviews.append(review_from_words(
            f"co{i}", [f"love dark theme lots n{i}"], app="app-co", cat="CO",
            labels=[["O", "B", "I", "O", "O"]] if labeled else None))
    return corpus(*reviews)


FEATURES_TSV = (
    "app_id\tfeature_phrase\n"
    "app-pr\toffline mode\n"
    "app-co\tdark theme\n"
)


@pytest.fixture
def gold_path(tmp_path):
    path = tmp_path / "gold.conllu"
    path.write_text(serialize_corpus(build_reviews(labeled=True)), encoding="utf-8")
    return path


@pytest.fixture
def unlabeled_path(tmp_path):
    path = tmp_path / "raw.conllu"
    path.write_text(serialize_corpus(build_reviews(labeled=False)), encoding="utf-8")
    return path


@pytest.fixture
def features_path(tmp_path):
    path = tmp_path / "features.tsv"
    path.write_text(FEATURES_TSV, encoding="utf-8")
    return path


def read_manifest(out_path):
    return json.loads((out_path.parent / f"{out_path.name}.manifest.json")
                      .read_text(encoding="utf-8"))


class TestUsage:
    def test_missing_required_args_exit_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["score"])
        assert exc.value.code == 2

    def test_unknown_command_exit_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        assert "frex" in capsys.readouterr().out


class TestBeta:
    def test_default_prints_published_value(self, capsys):
        assert main(["beta"]) == 0
        assert capsys.readouterr().out == "2.385\n"

    def test_custom_timings(self, capsys):
        assert main(["beta", "--a-t", "10", "--a-small-t", "5"]) == 0
        assert capsys.readouterr().out == "2.000\n"

    def test_bad_timing_exits_1(self, capsys):
        assert main(["beta", "--a-t", "-3"]) == 1
        assert "beta" in capsys.readouterr().err


class TestTransfer:
    def test_end_to_end_bytes(self, tmp_path, unlabeled_path, features_path,
                              gold_path, capsys):
        out = tmp_path / "labeled.conllu"
        report = tmp_path / "report.json"
        code = main(["transfer", "--corpus", str(unlabeled_path),
                     "--features", str(features_path),
                     "--out", str(out), "--report", str(report)])
        assert code == 0
        assert out.read_bytes() == gold_path.read_bytes()
        assert "12 reviews" in capsys.readouterr().out

        doc = json.loads(report.read_text(encoding="utf-8"))
        assert doc["annotations_made"] == 12
        manifest = read_manifest(out)
        assert manifest["command"] == "transfer"
        assert str(unlabeled_path) in manifest["inputs"]
        assert str(report) in manifest["outputs"]
        for digest in manifest["outputs"].values():
            assert digest.startswith("sha256:")

    def test_missing_input_exits_1(self, tmp_path, features_path, capsys):
        code = main(["transfer", "--corpus", str(tmp_path / "nope.conllu"),
                     "--features", str(features_path),
                     "--out", str(tmp_path / "x.conllu")])
        assert code == 1
        assert "transfer" in capsys.readouterr().err

    def test_failed_run_leaves_no_output(self, tmp_path, gold_path,
                                         features_path, capsys):
        # gold is already labeled; transfer must refuse and write nothing
        out = tmp_path / "x.conllu"
        code = main(["transfer", "--corpus", str(gold_path),
                     "--features", str(features_path), "--out", str(out)])
        assert code == 1
        assert not out.exists()
        leftovers = [p for p in tmp_path.iterdir() if p.name.startswith(".")]
        assert leftovers == []


class TestSplit:
    def test_fold_plan_round_trips(self, tmp_path, gold_path):
        out = tmp_path / "folds.json"
        assert main(["split", "--corpus", str(gold_path), "--out", str(out),
                     "--k", "2"]) == 0
        with open(out, encoding="utf-8") as handle:
            plan = parse_fold_plan(handle)
        assert plan.k == 2 and plan.mode == "in-domain"
        ids = {f"pr{i}" for i in range(1, 7)} | {f"co{i}" for i in range(1, 7)}
        assert plan.all_ids() == ids
        assert all(len(fold.test) == 6 for fold in plan.folds)

    def test_rerun_is_byte_identical(self, tmp_path, gold_path):
        out = tmp_path / "folds.json"
        manifest = tmp_path / "folds.json.manifest.json"
        main(["split", "--corpus", str(gold_path), "--out", str(out)])
        first = (out.read_bytes(), manifest.read_bytes())
        main(["split", "--corpus", str(gold_path), "--out", str(out)])
        assert (out.read_bytes(), manifest.read_bytes()) == first

    def test_out_of_domain(self, tmp_path, gold_path):
        out = tmp_path / "ood.json"
        assert main(["split", "--corpus", str(gold_path), "--out", str(out),
                     "--mode", "out-of-domain"]) == 0
        doc = json.loads(out.read_text(encoding="utf-8"))
        assert [fold["name"] for fold in doc["folds"]] == ["CO", "PR"]
        assert doc["seed"] is None


class TestScore:
    def test_perfect_predictions(self, tmp_path, gold_path):
        out = tmp_path / "score.tsv"
        jout = tmp_path / "score.json"
        code = main(["score", "--gold", str(gold_path), "--pred", str(gold_path),
                     "--out", str(out), "--json", str(jout)])
        assert code == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0].split("\t")[:5] == ["level", "scope", "tp", "fp", "fn"]
        token_row = lines[1].split("\t")
        assert token_row[0] == "token" and token_row[1] == "all"
        assert token_row[5] == "1.0" and token_row[6] == "1.0"
        doc = json.loads(jout.read_text(encoding="utf-8"))
        assert set(doc["levels"]) == {"token", "span"}
        assert doc["levels"]["span"]["tp"] == 12
        figure = tmp_path / "score.png"
        assert figure.read_bytes()[:8] == PNG_MAGIC
        assert str(figure) in read_manifest(out)["outputs"]

    def test_no_figure(self, tmp_path, gold_path):
        out = tmp_path / "score.tsv"
        main(["score", "--gold", str(gold_path), "--pred", str(gold_path),
              "--out", str(out), "--no-figure"])
        assert not (tmp_path / "score.png").exists()
        outputs = read_manifest(out)["outputs"]
        assert all(not path.endswith(".png") for path in outputs)

    def test_with_folds(self, tmp_path, gold_path):
        folds = tmp_path / "folds.json"
        main(["split", "--corpus", str(gold_path), "--out", str(folds),
              "--k", "2"])
        out = tmp_path / "cv.tsv"
        jout = tmp_path / "cv.json"
        code = main(["score", "--gold", str(gold_path), "--pred", str(gold_path),
                     "--out", str(out), "--json", str(jout),
                     "--folds", str(folds), "--level", "token"])
        assert code == 0
        scopes = [line.split("\t")[1]
                  for line in out.read_text(encoding="utf-8").splitlines()[1:]]
        assert scopes == ["fold-1", "fold-2", "macro", "micro"]
        doc = json.loads(jout.read_text(encoding="utf-8"))
        level = doc["levels"]["token"]
        assert len(level["folds"]) == 2
        assert level["aggregate"]["macro_f1"] == 1.0
        assert level["aggregate"]["micro"]["tp"] == 24

    def test_fold_plan_with_unknown_reviews_exits_1(self, tmp_path, gold_path,
                                                    capsys):
        folds = tmp_path / "folds.json"
        folds.write_text(json.dumps({
            "mode": "in-domain", "k": 2, "seed": 1, "warnings": [],
            "folds": [{"name": "fold-1", "test": ["ghost"]},
                      {"name": "fold-2", "test": ["pr1"]}],
        }), encoding="utf-8")
        code = main(["score", "--gold", str(gold_path), "--pred", str(gold_path),
                     "--out", str(tmp_path / "x.tsv"), "--folds", str(folds)])
        assert code == 1
        assert "ghost" in capsys.readouterr().err


class TestSelectPipeline:
    def test_mock_embed_select_validate(self, tmp_path, gold_path,
                                        features_path, capsys):
        emb = tmp_path / "emb.jsonl"
        assert main(["mock-embed", "--corpus", str(gold_path),
                     "--out", str(emb), "--dim", "16"]) == 0
        store = load_embeddings(emb.read_text(encoding="utf-8"))
        assert len(store) == 12 and store.dim == 16

        plan_path = tmp_path / "plan.json"
        assert main(["select", "--corpus", str(gold_path),
                     "--features", str(features_path),
                     "--embeddings", str(emb),
                     "--out", str(plan_path), "--fractions", "0.5"]) == 0
        plan = json.loads(plan_path.read_text(encoding="utf-8"))
        assert plan["order"] == "farthest-first"
        assert len(plan["selected"]["0.5"]) == 6  # ceil(0.5*6) per feature

        audit = tmp_path / "plan.audit.tsv"
        lines = audit.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "feature\treview_id\tdistance\trank"
        assert len(lines) == 13
        manifest = read_manifest(plan_path)
        assert str(audit) in manifest["outputs"]

        assert main(["validate", "--corpus", str(gold_path),
                     "--embeddings", str(emb)]) == 0
        out = capsys.readouterr().out
        assert "ok corpus" in out and "ok embeddings" in out

    def test_validate_rejects_corrupt_embeddings(self, tmp_path, capsys):
        bad = tmp_path / "bad.jsonl"
        bad.write_text('{"review_id": "r1"}\n', encoding="utf-8")
        assert main(["validate", "--embeddings", str(bad)]) == 1
        assert "line 1" in capsys.readouterr().err

    def test_validate_needs_a_target(self, capsys):
        assert main(["validate"]) == 1
        assert "nothing to validate" in capsys.readouterr().err


def humaneval_records(with_category: bool) -> str:
    header = ("task_id\tannotator_id\treview_id\tfeature_phrase\tanswer\t"
              "is_control\tcontrol_correct")
    lines = [header + "\tcategory" if with_category else header]
    for a in ["a1", "a2", "a3", "a4", "a5"]:
        for c in range(5):
            row = f"t1\t{a}\tctl{c}\tc{c}\tNo\ttrue\ttrue"
            lines.append(row + "\t" if with_category else row)
        row = f"t1\t{a}\tpr1\tsync\t{'Yes' if a != 'a5' else 'No'}\tfalse\tfalse"
        lines.append(row + "\tPR" if with_category else row)
    return "\n".join(lines) + "\n"


class TestHumaneval:
    def test_summary_table_and_figure(self, tmp_path, capsys):
        records = tmp_path / "records.tsv"
        records.write_text(humaneval_records(with_category=True),
                           encoding="utf-8")
        out = tmp_path / "summary.tsv"
        jout = tmp_path / "summary.json"
        code = main(["humaneval", "--records", str(records), "--out", str(out),
                     "--json", str(jout)])
        assert code == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "category\tn_reviews\tyes_pct\tno_pct\tidk_pct"
        assert lines[1].startswith("PR\t1\t100.0")
        assert lines[-1].startswith("total\t1\t100.0")
        assert (tmp_path / "summary.png").read_bytes()[:8] == PNG_MAGIC
        doc = json.loads(jout.read_text(encoding="utf-8"))
        assert doc["rejections"] == [] and doc["coverage"] == []

    def test_category_lookup_from_corpus(self, tmp_path, gold_path):
        records = tmp_path / "records.tsv"
        records.write_text(humaneval_records(with_category=False),
                           encoding="utf-8")
        out = tmp_path / "summary.tsv"
        code = main(["humaneval", "--records", str(records), "--out", str(out),
                     "--corpus", str(gold_path), "--no-figure"])
        assert code == 0
        assert out.read_text(encoding="utf-8").splitlines()[1].startswith("PR\t1")

    def test_figure_override(self, tmp_path):
        records = tmp_path / "records.tsv"
        records.write_text(humaneval_records(with_category=True),
                           encoding="utf-8")
        fig = tmp_path / "elsewhere.png"
        main(["humaneval", "--records", str(records),
              "--out", str(tmp_path / "s.tsv"), "--figure", str(fig)])
        assert fig.read_bytes()[:8] == PNG_MAGIC
        assert not (tmp_path / "s.png").exists()


class TestStats:
    def test_matches_library_renderings(self, tmp_path, gold_path):
        out = tmp_path / "stats.tsv"
        jout = tmp_path / "stats.json"
        assert main(["stats", "--corpus", str(gold_path), "--out", str(out),
                     "--json", str(jout)]) == 0
        with open(gold_path, encoding="utf-8") as handle:
            report = compute_stats(parse_corpus(handle))
        assert out.read_text(encoding="utf-8") == render_stats_tsv(report)
        assert json.loads(jout.read_text(encoding="utf-8")) == \
            json.loads(json.dumps(render_stats_json(report)))
        assert (tmp_path / "stats.png").read_bytes()[:8] == PNG_MAGIC
