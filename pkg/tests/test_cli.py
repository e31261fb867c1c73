import json
import subprocess
import sys

import pytest

from conftest import FIXTURES
from textcf.cli import RunConfig, load_dataset, main, read_config_file, sample_targets
from textcf.exceptions import MissingColumn, ParseError
from textcf.synthetic import data_path


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if code == 0 else None), err


@pytest.fixture(scope="module")
def model(tmp_path_factory):
    out = tmp_path_factory.mktemp("train")
    assert main(["train", "--dataset", str(data_path("polarity.csv")), "--out", str(out)]) == 0
    return out / "model.json"


def test_load_dataset_quoting():
    corpus = load_dataset(FIXTURES / "reviews.csv")
    assert len(corpus) == 3
    assert corpus.classes == ("neg", "pos")
    assert corpus.labels == [1, 0, 1]
    assert corpus.documents[0].raw == "a good film, honestly"
    assert corpus.documents[2].raw == 'she said "great", then left'


def test_load_dataset_errors(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("text,score\nfoo,1\n")
    with pytest.raises(MissingColumn):
        load_dataset(p)
    p.write_text("text,label\nfoo,pos\nbar\n")
    with pytest.raises(ParseError) as exc:
        load_dataset(p)
    assert exc.value.line == 3
    p.write_text("")
    with pytest.raises(ParseError):
        load_dataset(p)


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nclassifier = logreg\nseed=7\ntheta-min = 0.5\n")
    assert read_config_file(cfg) == {"classifier": "logreg", "seed": 7, "theta_min": 0.5}
    code, out, _ = run(
        capsys, "train", "--config", str(cfg), "--seed", "3",
        "--dataset", str(data_path("polarity.csv")), "--out", str(tmp_path),
    )
    assert code == 0 and out["classifier"] == "logreg" and out["seed"] == 3


def test_bad_config_key(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("colour = blue\n")
    code, _, err = run(capsys, "inspect", "--config", str(cfg))
    assert code == 2 and "colour" in err


def test_train_is_deterministic(tmp_path, capsys, model):
    code, out, _ = run(capsys, "train", "--dataset", str(data_path("polarity.csv")), "--out", str(tmp_path))
    assert code == 0 and out["test_accuracy"] == 1.0 and out["n_train"] == 1400
    assert (tmp_path / "model.json").read_bytes() == model.read_bytes()


def test_usage_errors(capsys, model):
    assert run(capsys, "train", "--classifier", "svm", "--dataset", "x.csv")[0] == 2
    assert run(capsys, "explain", "--model", str(model), "   ")[0] == 2
    assert run(capsys, "explain", "--model", str(model), "--method", "magic", "x")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "explain", "--model", str(model), "--theta", "2", "x")[0] == 2


def test_resource_failure_exit_1(capsys, tmp_path):
    code, _, err = run(capsys, "explain", "--model", str(tmp_path / "none.json"), "good")
    assert code == 1 and "none.json" in err
    code, _, _ = run(capsys, "inspect", "--wordnet", str(tmp_path / "missing"))
    assert code == 1


def test_explain_single_edit(capsys, model):
    code, out, _ = run(capsys, "explain", "--model", str(model), "This is one of Polanski's best films.")
    assert code == 0
    assert out["original_label"] == "positive"
    cf = out["counterfactual"]
    assert cf["text"] == "This is one of Polanski's worst films."
    assert cf["label"] == "negative" and cf["levenshtein_tokens"] == 1
    assert "runtime_ms" in out["timing"]


def test_explain_sedc_masks(capsys, model):
    text = "honestly, the plot was good and the music seemed old. we see it frankly really."
    code, out, _ = run(capsys, "explain", "--model", str(model), "--method", "sedc", text)
    assert code == 0 and "MASK" in out["counterfactual"]["text"]
    assert out["counterfactual"]["label"] == "negative"


def test_explain_nothing_found_is_success(capsys, model):
    code, out, _ = run(capsys, "explain", "--model", str(model), "zzz qqq")
    assert code == 0 and out["counterfactual"] is None


def test_resource_root_env(tmp_path, capsys, monkeypatch, model):
    monkeypatch.setenv("TEXTCF_RESOURCES", str(model.parent))
    monkeypatch.chdir(tmp_path)
    code, out, _ = run(capsys, "inspect", "--model", "model.json")
    assert code == 0 and out["model"]["classes"] == ["negative", "positive"]


def test_inspect_bundled(capsys):
    code, out, _ = run(capsys, "inspect", "--dataset", str(data_path("polarity.csv")))
    assert out["wordnet"]["synsets"] == 42 and out["vectors"]["dim"] == 24
    assert out["dataset"] == {"rows": 2000, "class_counts": {"negative": 1000, "positive": 1000}}


def test_evaluate_outputs(tmp_path, capsys):
    code, out, _ = run(
        capsys, "evaluate", "--dataset", str(data_path("polarity.csv")), "--out", str(tmp_path),
        "--methods", "growing_net,sedc", "--n-targets", "10",
    )
    assert code == 0
    lines = (tmp_path / "records.jsonl").read_text().splitlines()
    assert len(lines) == 20
    report = json.loads((tmp_path / "report.json").read_text())
    for method, agg in report["methods"].items():
        found = [json.loads(l)["found"] for l in lines if json.loads(l)["method"] == method]
        assert agg["label_flip_rate"] == sum(found) / len(found) == out[method]
    assert report["config"]["explain"]["n"] == 2000
    assert (tmp_path / "table.csv").exists()


def test_sample_targets_seeded():
    from textcf.blackbox import LabeledCorpus
    from textcf.textcore import tokenize

    corpus = LabeledCorpus([tokenize(str(i)) for i in range(50)], [i % 2 for i in range(50)])
    a = sample_targets(corpus, 10, 42)
    assert [t for t, _ in a] == [t for t, _ in sample_targets(corpus, 10, 42)]
    assert len(sample_targets(corpus, 100, 42)) == 50


def test_runconfig_defaults():
    c = RunConfig()
    assert c.seed == 42 and c.explain_config().to_dict()["theta"] == 0.9


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "textcf", "inspect"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["wordnet"]["antonym_edges"] == 7
