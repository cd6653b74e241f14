import json
from pathlib import Path

import pytest

import trackscope


@pytest.fixture(scope="module")
def ruleset():
    return trackscope.default_ruleset()


def test_registrable_domain(ruleset):
    assert ruleset.registrable_domain("images.example.com") == "example.com"
    assert ruleset.registrable_domain("www.bbc.co.uk") == "bbc.co.uk"
    assert ruleset.lookup("co.uk")["status"] == "public_suffix"
    assert ruleset.lookup("10.0.0.1")["status"] == "ip_literal"
    assert ruleset.snapshot_id.startswith("sha256:")


def test_classify_party(ruleset):
    assert trackscope.classify_party(ruleset, "example.com", "images.example.com") == "first_party"
    assert trackscope.classify_party(ruleset, "example.com", "google-analytics.com") == "third_party"


def test_elements():
    uri = "http://www.google-analytics.com/ga.js?SITEID=UA-1"
    assert trackscope.strip_arguments(uri) == "http://www.google-analytics.com/ga.js"
    assert trackscope.extension_class(uri) == ("javascript", "js")
    assert trackscope.extension_class("http://www.google-analytics.com/__utm.gif")[0] == "image"
    assert trackscope.categorize_tld("www.cdc.gov") == "gov"


def test_ownership():
    db = trackscope.default_ownership_db()
    assert db.resolve("2mdn.net") == "google"
    assert db.resolve("fbcdn.net") == "facebook"
    assert db.resolve("unknown-tracker.example") == "unattributed"


def test_leakage():
    lexicon = trackscope.default_lexicon()
    verdict = trackscope.detect_sensitive(
        "http://www.nhs.uk/conditions/breast-lump/pages/introduction.aspx", lexicon)
    assert verdict["sensitive"]
    assert "breast lump" in verdict["terms"]
    assert not trackscope.detect_sensitive(
        "http://www.ncbi.nlm.nih.gov/pubmed/21722252", lexicon)["sensitive"]


def test_sample_is_reproducible():
    first = trackscope.sample_indices(1000, 50, 7)
    assert first == trackscope.sample_indices(1000, 50, 7)
    assert len(set(first)) == 50
    assert len(trackscope.sample_indices(10, 50, 7)) == 10


def test_errors_carry_codes():
    with pytest.raises(trackscope.TrackscopeError) as info:
        trackscope.strip_arguments("not a uri")
    assert info.value.code == "MalformedUri"
    with pytest.raises(trackscope.TrackscopeError) as info:
        trackscope.describe_config({"settle_seconds": 90})
    assert info.value.code == "ConfigError"


def test_describe_config():
    text = trackscope.describe_config({"sample_n": 50})
    assert "sample_n=50 (flag)" in text


def test_fixture_pipeline(tmp_path: Path):
    layout = trackscope.write_fixture_corpus(tmp_path / "fixture")
    outcome = trackscope.run_pipeline(
        ["analyze", "report"],
        {
            "har_dir": layout["har_dir"],
            "ownership_db": layout["ownership_db"],
            "run_dir": tmp_path / "run",
        },
    )
    assert outcome["exit_code"] == 0, outcome["log"]
    summary = json.loads((tmp_path / "run" / "report" / "summary.json").read_text())
    overall = summary["prevalence"]["all"]
    assert overall["pct_third_party_requests"] == "91.00"
    assert summary["owner_ranking"]["owners"][0]["id"] == "google"
    assert summary["https_share"] == "3.24"

    direct = trackscope.summarize_hars(
        sorted(Path(layout["har_dir"]).glob("*.har"))[:5],
        ownership_db=trackscope.OwnershipDb.load(layout["ownership_db"]))
    assert direct["pages_total"] == 500


def test_pipeline_failure_is_reported(tmp_path: Path):
    outcome = trackscope.run_pipeline(
        ["analyze"], {"har_dir": tmp_path / "missing", "run_dir": tmp_path / "run"})
    assert outcome["exit_code"] != 0
    assert outcome["failure"].startswith("analyze:MissingInput")
