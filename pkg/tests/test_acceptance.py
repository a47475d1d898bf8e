"""Acceptance suite: one test per criterion, one PASS line per criterion.

Run with `pytest tests/test_acceptance.py -v -s`.
"""

from __future__ import annotations

import random
import time

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from matcontrib.api import create_app
from matcontrib.mgc import main as mgc_main
from matcontrib.mpfile import parse, serialize
from matcontrib.pipeline import clean_table, make_contribution, split
from matcontrib.store import Store

from faults import run_fault_injection
from gen import random_doc
from identifier_cases import CASES

KEYS = {"demo-key": "demo", "other-key": "other"}


def _report(name: str):
    print(f"\nACCEPTANCE {name}: PASS")


@pytest.fixture
def client(tmp_path):
    with TestClient(create_app(tmp_path / "data", api_keys=KEYS)) as client:
        yield client


def _submit(client, text, key="demo-key"):
    return client.post(
        "/api/v1/contributions",
        content=text.encode("utf-8"),
        headers={"X-API-Key": key, "Content-Type": "text/plain; charset=utf-8"},
    )


# 1 ------------------------------------------------------------------------------


def test_golden_parse(sample_text):
    start = time.perf_counter()
    doc = parse(sample_text)
    elapsed = time.perf_counter() - start
    assert elapsed < 0.05, f"parse took {elapsed * 1000:.1f} ms"

    assert len(doc.roots) == 2
    mp1, mp2 = doc.roots
    assert [c.name for c in mp1.children] == [
        "physical properties",
        "references",
        "plots",
        "table 1",
        "table 2",
    ]
    assert len(mp1.child("physical properties").kv) == 6
    assert len(mp1.child("references").kv) == 2
    plots = mp1.child("plots")
    assert len(plots.children) == 1
    assert len(plots.children[0].kv) == 4
    assert mp1.child("table 1").table.shape == (2, 6)
    assert mp1.child("table 2").table.shape == (3, 3)
    assert mp2.table.shape == (2, 6)
    _report("golden parse of the two-material sample")


# 2 ------------------------------------------------------------------------------


def test_round_trip_property(sample_text):
    failures = 0
    docs = [parse(sample_text)]
    rng = random.Random(20160229)
    docs += [random_doc(rng) for _ in range(200)]
    for doc in docs:
        canonical = serialize(doc)
        if parse(canonical) != doc or serialize(parse(canonical)) != canonical:
            failures += 1
    assert failures == 0
    _report(f"round-trip fixed point on {len(docs)} documents")


# 3 ------------------------------------------------------------------------------


def test_pipeline_split(sample_text):
    drafts = split(parse(sample_text), "demo")
    assert [d.material_key for d in drafts] == ["mp-1", "mp-2"]

    shared_fixture = (
        ">>> general\nlab: ALS\ninstrument: beamline 8\n"
        ">>> MP-1\n>>>> general\nlab: LBL\n>>>> readings\nk: 1\n"
        ">>> MP-2\nnote: none\n"
    )
    drafts = split(parse(shared_fixture), "demo")

    def reference_merge(a, b):
        out = dict(a)
        for key, value in b.items():
            if key in out and isinstance(out[key], dict) and isinstance(value, dict):
                out[key] = reference_merge(out[key], value)
            else:
                out[key] = value
        return out

    shared = {"lab": "ALS", "instrument": "beamline 8"}
    assert drafts[0].tree == reference_merge(
        shared, reference_merge({"readings": {"k": "1"}}, {"lab": "LBL"})
    )
    assert drafts[1].tree == reference_merge(shared, {"note": "none"})
    _report("pipeline split with shared-general precedence")


# 4 ------------------------------------------------------------------------------


def test_plot_rules(client, sample_text):
    assert _submit(client, sample_text).status_code == 201
    headers = {"X-API-Key": "demo-key"}

    mp1 = client.get("/api/v1/materials/mp-1", headers=headers).json()
    plots = mp1["projects"]["demo"][0]["plots"]
    assert len(plots) == 2

    line = next(p for p in plots if p["layout"]["kind"] == "line")
    assert line["series"] == [
        {
            "name": "vapor pressure",
            "x": [418, 469, 534, 623, 750, 940],
            "y": [1, 10, 100, 1000, 10000, 100000],
        }
    ]

    bar = next(p for p in plots if p["layout"]["kind"] == "bar")
    assert bar["series"] == [
        {
            "name": "ionization energy",
            "x": ["6s1/2", "5p3/2", "5p1/2"],
            "y": [375.7, 2234.3, 3400],
        }
    ]

    mp2 = client.get("/api/v1/materials/mp-2", headers=headers).json()
    assert len(mp2["projects"]["demo"][0]["plots"]) == 1
    _report("plot rules on the sample data")


# 5 ------------------------------------------------------------------------------


def test_end_to_end_resubmission(tmp_path, sample_text, live_server):
    path = tmp_path / "sample.mpfile"
    path.write_text(sample_text, encoding="utf-8")
    runner = CliRunner()
    args = ["submit", str(path), "--api-url", live_server, "--api-key", "demo-key"]

    first = runner.invoke(mgc_main, args)
    assert first.exit_code == 0, first.output
    rows = [line.split("\t") for line in first.output.strip().splitlines()]
    assert [r[2] for r in rows] == ["created", "created"]

    rewritten = path.read_text()
    assert rewritten.count("\ncid: ") == 2
    drafts = split(parse(rewritten), "demo")
    cids = [d.cid for d in drafts]
    assert [c[:7] for c in cids] == [r[0] for r in rows]

    import requests

    hashes_before = [
        requests.get(
            f"{live_server}/api/v1/contributions/{cid}",
            headers={"X-API-Key": "demo-key"},
        ).json()["content_hash"]
        for cid in cids
    ]

    second = runner.invoke(mgc_main, args)
    assert second.exit_code == 0, second.output
    rows2 = [line.split("\t") for line in second.output.strip().splitlines()]
    assert [r[2] for r in rows2] == ["updated", "updated"]
    assert [r[0] for r in rows2] == [r[0] for r in rows]

    hashes_after = [
        requests.get(
            f"{live_server}/api/v1/contributions/{cid}",
            headers={"X-API-Key": "demo-key"},
        ).json()["content_hash"]
        for cid in cids
    ]
    assert hashes_after == hashes_before
    _report("end-to-end resubmission with cid embedding")


# 6 ------------------------------------------------------------------------------


def test_customization_preservation(client, sample_text):
    results = _submit(client, sample_text).json()
    cid = results[0]["cid"]
    headers = {"X-API-Key": "demo-key"}

    plots = client.get("/api/v1/materials/mp-1", headers=headers).json()["projects"][
        "demo"
    ][0]["plots"]
    bar = next(p for p in plots if p["layout"]["kind"] == "bar")

    patched = client.patch(
        f"/api/v1/contributions/{cid}",
        json={
            "plot_customized": {
                "plot_id": bar["plot_id"],
                "layout": {"title": "Ionization ladder"},
            }
        },
        headers=headers,
    )
    assert patched.status_code == 200

    edited_text = sample_text.replace("1,375.7,6s1/2", "1,380.1,6s1/2")
    lines = edited_text.split("\n")
    out = []
    it = iter(r["cid"] for r in results)
    for line in lines:
        out.append(line)
        if line.startswith(">>> ") and not line.startswith(">>>>"):
            out.append(f"cid: {next(it)}")
    assert _submit(client, "\n".join(out)).status_code == 201

    plots = client.get("/api/v1/materials/mp-1", headers=headers).json()["projects"][
        "demo"
    ][0]["plots"]
    new_bar = next(p for p in plots if p["plot_id"] == bar["plot_id"])
    assert new_bar["layout"]["title"] == "Ionization ladder"
    assert new_bar["layout"]["kind"] == "bar"
    assert new_bar["series"][0]["y"] == [380.1, 2234.3, 3400]
    _report("plot customization preserved across a data edit")


# 7 ------------------------------------------------------------------------------


def test_query_contract(tmp_path, sample_text):
    store = Store(tmp_path / "data")
    for i, draft in enumerate(split(parse(sample_text), "demo"), start=1):
        draft.tables = {k: clean_table(t) for k, t in draft.tables.items()}
        store.put_contribution(make_contribution(draft, f"{i:024x}"))

    hits = store.query(key_path="physical properties.melting point")
    assert len(hits) == 1 and hits[0].material_key == "mp-1"

    hits = store.query(material="mp-2")
    assert len(hits) == 1 and hits[0].material_key == "mp-2"
    _report("query contract (key path and material filters)")


# 8 ------------------------------------------------------------------------------


def test_crash_durability(tmp_path):
    observed = run_fault_injection(tmp_path / "data", faults=100)
    assert observed >= 90  # nearly every fault left a whole record behind
    _report("crash durability across 100 injected faults")


# 9 ------------------------------------------------------------------------------


def test_identifier_suite():
    from matcontrib.identifier import canonical_key, classify

    assert len(CASES) == 20
    agreement = 0
    for title, expected in CASES:
        if isinstance(expected, type) and issubclass(expected, Exception):
            with pytest.raises(expected):
                classify(title)
        else:
            assert classify(title) == expected, title
        agreement += 1
    assert agreement == 20
    assert canonical_key(classify("Fe2O4")) == "FeO2"
    _report("identifier suite, 20/20 agreement")


# 10 -----------------------------------------------------------------------------


def _text_of_size(target_kib: int) -> str:
    header = ">>> MP-7\nindex,value\n"
    rows = []
    size = len(header)
    i = 0
    while size < target_kib * 1024:
        i += 1
        row = f"{i},{1000000000 + i}\n"
        rows.append(row)
        size += len(row)
    return header + "".join(rows)


def test_size_policy(client):
    ok = _submit(client, _text_of_size(150))
    assert ok.status_code == 201
    assert "warnings" not in ok.json()[0]

    warn = _submit(client, _text_of_size(500))
    assert warn.status_code == 201
    assert warn.json()[0].get("warnings")

    reject = _submit(client, _text_of_size(2048))
    assert reject.status_code == 413
    _report("size policy thresholds (ok / warning / reject)")
