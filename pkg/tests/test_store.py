from __future__ import annotations

import json

import pytest

from matcontrib import errors
from matcontrib.builder import build_material
from matcontrib.mpfile import parse
from matcontrib.pipeline import Contribution, clean_table, make_contribution, split
from matcontrib.store import Store


def _contributions(sample_text, project="demo"):
    drafts = split(parse(sample_text), project)
    out = []
    for i, draft in enumerate(drafts, start=1):
        draft.tables = {k: clean_table(t) for k, t in draft.tables.items()}
        out.append(
            make_contribution(draft, f"{i:024x}", now=f"2016-01-0{i}T00:00:00+00:00")
        )
    return out


@pytest.fixture
def store(tmp_path):
    return Store(tmp_path / "data")


# -- CRUD --------------------------------------------------------------------


def test_put_get_roundtrip(store, sample_text):
    c = _contributions(sample_text)[0]
    version = store.put_contribution(c)
    assert version == 1
    assert store.get_contribution(c.cid) == c


def test_get_missing(store):
    with pytest.raises(errors.NotFound):
        store.get_contribution("f" * 24)


def test_delete(store, sample_text):
    c = _contributions(sample_text)[0]
    store.put_contribution(c)
    assert store.delete_contribution(c.cid) is True
    assert store.delete_contribution(c.cid) is False
    with pytest.raises(errors.NotFound):
        store.get_contribution(c.cid)


def test_put_twice_bumps_version(store, sample_text):
    c = _contributions(sample_text)[0]
    assert store.put_contribution(c) == 1
    c.visibility = "public"
    assert store.put_contribution(c) == 2
    assert store.get_contribution(c.cid).visibility == "public"


# -- query --------------------------------------------------------------------


def test_query_key_path(store, sample_text):
    for c in _contributions(sample_text):
        store.put_contribution(c)
    hits = store.query(key_path="physical properties.melting point")
    assert [c.material_key for c in hits] == ["mp-1"]


def test_query_material(store, sample_text):
    for c in _contributions(sample_text):
        store.put_contribution(c)
    hits = store.query(material="mp-2")
    assert len(hits) == 1 and hits[0].material_key == "mp-2"


def test_query_project_and_visibility(store, sample_text):
    a, b = _contributions(sample_text)
    b.visibility = "public"
    store.put_contribution(a)
    store.put_contribution(b)
    assert store.query(project="nobody") == []
    assert len(store.query(project="demo")) == 2
    assert [c.cid for c in store.query(visibility="public")] == [b.cid]
    assert store.query(project="demo", visibility="private")[0].cid == a.cid


def test_query_ordered_by_created_at(store, sample_text):
    a, b = _contributions(sample_text)
    store.put_contribution(b)  # later created_at, inserted first
    store.put_contribution(a)
    assert [c.cid for c in store.query(project="demo")] == [a.cid, b.cid]


def test_query_union_covers_collection(store, sample_text):
    cs = _contributions(sample_text)
    for c in cs:
        store.put_contribution(c)
    union = set()
    for key in {c.material_key for c in cs}:
        union |= {c.cid for c in store.query(material=key)}
    assert union == {c.cid for c in cs}


# -- derived documents -------------------------------------------------------------


def test_derived_crud_and_listing(store, sample_text):
    cs = _contributions(sample_text)
    for c in cs:
        store.put_contribution(c)
        store.put_derived(build_material(c.material_key, [c]))
    assert store.list_materials() == ["mp-1", "mp-2"]
    assert store.list_projects() == ["demo"]
    doc = store.get_derived("mp-1")
    assert doc.material_key == "mp-1"
    with pytest.raises(errors.NotFound):
        store.get_derived("mp-9")
    assert store.delete_derived("mp-1") is True
    assert store.list_materials() == ["mp-2"]


# -- durability ----------------------------------------------------------------------


def test_reopen_preserves_records(tmp_path, sample_text):
    c = _contributions(sample_text)[0]
    Store(tmp_path / "data").put_contribution(c)
    reopened = Store(tmp_path / "data")
    assert reopened.get_contribution(c.cid) == c


def test_index_rebuilt_when_missing(tmp_path, sample_text):
    data = tmp_path / "data"
    c = _contributions(sample_text)[0]
    Store(data).put_contribution(c)
    (data / "contributions.idx").unlink()
    reopened = Store(data)
    assert [x.cid for x in reopened.all_contributions()] == [c.cid]


def test_corrupt_record_detected(tmp_path, sample_text):
    data = tmp_path / "data"
    store = Store(data)
    c = _contributions(sample_text)[0]
    store.put_contribution(c)
    path = data / "contributions" / f"{c.cid}.json"
    record = json.loads(path.read_text())
    record["body"]["project"] = "tampered"
    path.write_text(json.dumps(record))
    with pytest.raises(errors.Corrupt):
        store.get_contribution(c.cid)


def test_leftover_tmp_files_ignored(tmp_path, sample_text):
    data = tmp_path / "data"
    store = Store(data)
    c = _contributions(sample_text)[0]
    store.put_contribution(c)
    junk = data / "contributions" / f".{c.cid}.partial.tmp"
    junk.write_text('{"torn":')
    reopened = Store(data)
    assert reopened.get_contribution(c.cid) == c
    assert [x.cid for x in reopened.all_contributions()] == [c.cid]


def test_concurrent_writers_and_readers(tmp_path, sample_text):
    import threading

    store = Store(tmp_path / "data")
    template = _contributions(sample_text)[0]
    errors_seen = []

    def writer(worker):
        try:
            for i in range(25):
                c = Contribution(**{**template.__dict__, "cid": f"{worker:012x}{i:012x}"})
                store.put_contribution(c)
        except Exception as exc:  # surfaced after join
            errors_seen.append(exc)

    def reader():
        try:
            for _ in range(50):
                for c in store.all_contributions():
                    assert c.cid  # record is whole
        except Exception as exc:
            errors_seen.append(exc)

    threads = [threading.Thread(target=writer, args=(w,)) for w in range(8)]
    threads += [threading.Thread(target=reader) for _ in range(2)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert errors_seen == []
    assert len(store.all_contributions()) == 8 * 25


def test_crash_durability_smoke(tmp_path):
    """A few kill-mid-write faults; the acceptance suite runs the full 100."""
    from faults import run_fault_injection

    run_fault_injection(tmp_path / "data", faults=5)
