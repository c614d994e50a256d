import io
import json

import pandas as pd
import pytest

from app.exceptions import DomainError
from app.services.export import RecordWriter, meta_record


def test_meta_record_drops_unset_options():
    record = meta_record("count", "1,1,1,1", {"n": 4, "q": None, "m": 0})
    assert record["meta"]["command"] == "count"
    assert record["meta"]["spec"] == "1,1,1,1"
    assert record["meta"]["options"] == {"m": 0, "n": 4}
    assert "timestamp" in record["meta"]


def test_json_lines():
    stream = io.StringIO()
    with RecordWriter("json", stream=stream) as writer:
        writer.write_meta({"meta": {"command": "count"}})
        writer.write({"n": 1, "count": "0"})
        writer.write({"n": 2, "count": "1"})
    lines = stream.getvalue().splitlines()
    assert [json.loads(line) for line in lines] == [
        {"meta": {"command": "count"}},
        {"n": 1, "count": "0"},
        {"n": 2, "count": "1"},
    ]


def test_text_prefers_given_text():
    stream = io.StringIO()
    writer = RecordWriter("text", stream=stream)
    writer.write_meta({"meta": {}})
    writer.write({"term": "λ1"}, text="λ1")
    writer.write({"n": 3, "count": "1"})
    writer.close()
    assert stream.getvalue() == "λ1\nn=3 count=1\n"
    assert writer.count == 2


def test_csv_in_chunks():
    stream = io.StringIO()
    with RecordWriter("csv", stream=stream, chunk_size=2) as writer:
        writer.write_meta({"meta": {}})
        for n in range(5):
            writer.write({"n": n, "count": str(n * n)})
    lines = stream.getvalue().splitlines()
    assert lines[0] == "n,count"
    assert lines[1:] == [f"{n},{n * n}" for n in range(5)]


def test_xlsx(tmp_path):
    path = tmp_path / "counts.xlsx"
    with RecordWriter("xlsx", output_path=path) as writer:
        writer.write_frame(pd.DataFrame({"n": [1, 2], "count": ["0", "1"]}))
    frame = pd.read_excel(path, engine="openpyxl")
    assert list(frame.columns) == ["n", "count"]
    assert frame["n"].tolist() == [1, 2]


def test_output_file(tmp_path):
    path = tmp_path / "records.json"
    with RecordWriter("json", output_path=path) as writer:
        writer.write({"bits": "0010"})
    assert json.loads(path.read_text(encoding="utf-8")) == {"bits": "0010"}


def test_rejects_bad_configurations(tmp_path):
    with pytest.raises(DomainError):
        RecordWriter("yaml")
    with pytest.raises(DomainError):
        RecordWriter("xlsx")
