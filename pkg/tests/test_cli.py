"""End-to-end CLI coverage: encode/decode/profile/synth and exit codes."""

import json
import math
import pathlib

import jsonschema
import numpy as np
import pytest

from apax import ingest
from apax.cli import _parse_grid, dump_report_json, main
from apax.dtypes import Dtype
from apax.errors import InvalidSpec

SCHEMA = json.loads(
    (pathlib.Path(__file__).parents[1] / "docs" / "schema" /
     "profile_report.schema.json").read_text())


@pytest.fixture
def raw_i16(tmp_path):
    spec = ingest.SynthSpec("BandlimitedNoise", Dtype.I16, 32768, 28000, 4,
                            60.0, 0.0, 21)
    path = tmp_path / "in.raw"
    ingest.write_raw(ingest.synth(spec), ingest.RawDatasetSpec(str(path), Dtype.I16))
    return path


def test_encode_decode_round_trip(raw_i16, tmp_path, capsys):
    apx = tmp_path / "out.apx"
    back = tmp_path / "back.raw"
    assert main(["encode", str(raw_i16), str(apx), "--dtype", "i16",
                 "--mode", "lossless"]) == 0
    assert "ratio:" in capsys.readouterr().out
    assert main(["decode", str(apx), str(back)]) == 0
    assert back.read_bytes() == raw_i16.read_bytes()


def test_encode_lossy_prints_srr(raw_i16, tmp_path, capsys):
    apx = tmp_path / "out.apx"
    assert main(["encode", str(raw_i16), str(apx), "--dtype", "i16",
                 "--mode", "fixedquality", "--target", "50"]) == 0
    out = capsys.readouterr().out
    assert "ratio:" in out and "srr:" in out
    srr = float(out.split("srr:")[1].split("dB")[0])
    assert abs(srr - 50.0) <= 3.0


def test_profile_writes_valid_json(raw_i16, tmp_path, capsys):
    report_path = tmp_path / "r.json"
    assert main(["profile", str(raw_i16), "--dtype", "i16",
                 "--json", str(report_path), "--grid", "30:70:10",
                 "--block-size", "1024"]) == 0
    out = capsys.readouterr().out
    assert "recommended:" in out
    assert sum(1 for line in out.splitlines() if line.startswith(("mean_", "std_",
               "spectral_", "rms_", "srr_", "pearson_", "fft_", "two_"))) == 18
    report = json.loads(report_path.read_text())
    jsonschema.validate(report, SCHEMA)
    assert report["recommended"]["r"] >= 0.99999


def test_profile_json_is_byte_stable(raw_i16, tmp_path):
    args = ["profile", str(raw_i16), "--dtype", "i16", "--grid", "40:60:10",
            "--block-size", "1024"]
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert main(args + ["--json", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_synth_command(tmp_path):
    spec = ingest.SynthSpec("Constant", Dtype.I8, 256, 5.0, name="c")
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps(spec.to_dict()))
    out = tmp_path / "c.raw"
    assert main(["synth", str(spec_path), str(out)]) == 0
    assert np.all(np.fromfile(out, np.int8) == 5)


def test_lossless_floats_is_usage_error(raw_i16, tmp_path, capsys):
    code = main(["encode", str(raw_i16), str(tmp_path / "x.apx"),
                 "--dtype", "f32", "--mode", "lossless"])
    assert code == 1
    assert "lossless unsupported for floats" in capsys.readouterr().err


def test_missing_input_is_data_error(tmp_path, capsys):
    code = main(["encode", str(tmp_path / "absent.raw"),
                 str(tmp_path / "x.apx"), "--dtype", "i16"])
    assert code == 2


def test_corrupt_container_is_data_error(tmp_path):
    bad = tmp_path / "bad.apx"
    bad.write_bytes(b"JUNKJUNKJUNKJUNK" + bytes(16))
    assert main(["decode", str(bad), str(tmp_path / "y.raw")]) == 2


def test_unknown_flag_is_usage_error(capsys):
    assert main(["encode", "--bogus"]) == 1
    capsys.readouterr()


def test_parse_grid():
    assert _parse_grid("20:40:10") == [20.0, 30.0, 40.0]
    assert len(_parse_grid("20:120:5")) == 21
    with pytest.raises(InvalidSpec):
        _parse_grid("40:20:5")


def test_dump_report_json_nonfinite_to_null():
    out = dump_report_json({"b": math.inf, "a": [1.5, math.nan]})
    assert out == '{"a":[1.5,null],"b":null}'
