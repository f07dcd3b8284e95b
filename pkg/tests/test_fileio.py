import json
import struct

import numpy as np
import pytest

from pufattack import fileio
from pufattack.errors import FormatError, VersionError
from pufattack.optimizers import Budget, FunctionProblem, default_config, optimize
from pufattack.puf import generate_crp_set, sample_puf_instance


@pytest.fixture(scope="module")
def inst():
    return sample_puf_instance(64, 4, 12345678901234567890)


def test_instance_roundtrip(tmp_path, inst):
    p = tmp_path / "i.puf"
    fileio.save_instance(inst, p)
    back = fileio.load_instance(p)
    assert back == inst and back.seed == inst.seed
    assert p.read_bytes()[:4] == b"PUFF"


def test_instance_bytes_are_stable(tmp_path, inst):
    a = fileio.instance_to_bytes(inst)
    assert a == fileio.instance_to_bytes(sample_puf_instance(64, 4, inst.seed))
    assert len(a) == struct.calcsize("<4sHIIQ") + 8 * 4 * 65


@pytest.mark.parametrize("include_phi", [False, True])
def test_large_crpset_roundtrip(tmp_path, inst, include_phi):
    s = generate_crp_set(inst, 250_000, "learning", seed=3)
    p = tmp_path / "l.crp"
    fileio.save_crpset(s, p, include_phi=include_phi)
    assert fileio.load_crpset(p) == s


def test_flags_and_odd_widths_roundtrip(tmp_path):
    small = sample_puf_instance(7, 2, 1)
    learn = generate_crp_set(small, 200, "learning", seed=1)
    test = generate_crp_set(small, 13, "test", seed=2, forbidden=learn)
    assert test.overlap_allowed
    p = tmp_path / "t.crp"
    fileio.save_crpset(test, p)
    back = fileio.load_crpset(p)
    assert back == test and back.overlap_allowed and back.role == "test"


def test_text_export_roundtrip(tmp_path, inst):
    s = generate_crp_set(inst, 500, "test", seed=9)
    p = tmp_path / "t.txt"
    fileio.export_crpset_text(s, p)
    lines = p.read_text().splitlines()
    assert lines[0].startswith("# n=64 k=4")
    assert len(lines) == 501 and len(lines[1].split()[0]) == 64
    assert fileio.import_crpset_text(p) == s


def _crp_bytes():
    s = generate_crp_set(sample_puf_instance(16, 1, 0), 100, seed=0)
    return fileio.crpset_to_bytes(s, include_phi=True)


@pytest.mark.parametrize("cut", [0, 3, 20, 40, 100, 300])
def test_truncated_files_raise_with_offset(cut):
    buf = _crp_bytes()[:cut]
    with pytest.raises(FormatError) as err:
        fileio.crpset_from_bytes(buf)
    assert err.value.offset is not None and "offset" in str(err.value)


def test_truncated_instance(inst):
    buf = fileio.instance_to_bytes(inst)
    with pytest.raises(FormatError):
        fileio.instance_from_bytes(buf[:-1])
    with pytest.raises(FormatError):
        fileio.instance_from_bytes(buf + b"\0")


def test_version_and_magic_errors(inst):
    buf = bytearray(fileio.instance_to_bytes(inst))
    buf[4:6] = struct.pack("<H", 99)
    with pytest.raises(VersionError):
        fileio.instance_from_bytes(bytes(buf))
    buf = bytearray(_crp_bytes())
    buf[4:6] = struct.pack("<H", 2)
    with pytest.raises(VersionError):
        fileio.crpset_from_bytes(bytes(buf))
    with pytest.raises(FormatError):
        fileio.crpset_from_bytes(b"PUFF" + bytes(_crp_bytes()[4:]))
    with pytest.raises(FormatError):
        fileio.instance_from_bytes(_crp_bytes())


def test_bad_flags_and_phi_block():
    buf = bytearray(_crp_bytes())
    buf[31] = 0x80
    with pytest.raises(FormatError):
        fileio.crpset_from_bytes(bytes(buf))
    buf = bytearray(_crp_bytes())
    buf[-1] = 3
    with pytest.raises(FormatError):
        fileio.crpset_from_bytes(bytes(buf))


def test_malformed_text(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("no header\n")
    with pytest.raises(FormatError):
        fileio.import_crpset_text(p)
    p.write_text("# n=3 k=1 instance_seed=0 role=test sampling_seed=0 overlap_allowed=0 count=1\n01 1\n")
    with pytest.raises(FormatError):
        fileio.import_crpset_text(p)


def _record():
    prob = FunctionProblem(lambda x: float(np.sum(x**2)), 5)
    return optimize(prob, default_config("cmaes"), Budget(200), seed=4)


def test_record_roundtrip_is_exact(tmp_path):
    rec = _record()
    rec.test_errors, rec.test_total, rec.meta = 3, 1000, {"size": "1x4"}
    p = tmp_path / "r.rec"
    fileio.save_record(rec, p)
    back = fileio.load_record(p)
    assert back.same_outcome(rec)
    assert np.array_equal(back.best_genes, rec.best_genes)
    assert back.wall_time == 0.0
    doc = json.loads(p.read_text())
    assert doc["format"] == "pufattack-run" and "wall_time" not in doc


def test_record_file_independent_of_wall_time():
    a, b = _record(), _record()
    a.wall_time, b.wall_time = 1.0, 2.0
    assert fileio.record_to_json(a) == fileio.record_to_json(b)


def test_bad_records():
    with pytest.raises(FormatError):
        fileio.record_from_json("{")
    with pytest.raises(FormatError):
        fileio.record_from_json('{"format": "other"}')
    with pytest.raises(VersionError):
        fileio.record_from_json('{"format": "pufattack-run", "version": 7}')
