"""Binary and text formats for PUF instances, CRP sets and run records.

Instance file (``.puf``), little-endian::

    magic  b"PUFF"      4 bytes
    version             u16
    n, k                u32, u32
    seed                u64
    delays              k * (n + 1) float64, chain-major

CRP file (``.crp``), little-endian::

    magic  b"CRPS"      4 bytes
    version             u16
    n, k                u32, u32
    instance_seed       u64
    sampling_seed       u64
    role                u8   (0 learning, 1 test)
    flags               u8   (bit 0 overlap_allowed, bit 1 phi block present)
    count               u64
    challenges          count * ceil(n / 8) bytes, rows bit-packed MSB first
    responses           ceil(count / 8) bytes, bit-packed MSB first
    phi (optional)      count * (n + 1) int8 in {-1, +1}

Run records are JSON with the best genotype stored as a base64 float64 block.
"""
import base64
import json
import os
import struct

import numpy as np

from .errors import FormatError, VersionError
from .puf import ROLES, CrpSet, PufInstance

PUF_MAGIC = b"PUFF"
CRP_MAGIC = b"CRPS"
FORMAT_VERSION = 1
RECORD_FORMAT = "pufattack-run"
RECORD_VERSION = 1

_PUF_HEADER = struct.Struct("<4sHIIQ")
_CRP_HEADER = struct.Struct("<4sHIIQQBBQ")
_FLAG_OVERLAP = 1
_FLAG_PHI = 2


def _atomic_write(path, data, mode="wb"):
    path = os.fspath(path)
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, mode) as fh:
        fh.write(data)
    os.replace(tmp, path)


def _take(buf, offset, size, what):
    if offset + size > len(buf):
        raise FormatError(f"truncated file: expected {size} bytes of {what}, {len(buf) - offset} available", offset)
    return buf[offset : offset + size], offset + size


def _check_head(magic, version, expected_magic):
    if magic != expected_magic:
        raise FormatError(f"bad magic {magic!r}, expected {expected_magic!r}", 0)
    if version != FORMAT_VERSION:
        raise VersionError(f"unsupported format version {version}, this build reads {FORMAT_VERSION}", 4)


def instance_to_bytes(instance):
    head = _PUF_HEADER.pack(PUF_MAGIC, FORMAT_VERSION, instance.n, instance.k, instance.seed)
    return head + instance.chains.astype("<f8").tobytes()


def instance_from_bytes(buf):
    raw, off = _take(buf, 0, _PUF_HEADER.size, "instance header")
    magic, version, n, k, seed = _PUF_HEADER.unpack(raw)
    _check_head(magic, version, PUF_MAGIC)
    payload, end = _take(buf, off, 8 * k * (n + 1), "delay payload")
    if end != len(buf):
        raise FormatError(f"{len(buf) - end} trailing bytes", end)
    chains = np.frombuffer(payload, dtype="<f8").reshape(k, n + 1).astype(np.float64)
    if not np.all(np.isfinite(chains)):
        raise FormatError("non-finite delay value", off)
    return PufInstance(n=n, k=k, seed=seed, chains=chains)


def save_instance(instance, path):
    _atomic_write(path, instance_to_bytes(instance))


def load_instance(path):
    with open(path, "rb") as fh:
        return instance_from_bytes(fh.read())


def crpset_to_bytes(crps, include_phi=False):
    flags = (_FLAG_OVERLAP if crps.overlap_allowed else 0) | (_FLAG_PHI if include_phi else 0)
    head = _CRP_HEADER.pack(
        CRP_MAGIC,
        FORMAT_VERSION,
        crps.n,
        crps.k,
        crps.instance_seed,
        crps.sampling_seed,
        ROLES.index(crps.role),
        flags,
        len(crps),
    )
    parts = [head, np.packbits(crps.challenges, axis=1).tobytes(), np.packbits(crps.responses).tobytes()]
    if include_phi:
        parts.append(crps.phi.astype(np.int8).tobytes())
    return b"".join(parts)


def crpset_from_bytes(buf):
    raw, off = _take(buf, 0, _CRP_HEADER.size, "CRP header")
    magic, version, n, k, iseed, sseed, role, flags, count = _CRP_HEADER.unpack(raw)
    _check_head(magic, version, CRP_MAGIC)
    if role >= len(ROLES):
        raise FormatError(f"unknown role code {role}", 30)
    if flags & ~(_FLAG_OVERLAP | _FLAG_PHI):
        raise FormatError(f"unknown flag bits {flags:#x}", 31)
    if n < 1 or k < 1:
        raise FormatError(f"invalid dimensions n={n}, k={k}", 6)
    row_bytes = (n + 7) // 8
    chunk, off2 = _take(buf, off, count * row_bytes, "challenge block")
    challenges = np.unpackbits(np.frombuffer(chunk, dtype=np.uint8).reshape(count, row_bytes), axis=1, count=n)
    chunk, off3 = _take(buf, off2, (count + 7) // 8, "response block")
    responses = np.unpackbits(np.frombuffer(chunk, dtype=np.uint8), count=count)
    phi = None
    end = off3
    if flags & _FLAG_PHI:
        chunk, end = _take(buf, off3, count * (n + 1), "feature block")
        block = np.frombuffer(chunk, dtype=np.int8).reshape(count, n + 1)
        if block.size and not np.all(np.abs(block) == 1):
            bad = int(np.flatnonzero(np.abs(block).reshape(-1) != 1)[0])
            raise FormatError("feature entries must be -1 or +1", off3 + bad)
        phi = block.astype(np.float64)
    if end != len(buf):
        raise FormatError(f"{len(buf) - end} trailing bytes", end)
    return CrpSet(
        n=n,
        k=k,
        instance_seed=iseed,
        role=ROLES[role],
        sampling_seed=sseed,
        challenges=challenges,
        responses=responses,
        phi=phi,
        overlap_allowed=bool(flags & _FLAG_OVERLAP),
    )


def save_crpset(crps, path, include_phi=False):
    _atomic_write(path, crpset_to_bytes(crps, include_phi=include_phi))


def load_crpset(path):
    with open(path, "rb") as fh:
        return crpset_from_bytes(fh.read())


def export_crpset_text(crps, path):
    """Write one CRP per line (challenge bits, space, response) under a ``#`` header."""
    lines = [
        f"# n={crps.n} k={crps.k} instance_seed={crps.instance_seed} role={crps.role} "
        f"sampling_seed={crps.sampling_seed} overlap_allowed={int(crps.overlap_allowed)} count={len(crps)}"
    ]
    rows = (crps.challenges + ord("0")).astype(np.uint8)
    for row, r in zip(rows, crps.responses):
        lines.append(f"{row.tobytes().decode('ascii')} {r}")
    _atomic_write(path, "\n".join(lines) + "\n", mode="w")


def import_crpset_text(path):
    with open(path) as fh:
        header = fh.readline()
        if not header.startswith("# "):
            raise FormatError("missing '# ' header line", 0)
        try:
            meta = dict(item.split("=", 1) for item in header[2:].split())
            n, k, count = int(meta["n"]), int(meta["k"]), int(meta["count"])
        except (KeyError, ValueError) as exc:
            raise FormatError(f"bad header: {exc}", 0) from None
        challenges = np.empty((count, n), dtype=np.uint8)
        responses = np.empty(count, dtype=np.uint8)
        for i in range(count):
            line = fh.readline().split()
            if len(line) != 2 or len(line[0]) != n or line[1] not in ("0", "1"):
                raise FormatError(f"bad CRP line {i + 2}")
            challenges[i] = np.frombuffer(line[0].encode("ascii"), dtype=np.uint8) - ord("0")
            responses[i] = int(line[1])
        if challenges.size and challenges.max() > 1:
            raise FormatError("challenge strings must contain only 0 and 1")
    return CrpSet(
        n=n,
        k=k,
        instance_seed=int(meta["instance_seed"]),
        role=meta["role"],
        sampling_seed=int(meta["sampling_seed"]),
        challenges=challenges,
        responses=responses,
        overlap_allowed=bool(int(meta["overlap_allowed"])),
    )


def encode_genes(genes):
    return base64.b64encode(np.asarray(genes, dtype="<f8").tobytes()).decode("ascii")


def decode_genes(text):
    return np.frombuffer(base64.b64decode(text), dtype="<f8").astype(np.float64)


def record_to_json(record):
    """Serialize a :class:`~pufattack.optimizers.RunRecord` (wall time excluded)."""
    doc = record.to_dict()
    doc.pop("wall_time", None)
    doc["best_genes"] = encode_genes(record.best_genes)
    doc = {"format": RECORD_FORMAT, "version": RECORD_VERSION, **doc}
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def record_from_json(text):
    from .optimizers.base import RunRecord

    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON record: {exc.msg}", exc.pos) from None
    if doc.get("format") != RECORD_FORMAT:
        raise FormatError(f"not a run record (format={doc.get('format')!r})", 0)
    if doc.get("version") != RECORD_VERSION:
        raise VersionError(f"unsupported record version {doc.get('version')}")
    doc.pop("format")
    doc.pop("version")
    doc["best_genes"] = decode_genes(doc["best_genes"])
    return RunRecord.from_dict(doc)


def save_record(record, path):
    _atomic_write(path, record_to_json(record), mode="w")


def load_record(path):
    with open(path) as fh:
        return record_from_json(fh.read())
