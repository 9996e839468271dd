"""Per-element weight samples and their persistence.

A sample matrix is never stored in full for large instances. The manifest
records what is needed to regenerate it bit-exactly (seed, generator,
model parameters, t_sp) plus a checksum of row 0 to detect a mismatch.
"""
import logging
import struct
from dataclasses import dataclass
from typing import Dict

import numpy as np
from dotenv import dotenv_values

from ccpareto.exceptions import SampleManifestError
from ccpareto.services.weight_model import WeightModel, WeightKind
from ccpareto.utils.rng import GENERATOR_ID, fnv1a64, make_generator

logger = logging.getLogger(__name__)

MANIFEST_VERSION = 1
DUMP_MAGIC = b"CCSM"
DUMP_VERSION = 1
DUMP_HEADER = struct.Struct("<4sIQQQ")
MAX_DUMP_ENTRIES = 1_000_000


@dataclass(frozen=True)
class SampleMatrix:
    """rows[i, j] is the j-th sampled weight of element i."""
    rows: np.ndarray
    seed: int

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def t_sp(self) -> int:
        return self.rows.shape[1]


def generate_samples(model: WeightModel, t_sp: int, seed: int) -> SampleMatrix:
    """Draw t_sp samples of every element from its own keyed stream."""
    if t_sp < 1:
        raise ValueError("t_sp must be at least 1")

    d = model.dispersion
    rows = np.empty((model.n, t_sp), dtype=np.float64)
    for i in range(model.n):
        u = make_generator(seed, i).random(t_sp)
        rows[i] = (model.expected[i] - d) + 2.0 * d * u

    return SampleMatrix(rows=rows, seed=seed)


def row0_checksum(matrix: SampleMatrix) -> int:
    return fnv1a64(matrix.rows[0].astype("<f8").tobytes())


def write_manifest(path: str, model: WeightModel, matrix: SampleMatrix) -> Dict[str, str]:
    manifest = {
        "version": str(MANIFEST_VERSION),
        "kind": model.kind.value,
        "n": str(model.n),
        "d": repr(model.dispersion),
        "t_sp": str(matrix.t_sp),
        "seed": str(matrix.seed),
        "generator": GENERATOR_ID,
        "row0_checksum": f"{row0_checksum(matrix):016x}",
    }
    with open(path, "w", encoding="utf-8") as f:
        for key, value in manifest.items():
            f.write(f"{key}={value}\n")

    logger.info(f"Sample manifest written: {path} (n={model.n}, t_sp={matrix.t_sp}, seed={matrix.seed})")
    return manifest


def read_manifest(path: str) -> Dict[str, str]:
    manifest = dotenv_values(path)
    missing = {"version", "kind", "n", "d", "t_sp", "seed", "generator", "row0_checksum"} - set(manifest)
    if missing:
        raise SampleManifestError(f"{path}: missing keys {sorted(missing)}")
    return manifest


def load_samples(path: str, model: WeightModel) -> SampleMatrix:
    """Regenerate the matrix described by a manifest and check it matches."""
    manifest = read_manifest(path)

    if int(manifest["version"]) != MANIFEST_VERSION:
        raise SampleManifestError(f"{path}: unsupported manifest version {manifest['version']}")
    if manifest["generator"] != GENERATOR_ID:
        raise SampleManifestError(f"{path}: generator {manifest['generator']} is not {GENERATOR_ID}")
    if WeightKind(manifest["kind"]) != model.kind or int(manifest["n"]) != model.n:
        raise SampleManifestError(f"{path}: manifest is for a {manifest['kind']} model with n={manifest['n']}")
    if float(manifest["d"]) != model.dispersion:
        raise SampleManifestError(f"{path}: dispersion {manifest['d']} does not match model d={model.dispersion}")

    matrix = generate_samples(model, int(manifest["t_sp"]), int(manifest["seed"]))
    checksum = f"{row0_checksum(matrix):016x}"
    if checksum != manifest["row0_checksum"].lower():
        raise SampleManifestError(f"{path}: row 0 checksum {checksum} != {manifest['row0_checksum']}")

    logger.info(f"Sample manifest verified: {path}")
    return matrix


def write_dump(path: str, matrix: SampleMatrix):
    if matrix.n * matrix.t_sp > MAX_DUMP_ENTRIES:
        raise ValueError(f"full dump is limited to {MAX_DUMP_ENTRIES} entries, matrix has {matrix.n * matrix.t_sp}")

    with open(path, "wb") as f:
        f.write(DUMP_HEADER.pack(DUMP_MAGIC, DUMP_VERSION, matrix.n, matrix.t_sp, matrix.seed))
        f.write(matrix.rows.astype("<f8").tobytes())


def read_dump(path: str) -> SampleMatrix:
    with open(path, "rb") as f:
        header = f.read(DUMP_HEADER.size)
        payload = f.read()

    if len(header) != DUMP_HEADER.size:
        raise SampleManifestError(f"{path}: truncated header")
    magic, version, n, t_sp, seed = DUMP_HEADER.unpack(header)
    if magic != DUMP_MAGIC or version != DUMP_VERSION:
        raise SampleManifestError(f"{path}: not a sample dump (magic={magic!r}, version={version})")
    if len(payload) != 8 * n * t_sp:
        raise SampleManifestError(f"{path}: expected {8 * n * t_sp} payload bytes, found {len(payload)}")

    rows = np.frombuffer(payload, dtype="<f8").astype(np.float64).reshape(n, t_sp)
    return SampleMatrix(rows=rows, seed=seed)
