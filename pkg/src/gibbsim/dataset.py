"""Dataset persistence, generation and the external-processor bridge.

A dataset directory holds one tensor file per channel per sample plus a
line-delimited JSON manifest: a header line carrying the format version
and the full simulation config, then one record per sample in
generation order.  Sample records are also kept as per-sample sidecar
JSON files so interrupted generations can resume without recomputing.

Processors are external commands: they read a count-prefixed tensor
stream on stdin and must answer with an equal-count stream of real
``(H, W)`` outputs on stdout, exiting nonzero on failure.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import os
import shlex
import subprocess
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import tensorfile
from .errors import FormatError, ProcessorError
from .phase import PhaseModelParams
from .seeds import derive_seed
from .simulate import SampleMeta, SamplePair, SimConfig, simulate_pair

__all__ = [
    "MANIFEST_NAME",
    "FORMAT_VERSION",
    "write_sample",
    "read_sample",
    "generate_dataset",
    "load_manifest",
    "iter_samples",
    "validate_dataset",
    "run_processor",
    "CommandProcessor",
]

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.jsonl"
FORMAT_VERSION = 1

_IMAGE_EXTENSIONS = {".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff", ".gif", ".webp"}


def _config_to_dict(cfg: SimConfig) -> dict:
    d = dataclasses.asdict(cfg)
    d["noise_ratio_range"] = list(cfg.noise_ratio_range)
    return d


def _config_from_dict(d: dict) -> SimConfig:
    d = dict(d)
    phase = d.pop("phase_params")
    if phase.get("center_min") is not None:
        phase["center_min"] = tuple(phase["center_min"])
        phase["center_max"] = tuple(phase["center_max"])
    d["noise_ratio_range"] = tuple(d["noise_ratio_range"])
    return SimConfig(phase_params=PhaseModelParams(**phase), **d)


def _meta_to_record(meta: SampleMeta, sample_id: str, paths: dict) -> dict:
    return {
        "id": sample_id,
        "seed": meta.seed,
        "pf_fraction": meta.pf_fraction,
        "noise_ratio": meta.noise_ratio,
        "flags": {
            "flipped": meta.flipped,
            "transposed": meta.transposed,
            "no_phase": meta.no_phase,
            "no_ellipsoid": meta.no_ellipsoid,
        },
        **paths,
    }


def _meta_from_record(rec: dict) -> SampleMeta:
    flags = rec["flags"]
    return SampleMeta(
        seed=rec["seed"],
        pf_fraction=rec["pf_fraction"],
        noise_ratio=rec["noise_ratio"],
        flipped=flags["flipped"],
        transposed=flags["transposed"],
        no_phase=flags["no_phase"],
        no_ellipsoid=flags["no_ellipsoid"],
    )


def write_sample(pair: SamplePair, out_dir: str | os.PathLike, sample_id: str) -> dict:
    """Persist one sample's tensors; returns its manifest record."""
    out_dir = Path(out_dir)
    paths = {"input": f"{sample_id}_input.gbs", "target": f"{sample_id}_target.gbs"}
    tensorfile.save_tensor(out_dir / paths["input"], pair.input)
    tensorfile.save_tensor(out_dir / paths["target"], pair.target)
    if pair.companion is not None:
        paths["companion"] = f"{sample_id}_companion.gbs"
        tensorfile.save_tensor(out_dir / paths["companion"], pair.companion)
    else:
        paths["companion"] = None
    return _meta_to_record(pair.meta, sample_id, paths)


def read_sample(out_dir: str | os.PathLike, record: dict) -> SamplePair:
    """Load one sample back from its manifest record."""
    out_dir = Path(out_dir)
    companion = None
    if record.get("companion"):
        companion = tensorfile.load_tensor(out_dir / record["companion"])
    return SamplePair(
        input=tensorfile.load_tensor(out_dir / record["input"]),
        target=tensorfile.load_tensor(out_dir / record["target"]),
        meta=_meta_from_record(record),
        companion=companion,
    )


def _list_sources(source_dir: Path) -> list[Path]:
    files = sorted(
        p for p in source_dir.iterdir()
        if p.is_file() and p.suffix.lower() in _IMAGE_EXTENSIONS
    )
    if not files:
        raise ValueError(f"no decodable source images in {source_dir}")
    return files


def _load_photo(path: Path) -> np.ndarray | None:
    try:
        from PIL import Image

        with Image.open(path) as img:
            return np.asarray(img.convert("RGB"), dtype=np.float64) / 255.0
    except Exception:
        logger.warning("skipping undecodable source image %s", path)
        return None


def _sidecar_valid(out_dir: Path, sample_id: str) -> dict | None:
    sidecar = out_dir / f"{sample_id}.json"
    if not sidecar.exists():
        return None
    try:
        record = json.loads(sidecar.read_text())
        read_sample(out_dir, record)
        return record
    except (FormatError, OSError, KeyError, ValueError):
        return None


def generate_dataset(
    source_dir: str | os.PathLike,
    cfg: SimConfig,
    count: int,
    global_seed: int,
    out_dir: str | os.PathLike,
    workers: int = 1,
) -> Path:
    """Simulate ``count`` samples from the photos in ``source_dir``.

    Sample ``i`` uses seed ``derive_seed(global_seed, i)`` and the
    source image ``derive_seed(global_seed, i, 1) % n_sources`` (order
    of the sorted file listing), so output bytes depend only on
    ``(sources, cfg, count, global_seed)`` -- not on worker count or
    scheduling.  Existing valid samples are skipped, making generation
    resumable.  Returns the manifest path.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    source_dir = Path(source_dir)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    sources = _list_sources(source_dir)
    photos: dict[int, np.ndarray] = {}

    def photo_for(index: int) -> np.ndarray:
        src_idx = derive_seed(global_seed, index, 1) % len(sources)
        # Undecodable files fall through to the next index, deterministically.
        for probe in range(len(sources)):
            k = (src_idx + probe) % len(sources)
            if k not in photos:
                loaded = _load_photo(sources[k])
                if loaded is None:
                    continue
                photos[k] = loaded
            return photos[k]
        raise ValueError(f"no decodable source images in {source_dir}")

    def build(index: int) -> dict:
        sample_id = f"s{index:06d}"
        existing = _sidecar_valid(out_dir, sample_id)
        if existing is not None:
            return existing
        pair = simulate_pair(photo_for(index), cfg, derive_seed(global_seed, index))
        record = write_sample(pair, out_dir, sample_id)
        sidecar = out_dir / f"{sample_id}.json.tmp"
        sidecar.write_text(json.dumps(record, sort_keys=True))
        os.replace(sidecar, out_dir / f"{sample_id}.json")
        return record

    if workers > 1:
        # Decode sources up front: the photo cache is shared across threads.
        for i in range(count):
            photo_for(i)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(build, range(count)))
    else:
        records = [build(i) for i in range(count)]

    header = {
        "format_version": FORMAT_VERSION,
        "kind": "gibbsim-dataset",
        "count": count,
        "global_seed": global_seed,
        "config": _config_to_dict(cfg),
    }
    manifest = out_dir / MANIFEST_NAME
    tmp = out_dir / (MANIFEST_NAME + ".tmp")
    with open(tmp, "w") as fp:
        fp.write(json.dumps(header, sort_keys=True) + "\n")
        for rec in records:
            fp.write(json.dumps(rec, sort_keys=True) + "\n")
    os.replace(tmp, manifest)
    return manifest


def load_manifest(dataset_dir: str | os.PathLike) -> tuple[dict, list[dict]]:
    """Parse a dataset manifest into its header and sample records."""
    path = Path(dataset_dir) / MANIFEST_NAME
    if not path.exists():
        raise FormatError(f"no manifest at {path}")
    with open(path) as fp:
        lines = [line for line in fp.read().splitlines() if line.strip()]
    if not lines:
        raise FormatError(f"empty manifest at {path}")
    try:
        header = json.loads(lines[0])
        records = [json.loads(line) for line in lines[1:]]
    except json.JSONDecodeError as exc:
        raise FormatError(f"manifest is not valid JSONL: {exc}") from exc
    if header.get("format_version") != FORMAT_VERSION:
        raise FormatError(f"unsupported manifest version {header.get('format_version')}")
    return header, records


def manifest_config(header: dict) -> SimConfig:
    return _config_from_dict(header["config"])


def iter_samples(dataset_dir: str | os.PathLike):
    """Yield ``(record, SamplePair)`` for every sample in manifest order."""
    _, records = load_manifest(dataset_dir)
    for rec in records:
        yield rec, read_sample(dataset_dir, rec)


def validate_dataset(dataset_dir: str | os.PathLike) -> int:
    """Check manifest integrity and parse every referenced tensor.

    Returns the number of validated samples; raises FormatError on the
    first problem found.
    """
    header, records = load_manifest(dataset_dir)
    ids = [rec["id"] for rec in records]
    if len(set(ids)) != len(ids):
        raise FormatError("duplicate sample ids in manifest")
    if header.get("count") != len(records):
        raise FormatError(
            f"header count {header.get('count')} != {len(records)} records"
        )
    for rec in records:
        pair = read_sample(dataset_dir, rec)
        if pair.input.shape[-2:] != pair.target.shape[-2:]:
            raise FormatError(f"sample {rec['id']}: input/target shape mismatch")
    return len(records)


def run_processor(
    cmd: str | list[str], inputs: list[np.ndarray], timeout: float | None = None
) -> list[np.ndarray]:
    """Stream a batch through an external processor command.

    Writes a count-prefixed tensor stream to the command's stdin and
    expects the same count of real 2D tensors back, each matching the
    trailing (H, W) of its input.  Nonzero exit, malformed streams and
    shape mismatches raise ProcessorError.
    """
    if not inputs:
        return []
    argv = shlex.split(cmd) if isinstance(cmd, str) else list(cmd)
    payload = tensorfile.pack_stream(inputs)
    try:
        proc = subprocess.run(
            argv, input=payload, stdout=subprocess.PIPE, stderr=subprocess.PIPE,
            timeout=timeout,
        )
    except (OSError, subprocess.TimeoutExpired) as exc:
        raise ProcessorError(f"processor {argv[0]!r} failed to run: {exc}") from exc
    if proc.returncode != 0:
        tail = proc.stderr.decode(errors="replace")[-500:]
        raise ProcessorError(
            f"processor {argv[0]!r} exited with {proc.returncode}: {tail}"
        )
    try:
        outputs = tensorfile.unpack_stream(proc.stdout)
    except FormatError as exc:
        raise ProcessorError(f"processor {argv[0]!r} wrote a malformed stream: {exc}") from exc
    if len(outputs) != len(inputs):
        raise ProcessorError(
            f"processor returned {len(outputs)} tensors for {len(inputs)} inputs"
        )
    for i, (inp, out) in enumerate(zip(inputs, outputs)):
        if np.iscomplexobj(out) or out.ndim != 2 or out.shape != inp.shape[-2:]:
            raise ProcessorError(
                f"bad output shape/dtype at batch index {i}: "
                f"got {out.dtype} {out.shape}, expected real {inp.shape[-2:]}"
            )
    return outputs


class CommandProcessor:
    """Adapter giving an external command the in-process processor face."""

    def __init__(self, cmd: str | list[str], timeout: float | None = None):
        self.cmd = cmd
        self.timeout = timeout

    def __call__(self, inputs: list[np.ndarray]) -> list[np.ndarray]:
        outputs = run_processor(self.cmd, inputs, timeout=self.timeout)
        return [np.asarray(o, dtype=np.float64) for o in outputs]
