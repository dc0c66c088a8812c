"""On-disk layout of simulation results.

One directory per run, named ``seed<S>_<condition>``, holding

``raster.csv``
    ``t_ms,layer,neuron,event``; ``neuron`` is the index inside the layer
    (pyramidal or interneuron population) and ``event`` one of ``na``,
    ``ca``, ``inh``.
``outputs.txt``
    the associative output matrices.  One line per presentation:
    ``p l <hex>`` where ``<hex>`` is ``numpy.packbits`` of the 100x100
    matrix in row-major (neuron, ms) order, 1250 bytes as 2500 hex digits.
``weights_<stage>.txt``
    weight snapshots (initial, phase1, phase2), see
    :func:`spikebam.network.write_weights`.
``schedule.csv``
    presentation schedule ``phase,p,l,t0_ms`` (the replay log of the
    phase-2 orders).

Every file starts with ``#`` header lines carrying ``config_hash``, ``seed``
and ``condition``.
"""

from __future__ import annotations

from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import numpy as np

from . import network as net
from .engine import EVENT_NAMES, RunRecord
from .stimulus import PRESENTATION_MS, write_schedule



class StorageError(ValueError):
    pass


def run_dir_name(seed: int, condition: str) -> str:
    return f"seed{seed}_{condition}"


def record_header(record: RunRecord) -> List[str]:
    return [
        f"config_hash={record.config_hash}",
        f"seed={record.seed}",
        f"condition={record.condition}",
    ]


def read_header(path: Path) -> Dict[str, str]:
    """``key=value`` pairs from the leading ``#`` lines of ``path``."""
    meta: Dict[str, str] = {}
    with open(path) as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            body = line[1:].strip()
            if "=" in body and " " not in body.split("=", 1)[0]:
                key, value = body.split("=", 1)
                meta[key] = value
    return meta


def _write_header(fh, header: Sequence[str]) -> None:
    for line in header:
        fh.write(f"# {line}\n")


def write_raster(path: Path, record: RunRecord, header: Sequence[str]) -> None:
    names = np.array(net.LAYER_NAMES)
    ids = record.raster["neuron"]
    layer = names[ids // (2 * net.LAYER_SIZE)]
    index = ids % net.LAYER_SIZE
    events = np.array(EVENT_NAMES)[record.raster["event"]]
    with open(path, "w") as fh:
        _write_header(fh, header)
        fh.write("t_ms,layer,neuron,event\n")
        fh.writelines(
            f"{t},{lay},{j},{e}\n" for t, lay, j, e in zip(record.raster["t"].tolist(), layer, index.tolist(), events)
        )


def write_outputs(path: Path, outputs: np.ndarray, header: Sequence[str]) -> None:
    n_p, n_l = outputs.shape[:2]
    with open(path, "w") as fh:
        _write_header(fh, header)
        fh.write(f"# shape={n_p},{n_l},{outputs.shape[2]},{outputs.shape[3]}\n")
        for p in range(n_p):
            for l in range(n_l):
                fh.write(f"{p + 1} {l + 1} {np.packbits(outputs[p, l]).tobytes().hex()}\n")


def read_outputs(path: Path) -> np.ndarray:
    meta = read_header(path)
    if "shape" not in meta:
        raise StorageError(f"{path}: missing shape header")
    shape = tuple(int(x) for x in meta["shape"].split(","))
    out = np.zeros(shape, dtype=np.uint8)
    size = shape[2] * shape[3]
    seen = np.zeros(shape[:2], dtype=bool)
    with open(path) as fh:
        for n, line in enumerate(fh, 1):
            if line.startswith("#") or not line.strip():
                continue
            try:
                p, l, blob = line.split()
                bits = np.unpackbits(np.frombuffer(bytes.fromhex(blob), dtype=np.uint8))[:size]
                out[int(p) - 1, int(l) - 1] = bits.reshape(shape[2:])
                seen[int(p) - 1, int(l) - 1] = True
            except (ValueError, IndexError) as exc:
                raise StorageError(f"{path}:{n}: malformed output line ({exc})") from None
    if not seen.all():
        missing = np.argwhere(~seen)[0] + 1
        raise StorageError(f"{path}: missing presentation p={missing[0]} l={missing[1]}")
    return out


def save_record(record: RunRecord, out_dir: Path, replay_log: bool = True) -> Path:
    """Write every artifact of ``record`` below ``out_dir``; returns the run directory.

    ``replay_log=False`` skips the schedule file.
    """
    run_dir = Path(out_dir) / run_dir_name(record.seed, record.condition)
    run_dir.mkdir(parents=True, exist_ok=True)
    header = record_header(record)
    write_raster(run_dir / "raster.csv", record, header)
    write_outputs(run_dir / "outputs.txt", record.outputs, header)
    if replay_log:
        write_schedule(run_dir / "schedule.csv", record.schedule, header)
    for stage, snap in record.weights.items():
        net.write_weights(run_dir / f"weights_{stage}.txt", snap, header)
    return run_dir


def load_record(run_dir: Path) -> RunRecord:
    """Rebuild the parts of a :class:`RunRecord` analysis needs (outputs and identity)."""
    path = Path(run_dir) / "outputs.txt"
    if not path.exists():
        raise StorageError(f"{run_dir}: no outputs.txt")
    meta = read_header(path)
    try:
        seed, condition, h = int(meta["seed"]), meta["condition"], meta["config_hash"]
    except KeyError as exc:
        raise StorageError(f"{path}: header lacks {exc.args[0]}") from None
    return RunRecord(seed=seed, condition=condition, config_hash=h, outputs=read_outputs(path),
                     schedule=[], raster=np.zeros(0))


def find_runs(out_dir: Path) -> List[Path]:
    return sorted(p.parent for p in Path(out_dir).glob("seed*_*/outputs.txt"))


def load_runs(out_dir: Path, expected_hash: str | None = None) -> Tuple[List[RunRecord], str]:
    """Load every run below ``out_dir``; all must share one config hash."""
    records = [load_record(d) for d in find_runs(out_dir)]
    if not records:
        raise StorageError(f"{out_dir}: no run directories found")
    hashes = {r.config_hash for r in records}
    if expected_hash is not None:
        hashes.add(expected_hash)
    if len(hashes) != 1:
        raise StorageError(f"{out_dir}: runs come from different configurations ({', '.join(sorted(hashes))})")
    return records, hashes.pop()
