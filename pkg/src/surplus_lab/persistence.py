"""Run manifests, deterministic text serialization, and save/load round trips.

All outputs are text: JSON for structures, CSV for data.  Floats are written
with 17 significant digits and rows in a fixed order, so replaying a run
with the same seed reproduces byte-identical files.  Every CLI run writes a
manifest recording the seed, command, parameters, and the SHA-256 digest of
each output file; replaying a manifest re-runs the command and compares
digests.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .maps import RootedMap
from .samplers import WeightedEnsemble

SCHEMA_VERSION = 1


class PersistenceError(ValueError):
    """Schema mismatch, digest mismatch, or malformed stored data."""


def fmt(x) -> str:
    """Fixed 17-significant-digit decimal form for bit-stable CSV output."""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return format(x, ".17g")
    import numpy as np

    if isinstance(x, np.integer):
        return str(int(x))
    if isinstance(x, np.floating):
        return format(float(x), ".17g")
    return str(x)


def write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def read_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    text = path.read_text().strip("\n").split("\n")
    header = text[0].split(",")
    return header, [line.split(",") for line in text[1:]]


def sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


@dataclass
class RunManifest:
    seed: int
    command: str
    parameters: dict
    version: str
    started: str
    finished: str = ""
    argv: list = field(default_factory=list)
    outputs: dict = field(default_factory=dict)

    def record_output(self, path: Path) -> None:
        self.outputs[path.name] = sha256_file(path)

    def save(self, path: Path) -> None:
        path.write_text(json.dumps({"schema": SCHEMA_VERSION, **asdict(self)},
                                   indent=2, sort_keys=True) + "\n")


def new_manifest(seed: int, command: str, parameters: dict,
                 argv: list | None = None) -> RunManifest:
    from . import __version__

    return RunManifest(seed=seed, command=command, parameters=parameters,
                       version=__version__, started=_now(), argv=list(argv or []))


def _now() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime())


def load_manifest(path: Path) -> RunManifest:
    data = json.loads(path.read_text())
    if data.pop("schema", None) != SCHEMA_VERSION:
        raise PersistenceError(f"unsupported manifest schema in {path}")
    return RunManifest(**data)


def verify_outputs(manifest: RunManifest, directory: Path) -> None:
    """Raise unless every recorded output file matches its stored digest."""
    for name, digest in manifest.outputs.items():
        target = directory / name
        if not target.exists():
            raise PersistenceError(f"missing output file {name}")
        actual = sha256_file(target)
        if actual != digest:
            raise PersistenceError(f"digest mismatch for {name}: {actual} != {digest}")


def replay(manifest_path: Path, scratch: Path) -> RunManifest:
    """Re-run the command recorded in a manifest and compare output digests.

    The replay executes into ``scratch`` and raises on any digest mismatch
    against the stored manifest, which is the reproducibility contract:
    same seed, same bytes.
    """
    from .cli import main

    manifest = load_manifest(manifest_path)
    if not manifest.argv:
        raise PersistenceError("manifest records no argv to replay")
    argv = list(manifest.argv)
    if "--out" in argv:
        argv[argv.index("--out") + 1] = str(scratch)
    else:
        argv += ["--out", str(scratch)]
    main(argv)
    replay_manifest = load_manifest(scratch / "manifest.json")
    if set(replay_manifest.outputs) != set(manifest.outputs):
        raise PersistenceError("replay produced a different output file set")
    for name, digest in manifest.outputs.items():
        if replay_manifest.outputs[name] != digest:
            raise PersistenceError(f"digest mismatch on replay for {name}")
    return replay_manifest


# -- maps ---------------------------------------------------------------------


def save_map(m: RootedMap, path: Path) -> None:
    path.write_text(json.dumps(m.to_json_dict(), indent=2, sort_keys=True) + "\n")


def load_map(path: Path) -> RootedMap:
    data = json.loads(path.read_text())
    if data.get("schema") != SCHEMA_VERSION:
        raise PersistenceError(f"unsupported map schema in {path}")
    try:
        return RootedMap.from_json_dict(data)
    except ValueError as exc:
        raise PersistenceError(str(exc)) from exc


# -- ensembles -----------------------------------------------------------------


def save_ensemble(ens: WeightedEnsemble, path: Path) -> None:
    write_csv(path, ens.csv_header(), ens.csv_rows())


def ensemble_meta(ens: WeightedEnsemble) -> dict:
    return {
        "n": ens.n,
        "mode": ens.mode,
        "tilt": ens.tilt,
        "proposal": ens.proposal,
        "seed": ens.seed,
        "stream": list(ens.stream),
        "reps": ens.reps,
        "ess": ens.ess(),
    }


def load_ensemble(path: Path, meta: dict | None = None) -> WeightedEnsemble:
    import numpy as np

    header, rows = read_csv(path)
    if header[:2] != ["replicate", "weight"]:
        raise PersistenceError(f"not an ensemble CSV: {path}")
    data = np.array([[float(v) for v in row] for row in rows])
    meta = meta or {}
    # columns with suffix _k re-assemble into one matrix column group
    groups: dict[str, list[int]] = {}
    for idx, name in enumerate(header[2:], start=2):
        base = name.rsplit("_", 1)[0] if name.rsplit("_", 1)[-1].isdigit() else name
        groups.setdefault(base, []).append(idx)
    columns = {}
    for base, idxs in groups.items():
        block = data[:, idxs]
        columns[base] = block[:, 0] if len(idxs) == 1 else block
    return WeightedEnsemble(
        n=int(meta.get("n", 0)),
        mode=str(meta.get("mode", "?")),
        tilt=int(meta.get("tilt", 0)),
        proposal=str(meta.get("proposal", "?")),
        seed=int(meta.get("seed", 0)),
        stream=tuple(meta.get("stream", ())),
        weights=data[:, 1],
        columns=columns,
    )
