"""Plain-directory analysis store with content fingerprints.

Each artifact lives in its own directory with a manifest recording the
fingerprints of everything it was computed from; an artifact is fresh when
its recorded input fingerprints match the current ones. Writes go through
a temporary directory and a rename so partial artifacts are never visible.
"""

from __future__ import annotations

import hashlib
import json
import os
import shutil
from pathlib import Path
from typing import Mapping

STORE_ENV_VAR = "RTOOL_STORE"


def file_fingerprint(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()[:16]


def params_fingerprint(params) -> str:
    payload = json.dumps(params, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(payload).hexdigest()[:16]


def resolve_store_path(explicit: str | None) -> Path:
    if explicit:
        return Path(explicit)
    env = os.environ.get(STORE_ENV_VAR)
    if env:
        return Path(env)
    return Path("rtool-store")


class AnalysisStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _dir(self, name: str) -> Path:
        return self.root / name

    def _manifest_path(self, name: str) -> Path:
        return self._dir(name) / "manifest.json"

    def has(self, name: str) -> bool:
        return self._manifest_path(name).is_file()

    def manifest(self, name: str) -> dict:
        with open(self._manifest_path(name), encoding="utf-8") as fh:
            return json.load(fh)

    def is_fresh(self, name: str, inputs: Mapping[str, str]) -> bool:
        if not self.has(name):
            return False
        return self.manifest(name).get("inputs") == dict(inputs)

    def path(self, name: str, filename: str) -> Path:
        return self._dir(name) / filename

    def begin(self, name: str) -> Path:
        """Scratch directory for building an artifact; publish() commits it."""
        tmp = self.root / f".tmp-{name.replace('/', '_')}"
        if tmp.exists():
            shutil.rmtree(tmp)
        tmp.mkdir(parents=True)
        return tmp

    def publish(self, name: str, tmp: Path, inputs: Mapping[str, str]) -> Path:
        outputs = {}
        for p in sorted(tmp.rglob("*")):
            if p.is_file():
                outputs[str(p.relative_to(tmp))] = file_fingerprint(p)
        manifest = {"name": name, "inputs": dict(inputs), "outputs": outputs}
        with open(tmp / "manifest.json", "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
        final = self._dir(name)
        if final.exists():
            shutil.rmtree(final)
        final.parent.mkdir(parents=True, exist_ok=True)
        os.replace(tmp, final)
        return final

    def write_json(self, name: str, filename: str, payload, inputs: Mapping[str, str]) -> Path:
        tmp = self.begin(name)
        with open(tmp / filename, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
        return self.publish(name, tmp, inputs)

    def read_json(self, name: str, filename: str):
        with open(self.path(name, filename), encoding="utf-8") as fh:
            return json.load(fh)
