"""
Run manifests: enough of every CLI run to reproduce it.
"""

import hashlib
import json
import sys
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

PathLike = Union[str, Path]


def sha256_file(path: PathLike, chunk_size: int = 1 << 16) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(chunk_size), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass
class RunManifest:
    """
    Record of one CLI run

    Attributes:
        command: Subcommand name
        config: Every flag value, defaults included
        version: Tool version
        inputs: Input path -> sha256
        outputs: Files written, in write order
        duration_s: Wall-clock duration
        partial: True when the run stopped early and outputs are incomplete
        exit_code: Process exit code
    """

    command: str
    config: Dict[str, Any]
    version: str
    inputs: Dict[str, str] = field(default_factory=dict)
    outputs: List[str] = field(default_factory=list)
    duration_s: Optional[float] = None
    partial: bool = False
    exit_code: Optional[int] = None
    started_at: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds")
    )
    _t0: float = field(default_factory=time.perf_counter, repr=False)

    def add_input(self, path: PathLike) -> None:
        self.inputs[str(path)] = sha256_file(path)

    def add_output(self, path: PathLike) -> None:
        if str(path) not in self.outputs:
            self.outputs.append(str(path))

    def finish(self, exit_code: int, partial: bool = False) -> None:
        self.duration_s = round(time.perf_counter() - self._t0, 3)
        self.exit_code = exit_code
        self.partial = partial

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "config": self.config,
            "version": self.version,
            "python": sys.version.split()[0],
            "started_at": self.started_at,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "duration_s": self.duration_s,
            "partial": self.partial,
            "exit_code": self.exit_code,
        }

    def missing_outputs(self) -> List[str]:
        return [p for p in self.outputs if not Path(p).exists()]

    def save(self, path: PathLike, verbose: bool = True) -> Path:
        """
        Write the manifest as JSON

        Outputs that do not exist are dropped from the list and the run is
        marked partial.
        """
        missing = self.missing_outputs()
        if missing:
            self.outputs = [p for p in self.outputs if p not in missing]
            self.partial = True
            if verbose:
                print(f"⚠ {len(missing)} listed output(s) were not written", file=sys.stderr)

        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, indent=2)
        if verbose:
            print(f"✓ Manifest saved to: {path}")
        return path
