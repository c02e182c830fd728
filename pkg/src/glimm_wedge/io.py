"""Versioned CSV tables, hashed JSON reports and run configuration loading.

Every writer is deterministic: rows keep their input order, floats are
written with ``repr`` (shortest round-trip form) and JSON keys are sorted, so
identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .diagnostics import FunctionalWeights
from .errors import ConfigError
from .glimm import ApproxSolution, Mesh, ThetaSequence, profile_from_dict, profile_to_dict
from .params import GasParams

CSV_VERSION = "# glimm-wedge v1"
"""First line of every CSV table written by the package."""


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def _plain(obj: Any) -> Any:
    """Convert numpy scalars, tuples and non-finite floats into JSON-safe values."""
    if isinstance(obj, Mapping):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if hasattr(obj, "tolist"):
        return _plain(obj.tolist())
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def canonical_json(obj: Any) -> str:
    """Sorted, compact JSON text used for hashing."""
    return json.dumps(_plain(obj), sort_keys=True, separators=(",", ":"), allow_nan=False)


def manifest_hash(manifest: Mapping[str, Any]) -> str:
    """SHA-256 hex digest of the canonical JSON form of ``manifest``."""
    return hashlib.sha256(canonical_json(manifest).encode("utf-8")).hexdigest()


def write_json(path: str | Path, payload: Mapping[str, Any], manifest: Mapping[str, Any] | None = None) -> Path:
    """Write ``payload`` as indented JSON; with a manifest, embed its hash.

    Returns
    -------
    Path
        The written file.
    """
    body = dict(payload)
    if manifest is not None:
        body["manifest_hash"] = manifest_hash(manifest)
    path = Path(path)
    path.write_text(json.dumps(_plain(body), sort_keys=True, indent=2, allow_nan=False) + "\n", encoding="utf-8")
    return path


def read_json(path: str | Path) -> dict:
    """Read a JSON object, mapping read and parse failures to :class:`ConfigError`."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must hold a JSON object")
    return data


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def write_csv(path: str | Path, columns: Sequence[str], rows: Iterable[Sequence[Any] | Mapping[str, Any]]) -> Path:
    """Write a versioned CSV table.

    Parameters
    ----------
    path : str or Path
        Target file.
    columns : sequence of str
        Header names.
    rows : iterable
        Either sequences in column order or mappings keyed by column name.
    """
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        fh.write(CSV_VERSION + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            if isinstance(row, Mapping):
                row = [row[c] for c in columns]
            writer.writerow(["" if v is None else v for v in row])
    return path


def read_csv(path: str | Path) -> tuple[list[str], list[dict[str, str]]]:
    """Read a table written by :func:`write_csv`, checking the version line."""
    with Path(path).open(newline="", encoding="utf-8") as fh:
        first = fh.readline().rstrip("\n")
        if first != CSV_VERSION:
            raise ConfigError(f"{path}: expected version line {CSV_VERSION!r}, got {first!r}")
        reader = csv.DictReader(fh)
        rows = list(reader)
        return list(reader.fieldnames or []), rows


def _fmt(x: float) -> str:
    """Compact, filesystem-safe decimal rendering for file names."""
    return repr(float(x)).replace("-", "m")


def run_tag(gamma: float, a_inf: float, tau: float | Sequence[float], seed: int, dx: float) -> str:
    """File-name stem embedding gamma, a_inf, tau, seed and dx.

    A sequence of taus (a study family) is rendered as ``first-last``.
    """
    if isinstance(tau, (list, tuple)):
        t = f"{_fmt(tau[0])}-{_fmt(tau[-1])}" if tau else "none"
    else:
        t = _fmt(tau)
    return f"g{_fmt(gamma)}_a{_fmt(a_inf)}_t{t}_s{seed}_dx{_fmt(dx)}"


SOLUTION_COLUMNS = ("k", "n", "x", "y", "rho", "v")
WAVE_COLUMNS = ("k", "n", "kind", "strength", "speed")


def solution_rows(sol: ApproxSolution) -> Iterable[tuple]:
    """Cell samples ``(k, n, x, y, rho, v)``.

    ``n = -1, -2, ...`` counts cells downward from the wall and ``y`` is the
    sample point of the cell on the line ``x = x_k``.
    """
    mesh = sol.mesh
    for k in range(sol.rho.shape[0]):
        x = k * mesh.dx
        etas = mesh.sample_eta(sol.theta[k])
        wall = mesh.wall(k)
        for i in range(mesh.y_depth):
            yield (k, -(i + 1), x, wall + float(etas[i]), float(sol.rho[k, i]), float(sol.v[k, i]))


# ---------------------------------------------------------------------------
# run configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce one scheme run.

    The JSON form is flat for the model constants (``gamma``, ``a_inf``,
    ``tau``, ``b0`` and optional tolerances) plus the nested blocks ``mesh``
    and ``profile``. ``mesh`` holds either ``x_max`` and ``k_max`` (the
    spacing is then derived from the CFL bound) or the explicit ``dx``,
    ``dy``, ``k_max``, ``y_depth``.
    """

    params: GasParams
    mesh: Mesh
    profile: dict
    seed: int = 0
    generator: str = "van_der_corput"
    weights: FunctionalWeights = field(default_factory=FunctionalWeights)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], seed: int | None = None) -> "RunConfig":
        """Validate a config mapping; ``seed`` overrides the file's value."""
        params = GasParams.from_dict(data)
        for key in ("mesh", "profile"):
            if key not in data:
                raise ConfigError(f"missing config key: {key}")
        profile_dict = dict(data["profile"])
        profile = profile_from_dict(profile_dict)
        m = data["mesh"]
        if not isinstance(m, Mapping):
            raise ConfigError("config key mesh must be an object")
        if "k_max" not in m:
            raise ConfigError("missing config key: mesh.k_max")
        k_max = int(m["k_max"])
        if "dx" in m or "dy" in m or "y_depth" in m:
            for key in ("dx", "dy", "y_depth"):
                if key not in m:
                    raise ConfigError(f"missing config key: mesh.{key}")
            mesh = Mesh(float(m["dx"]), float(m["dy"]), params.b0, k_max, int(m["y_depth"]))
        else:
            if "x_max" not in m:
                raise ConfigError("missing config key: mesh.x_max")
            # an empty run still needs a spacing; build it for one column
            built = Mesh.build(params, float(m["x_max"]), max(k_max, 1), profile, float(m.get("cfl_safety", 1.2)))
            mesh = built if k_max >= 1 else Mesh(built.dx, built.dy, built.b0, 0, built.y_depth)
        w = data.get("weights", {})
        weights = FunctionalWeights(float(w.get("k_b", 2.0)), float(w.get("c_star", 10.0)))
        return cls(
            params,
            mesh,
            profile_to_dict(profile),
            int(data.get("seed", 0) if seed is None else seed),
            str(data.get("generator", "van_der_corput")),
            weights,
        )

    def theta(self) -> ThetaSequence:
        return ThetaSequence.make(self.generator, self.mesh.k_max + 1, self.seed)

    def manifest(self) -> dict:
        """Every input of the run, in the form stored next to its outputs."""
        return {
            "params": self.params.to_dict(),
            "mesh": self.mesh.to_dict(),
            "profile": dict(self.profile),
            "seed": self.seed,
            "generator": self.generator,
            "weights": {"k_b": self.weights.k_b, "c_star": self.weights.c_star},
        }
