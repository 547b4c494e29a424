"""Instance configuration: presets, JSON configs, content hashes."""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .bimodule import Bimodule, BimoduleError, BimoduleMap, make_symmetric_duals
from .fields import ExtensionField, base_field, field_make
from .linalg import FieldError

CONFIG_VERSION = 1


class ConfigError(ValueError):
    """Invalid instance configuration; the message says what to fix."""


@dataclass
class InstanceConfig:
    name: str
    bimodule: Bimodule
    witness: BimoduleMap
    case: int
    jmax: int = 10
    word_guard: int = 10**6
    max_span: int | None = None
    seed: int = 0
    raw: dict = field(default_factory=dict)

    @property
    def dims(self):
        return self.bimodule.dims

    @property
    def mn(self) -> int:
        m, n = self.bimodule.dims
        return m * n

    @property
    def degenerate(self) -> bool:
        return self.mn < 4

    @property
    def wild(self) -> bool:
        return self.mn > 4

    @property
    def hypothesis(self) -> bool:
        """Whether the characteristic condition behind the witness construction held."""
        return bool(self.witness.note.get("hypothesis", True))

    def canonical(self) -> dict:
        """The hashed content: field data, action tensors and caps (not the seed)."""
        return {"version": CONFIG_VERSION, "case": self.case, "bimodule": self.bimodule.to_dict(),
                "word_guard": self.word_guard, "max_span": self.max_span}

    @property
    def content_hash(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def summary(self) -> dict:
        m, n = self.dims
        return {"name": self.name, "hash": self.content_hash, "char": self.bimodule.k.p,
                "dims": [m, n], "mn": self.mn, "degenerate": self.degenerate,
                "witness_hypothesis": self.hypothesis}


# -- presets -------------------------------------------------------------------

_PRESET_RE = re.compile(r"^\s*(kronecker|field-extension)\s*(.*)$")


def _preset_args(rest: str) -> dict:
    """``"3"``, ``"n=3 p=7"``, ``"p=2 d=4"`` or ``"p=2 poly=1,1,0,0,1"``."""
    out = {}
    for tok in rest.replace(";", " ").split():
        if "=" in tok:
            k, v = tok.split("=", 1)
            out[k.strip()] = v.strip()
        else:
            out.setdefault("n", tok)
    return out


# Conway-style defaults for the field-extension preset: x^d + (low terms)
_DEFAULT_MINPOLY = {(2, 2): [1, 1, 1], (2, 3): [1, 1, 0, 1], (2, 4): [1, 1, 0, 0, 1],
                    (3, 2): [2, 2, 1], (3, 3): [1, 2, 0, 1], (5, 2): [2, 4, 1], (7, 2): [3, 6, 1]}


def preset(name: str, **overrides) -> InstanceConfig:
    """Expand a preset name.

    ``kronecker N`` (also ``kroneckerN``; options ``p=`` with 0 for Q,
    default 7) gives ``k^N`` over ``k``.  ``field-extension p=P d=D``
    (or ``poly=c0,c1,...``) gives ``M = D0`` over its prime field.
    """
    m = _PRESET_RE.match(name.strip().lower())
    if not m:
        raise ConfigError(f"unknown preset {name!r}; use 'kronecker N' or 'field-extension p=P d=D'")
    kind, rest = m.group(1), m.group(2)
    args = _preset_args(rest)
    args.update({k: str(v) for k, v in overrides.items() if v is not None})
    try:
        if kind == "kronecker":
            n = int(args.get("n", 2))
            p = int(args.get("p", 7))
            if n < 1:
                raise ConfigError("kronecker needs n >= 1")
            k = base_field(p)
            M, w = make_symmetric_duals(1, k, k, n=n)
            label = f"kronecker{n}" + ("" if p == 7 else f"-p{p}")
            return InstanceConfig(label, M, w, case=1, raw={"preset": name})
        p = int(args.get("p", 2))
        if "poly" in args:
            poly = [int(c) for c in args["poly"].split(",")]
        else:
            d = int(args.get("d", 4))
            if (p, d) not in _DEFAULT_MINPOLY:
                raise ConfigError(f"no default polynomial for p={p}, d={d}; pass poly=c0,c1,...,1")
            poly = _DEFAULT_MINPOLY[(p, d)]
        D0 = field_make(p, poly)
        M, w = make_symmetric_duals(2, D0, base_field(p))
        return InstanceConfig(f"field-extension-p{p}-d{D0.degree}", M, w, case=2, raw={"preset": name})
    except (FieldError, BimoduleError) as exc:
        raise ConfigError(f"preset {name!r}: {exc}") from exc
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"preset {name!r}: malformed argument ({exc})") from exc


PRESETS = ("kronecker1", "kronecker2", "kronecker3", "kronecker2 p=0", "field-extension p=2 d=4")


# -- JSON configs -----------------------------------------------------------------

def _field(spec, what: str) -> ExtensionField:
    if not isinstance(spec, dict) or "char" not in spec:
        raise ConfigError(f"{what}: expected {{'char': p, 'poly': [c0, ..., 1]}}")
    try:
        return field_make(int(spec["char"]), spec.get("poly", [0, 1]))
    except FieldError as exc:
        raise ConfigError(f"{what}: {exc}") from exc


def config_from_dict(data: dict, source: str = "<dict>") -> InstanceConfig:
    """Validate a config dictionary.

    Either ``{"preset": "kronecker 3"}`` or an explicit bimodule::

        {"D0": {"char": 2, "poly": [1,1,0,0,1]}, "D1": {"char": 2, "poly": [0,1]},
         "bimodule": {"dim": 4, "left_action": [[...]], "right_action": [[...]]},
         "case": 2}

    Optional keys: ``jmax``, ``word_guard``, ``max_span``, ``seed``, ``name``.
    """
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be a JSON object")
    version = data.get("version", CONFIG_VERSION)
    if version != CONFIG_VERSION:
        raise ConfigError(f"{source}: unsupported config version {version} (expected {CONFIG_VERSION})")
    if "preset" in data:
        cfg = preset(str(data["preset"]))
    else:
        b = data.get("bimodule")
        if isinstance(b, dict) and "left" in b and "right" in b:
            # Bimodule.to_dict() output carries its own fields
            data = {**data, "D0": data.get("D0", b["left"]), "D1": data.get("D1", b["right"])}
        for key in ("D0", "D1", "bimodule"):
            if key not in data:
                raise ConfigError(f"{source}: missing key {key!r} (or give a 'preset')")
        D0, D1 = _field(data["D0"], f"{source}: D0"), _field(data["D1"], f"{source}: D1")
        if D0.k.p != D1.k.p:
            raise ConfigError(f"{source}: D0 and D1 must have the same characteristic")
        b = data["bimodule"]
        try:
            n = int(b["dim"])
            L = D0.k.from_jsonable(b["left_action"], (n, n))
            R = D0.k.from_jsonable(b["right_action"], (n, n))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"{source}: bimodule needs 'dim', 'left_action', 'right_action' ({exc})") from exc
        try:
            M = Bimodule(D0, D1, L, R, name=data.get("name", "M"))
        except (BimoduleError, FieldError) as exc:
            raise ConfigError(f"{source}: action axioms fail: {exc}") from exc
        case = int(data.get("case", 1 if D0.degree == 1 and D1.degree == 1 else 2))
        try:
            M, w = make_symmetric_duals(case, D0, D1, bimodule=M)
        except BimoduleError as exc:
            raise ConfigError(f"{source}: no symmetric-duals witness: {exc}") from exc
        cfg = InstanceConfig(str(data.get("name", "custom")), M, w, case=case)
    cfg.jmax = int(data.get("jmax", cfg.jmax))
    cfg.word_guard = int(data.get("word_guard", cfg.word_guard))
    cfg.max_span = data.get("max_span", cfg.max_span)
    cfg.seed = int(data.get("seed", cfg.seed))
    cfg.raw = data
    return cfg


def parse_config(path) -> InstanceConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return config_from_dict(data, str(path))
