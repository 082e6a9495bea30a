from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml

from src.core.fields import BallPolicy, FieldSpec, Window, field_from_dict
from src.core.growth import GrowthFunction, growth_from_dict
from src.core.operators import KernelSpec, OPERATORS, kernel_from_dict
from src.core.young import YoungFunction, young_from_dict

YOUNG_KEYS = ("Phi", "Psi", "Theta", "Phi0", "Psi0")
GROWTH_KEYS = ("vp", "psi", "theta", "rho", "omega")


class SettingsLoader:
    """Library defaults from defaults.yaml, reloaded when the file changes."""

    def __init__(self, settings_path: Optional[str] = None):
        self._cache: Dict[str, Any] = {}
        self._last_mtime: float = 0.0

        if settings_path:
            self.file_path = Path(settings_path)
        else:
            self.file_path = Path(__file__).resolve().parent / "defaults.yaml"

    def _load_if_needed(self) -> None:
        if not self.file_path.exists():
            self._cache = {}
            self._last_mtime = 0
            raise FileNotFoundError(f"Settings file {self.file_path} not found.")

        current_mtime = self.file_path.stat().st_mtime
        if self._cache and current_mtime == self._last_mtime:
            return

        with open(self.file_path, "r", encoding="utf-8") as f:
            self._cache = yaml.safe_load(f) or {}
        self._last_mtime = current_mtime

    def section(self, name: str) -> Dict[str, Any]:
        self._load_if_needed()
        return dict(self._cache.get(name) or {})

    def get(self, section: str, key: str, default: Any = None) -> Any:
        return self.section(section).get(key, default)


SETTINGS = SettingsLoader()


@dataclass
class WindowConfig:
    n: int = 1
    L: float = 4.0
    levels: List[int] = field(default_factory=lambda: [64, 128, 256])

    def window(self, N: int) -> Window:
        return Window(self.n, self.L, N)

    def to_dict(self) -> Dict[str, Any]:
        return {"n": self.n, "L": self.L, "levels": list(self.levels)}


@dataclass
class BallPolicyConfig:
    stride: int = 1
    max_radius: Optional[float] = None

    def policy(self) -> BallPolicy:
        return BallPolicy(self.stride, self.max_radius)

    def to_dict(self) -> Dict[str, Any]:
        return {"stride": self.stride, "max_radius": self.max_radius}


@dataclass
class ToleranceConfig:
    stability: float = 0.05
    commutator_stability: float = 0.10
    exact: float = 1e-9
    sigma: float = 1e-6
    cap: float = 1e6

    @classmethod
    def from_settings(cls, overrides: Optional[Dict[str, Any]] = None) -> "ToleranceConfig":
        base = SETTINGS.section("tolerances")
        merged = {
            "stability": base.get("stability", 0.05),
            "commutator_stability": base.get("commutator_stability", 0.10),
            "exact": base.get("exact", 1e-9),
            "sigma": base.get("sigma", 1e-6),
            "cap": SETTINGS.get("caps", "pairing", 1e6),
        }
        for key, value in (overrides or {}).items():
            if key not in merged:
                raise ValueError(f"Unknown tolerance: {key}")
            merged[key] = value
        return cls(**{k: float(v) for k, v in merged.items()})

    def to_dict(self) -> Dict[str, Any]:
        return {
            "stability": self.stability,
            "commutator_stability": self.commutator_stability,
            "exact": self.exact,
            "sigma": self.sigma,
            "cap": self.cap,
        }


@dataclass
class BankConfig:
    """Explicit field lists replace the default bank when given."""

    seed: int = 0
    fields: Optional[List[FieldSpec]] = None
    b_fields: Optional[List[FieldSpec]] = None

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"seed": self.seed}
        if self.fields is not None:
            data["fields"] = [spec.to_dict() for spec in self.fields]
        if self.b_fields is not None:
            data["b_fields"] = [spec.to_dict() for spec in self.b_fields]
        return data


@dataclass
class ExperimentConfig:
    name: str
    properties: List[str]
    window: WindowConfig = field(default_factory=WindowConfig)
    young: Dict[str, YoungFunction] = field(default_factory=dict)
    growth: Dict[str, GrowthFunction] = field(default_factory=dict)
    kernel: Optional[KernelSpec] = None
    operator: Optional[str] = None
    bank: BankConfig = field(default_factory=BankConfig)
    balls: BallPolicyConfig = field(default_factory=BallPolicyConfig)
    tolerances: ToleranceConfig = field(default_factory=ToleranceConfig)
    params: Dict[str, Any] = field(default_factory=dict)

    @property
    def seed(self) -> int:
        return self.bank.seed

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return replace(self, bank=replace(self.bank, seed=int(seed)))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "properties": list(self.properties),
            "window": self.window.to_dict(),
            "young": {k: v.to_dict() for k, v in self.young.items()},
            "growth": {k: v.to_dict() for k, v in self.growth.items()},
            "kernel": self.kernel.to_dict() if self.kernel else None,
            "operator": self.operator,
            "bank": self.bank.to_dict(),
            "balls": self.balls.to_dict(),
            "tolerances": self.tolerances.to_dict(),
            "params": dict(self.params),
        }


def _is_power_of_two(value: Any) -> bool:
    return isinstance(value, int) and value >= 8 and not value & (value - 1)


def _parse_specs(data: Dict[str, Any], keys: tuple, parse, label: str) -> Dict[str, Any]:
    specs = {}
    for key, spec in (data or {}).items():
        if key not in keys:
            raise ValueError(f"Unknown {label} slot: {key} (expected one of {', '.join(keys)})")
        specs[key] = parse(spec)
    return specs


def parse_experiment(data: Dict[str, Any], default_name: str = "experiment") -> ExperimentConfig:
    """Build and validate an ExperimentConfig from its JSON/YAML mapping."""
    if not isinstance(data, dict):
        raise ValueError("Experiment config must be a mapping")

    properties = data.get("properties")
    if not properties or not isinstance(properties, list):
        raise ValueError("Experiment config lists no properties")

    window_data = data.get("window") or {}
    window = WindowConfig(
        n=int(window_data.get("n", 1)),
        L=float(window_data.get("L", 4.0)),
        levels=list(window_data.get("levels", [64, 128, 256])),
    )
    if not window.levels or not all(_is_power_of_two(N) for N in window.levels):
        raise ValueError(f"Refinement levels must be powers of two >= 8, got {window.levels}")
    if any(b <= a for a, b in zip(window.levels, window.levels[1:])):
        raise ValueError(f"Refinement levels must be ascending, got {window.levels}")
    Window(window.n, window.L, window.levels[0])

    kernel = kernel_from_dict(data["kernel"]) if data.get("kernel") else None
    if kernel is not None and kernel.dimension != window.n:
        raise ValueError(f"{kernel.kind} kernel needs n={kernel.dimension}, window has n={window.n}")

    operator = data.get("operator")
    if operator is not None and operator not in OPERATORS:
        raise ValueError(f"Unknown operator: {operator}")

    bank_data = data.get("bank") or {}
    bank = BankConfig(
        seed=int(bank_data.get("seed", SETTINGS.get("bank", "seed", 0))),
        fields=[field_from_dict(s) for s in bank_data["fields"]] if "fields" in bank_data else None,
        b_fields=[field_from_dict(s) for s in bank_data["b_fields"]] if "b_fields" in bank_data else None,
    )
    if bank.fields is not None and not bank.fields:
        raise ValueError("Bank field list is empty")

    balls_data = data.get("balls") or {}
    balls = BallPolicyConfig(
        stride=int(balls_data.get("stride", 1)),
        max_radius=balls_data.get("max_radius"),
    )
    for N in window.levels:
        if N % balls.stride:
            raise ValueError(f"Ball stride {balls.stride} must divide every level, got N={N}")

    return ExperimentConfig(
        name=str(data.get("name", default_name)),
        properties=[str(p) for p in properties],
        window=window,
        young=_parse_specs(data.get("young"), YOUNG_KEYS, young_from_dict, "Young function"),
        growth=_parse_specs(data.get("growth"), GROWTH_KEYS, growth_from_dict, "growth function"),
        kernel=kernel,
        operator=operator,
        bank=bank,
        balls=balls,
        tolerances=ToleranceConfig.from_settings(data.get("tolerances")),
        params=dict(data.get("params") or {}),
    )


class ExperimentConfigLoader:
    """Reads JSON or YAML experiment configs, cached by path and mtime."""

    def __init__(self) -> None:
        self._cache: Dict[Path, ExperimentConfig] = {}
        self._mtimes: Dict[Path, float] = {}

    def load(self, config_path: str) -> ExperimentConfig:
        path = Path(config_path).resolve()
        if not path.exists():
            raise FileNotFoundError(f"Configuration file {path} not found.")

        current_mtime = path.stat().st_mtime
        if path in self._cache and self._mtimes.get(path) == current_mtime:
            return self._cache[path]

        with open(path, "r", encoding="utf-8") as f:
            try:
                data = yaml.safe_load(f) or {}
            except yaml.YAMLError as e:
                raise ValueError(f"Configuration file {path} is not valid JSON/YAML: {e}") from e

        config = parse_experiment(data, default_name=path.stem)
        self._cache[path] = config
        self._mtimes[path] = current_mtime
        return config


def preset_path(name: str) -> Path:
    """Path of a shipped preset, with or without the .json suffix."""
    base = Path(__file__).resolve().parent / "presets"
    candidate = base / (name if name.endswith(".json") else f"{name}.json")
    if not candidate.exists():
        raise FileNotFoundError(f"Preset {name} not found in {base}.")
    return candidate


CONFIGS = ExperimentConfigLoader()
