"""
Configuration management for Tropiscope
"""

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Union, get_args, get_origin

from core.exceptions import ConfigError


@dataclass
class VarietyConfig:
    """Which variety to study"""
    expression: str = "1+z1+z2"
    file: Optional[str] = None  # read the expression from this file instead
    mode: str = "implicit"  # implicit | parametrized
    n: Optional[int] = None  # inferred from the variables when omitted
    k: Optional[int] = None  # n - #equations, or the parameter count
    params: int = 1
    component: Optional[int] = None  # sin(pi*g): keep only g = component


@dataclass
class ShellConfig:
    """Shell schedule and sample sizes"""
    r_min: float = 15.0
    r_max: float = 60.0
    shells: int = 3
    points: int = 10000
    workers: int = 1
    cutoff: float = 0.0


@dataclass
class ToleranceConfig:
    """Angular tolerances (radians) and slope bounds"""
    eps_point: float = 2e-2
    tol_arc: float = 1e-2
    eps_cluster: Optional[float] = None  # derived from the sample density when omitted
    vertex_q: int = 12
    vertex_tol: float = 5e-3
    arc_q: int = 4
    arc_tol: float = 0.1
    oracle_tol: float = 2e-2
    oracle_cloud_tol: float = 0.1
    circle_q: int = 3
    circle_tol: float = 5e-2
    circle_coverage: float = 0.05
    tentacle_eps: float = 0.1


@dataclass
class RenderConfig:
    """Figure settings"""
    bbox: Optional[List[float]] = None  # [xmin, xmax, ymin, ymax]
    resolution: int = 512
    projection: List[int] = field(default_factory=lambda: [1, 2])
    region_points: int = 100000
    formats: List[str] = field(default_factory=lambda: ["svg"])
    area_radii: List[float] = field(default_factory=lambda: [1.0, 2.0, 3.0, 4.0, 5.0])


@dataclass
class CertifyConfig:
    """Newton bound certificate settings"""
    degree: int = 8
    base_degree: Optional[int] = None  # floor(degree / 2) when omitted
    slopes: Optional[List[List[int]]] = None  # claimed slopes; estimated when omitted


@dataclass
class OutputConfig:
    """Where results and logs go"""
    out_dir: str = "results"
    log_level: str = "INFO"
    log_file: str = "tropiscope.log"


SECTIONS = {
    "variety": VarietyConfig,
    "shells": ShellConfig,
    "tolerances": ToleranceConfig,
    "render": RenderConfig,
    "certify": CertifyConfig,
    "output": OutputConfig,
}


def _matches(value, annotation) -> bool:
    """Whether a JSON value fits a section field annotation; ints pass as floats, bools never as numbers"""
    origin = get_origin(annotation)
    if origin is Union:
        return any(_matches(value, arg) for arg in get_args(annotation))
    if origin is list:
        (item,) = get_args(annotation)
        return isinstance(value, list) and all(_matches(v, item) for v in value)
    if annotation is type(None):
        return value is None
    if isinstance(value, bool):
        return annotation is bool
    if annotation is float:
        return isinstance(value, (int, float))
    return isinstance(value, annotation)


class RunConfig:
    """Main configuration class"""

    def __init__(self, config_file: Optional[str] = None, seed: Optional[int] = None):
        self.config_file = Path(config_file) if config_file else None
        self.seed = seed
        self.variety = VarietyConfig()
        self.shells = ShellConfig()
        self.tolerances = ToleranceConfig()
        self.render = RenderConfig()
        self.certify = CertifyConfig()
        self.output = OutputConfig()

        if self.config_file is not None:
            self.load()

    def load(self):
        """Load configuration from file"""
        if not self.config_file.exists():
            raise ConfigError(f"configuration file {self.config_file} does not exist")
        try:
            with open(self.config_file, "r", encoding="utf-8") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"invalid JSON in {self.config_file}: {e}") from e
        self.update(data)

    def update(self, data: Dict[str, Any]):
        """Replace sections present in data; unknown keys are errors"""
        if "seed" in data:
            self.seed = data["seed"]
        for name, value in data.items():
            if name == "seed":
                continue
            if name not in SECTIONS:
                raise ConfigError(f"unknown configuration section '{name}'")
            section_cls = SECTIONS[name]
            if not isinstance(value, dict):
                raise ConfigError(f"section '{name}' must be an object")
            known = {f.name for f in fields(section_cls)}
            unknown = set(value) - known
            if unknown:
                raise ConfigError(f"unknown keys in '{name}': {', '.join(sorted(unknown))}")
            setattr(self, name, section_cls(**value))

    def override(self, section: str, key: str, value):
        """Apply a command-line flag; None means the flag was not given"""
        if value is None:
            return
        section_obj = getattr(self, section)
        if not hasattr(section_obj, key):
            raise ConfigError(f"unknown configuration key {section}.{key}")
        setattr(section_obj, key, value)

    def validate(self):
        """Check the run invariants"""
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise ConfigError("seed is mandatory and must be an integer")
        for name, section_cls in SECTIONS.items():
            section = getattr(self, name)
            for f in fields(section_cls):
                value = getattr(section, f.name)
                if not _matches(value, f.type):
                    raise ConfigError(f"{name}.{f.name} has the wrong type: {value!r}")
        if self.variety.mode not in ("implicit", "parametrized"):
            raise ConfigError(f"unknown variety mode '{self.variety.mode}'")
        if self.variety.k is not None and self.variety.k < 1:
            raise ConfigError("k must be at least 1")
        s = self.shells
        if not 0 < s.r_min < s.r_max:
            raise ConfigError("shell radii must satisfy 0 < r_min < r_max")
        if s.shells < 2 or s.points < 1 or s.workers < 1:
            raise ConfigError("need at least 2 shells, 1 point and 1 worker")
        if s.cutoff < 0:
            raise ConfigError("cutoff must be non-negative")
        for f in fields(ToleranceConfig):
            value = getattr(self.tolerances, f.name)
            if value is not None and value <= 0:
                raise ConfigError(f"tolerance {f.name} must be positive")
        if self.render.resolution < 16:
            raise ConfigError("raster resolution must be at least 16")
        if self.render.bbox is not None:
            if len(self.render.bbox) != 4:
                raise ConfigError("render.bbox must be [xmin, xmax, ymin, ymax]")
            xmin, xmax, ymin, ymax = self.render.bbox
            if not (xmin < xmax and ymin < ymax):
                raise ConfigError("render.bbox must be [xmin, xmax, ymin, ymax] with positive extent")
        if len(self.render.projection) != 2:
            raise ConfigError("render.projection must name two coordinates")
        unknown_formats = set(self.render.formats) - {"svg", "ppm"}
        if unknown_formats:
            raise ConfigError(f"unknown figure formats: {', '.join(sorted(unknown_formats))}")
        if self.certify.degree < 1:
            raise ConfigError("certify.degree must be positive")
        return self

    def expression_text(self) -> str:
        """Variety text, read from variety.file when set"""
        if self.variety.file:
            path = Path(self.variety.file)
            if not path.exists():
                raise ConfigError(f"variety file {path} does not exist")
            return path.read_text(encoding="utf-8").strip()
        return self.variety.expression

    def to_dict(self, echo: bool = False) -> Dict[str, Any]:
        """Plain dict of the configuration; echo drops the worker count, which never reaches the results"""
        data: Dict[str, Any] = {"seed": self.seed}
        for name in SECTIONS:
            data[name] = asdict(getattr(self, name))
        if echo:
            del data["shells"]["workers"]
        return data

    def save(self, path: Optional[str] = None, echo: bool = False):
        """Save configuration to file"""
        target = Path(path) if path else self.config_file
        if target is None:
            raise ConfigError("no configuration file to save to")
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(echo), f, indent=2, sort_keys=True)
            f.write("\n")

    def get(self, section: str, key: str, default=None):
        """Get configuration value"""
        section_obj = getattr(self, section, None)
        if section_obj:
            return getattr(section_obj, key, default)
        return default
