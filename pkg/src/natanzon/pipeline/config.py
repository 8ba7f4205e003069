import logging
import math

import numpy as np
from yaml import safe_load, YAMLError

import natanzon.errors as nzerr
from natanzon.csv import FORMATS
from natanzon.errors import SourcePosition, add_source_position
from natanzon.potential import NatanzonParams, MapConfig
from natanzon.yaml import YamlElement, decode_yaml

logger = logging.getLogger(__name__)

PARAMETER_NAMES = ("g1", "g2", "sigma1", "sigma2", "c0", "eta")

class PotentialConfig():
    def __init__(self, r_values: list[float] = None, r_min: float = None, r_max: float = None,
                 count: int = None):
        """Either an explicit list of r values or an evenly spaced range."""
        self.r_values = r_values
        self.r_min = r_min
        self.r_max = r_max
        self.count = count

    def points(self) -> list[float]:
        if self.r_values:
            return list(self.r_values)
        if self.r_min is None or self.r_max is None or self.count is None:
            raise nzerr.UsageError("No r values: give a list of r or r min, r max and count")
        if self.count < 1:
            raise nzerr.InvalidValue("count", self.count, "Must be at least 1.")
        if self.count == 1:
            return [self.r_min]
        return [float(x) for x in np.linspace(self.r_min, self.r_max, self.count)]

class GreenConfig():
    def __init__(self, r_values: list[float] = None, r_prime_values: list[float] = None,
                 epsilon: float = None):
        self.r_values = r_values or []
        self.r_prime_values = r_prime_values or []
        self.epsilon = epsilon

class VerifyConfig():
    def __init__(self, tolerance_factor: float = 1.0, bch_a_scale: float = 1.0):
        """tolerance_factor: multiplies every verification tolerance
        bch_a_scale: scales the coefficient a of the first disentangling formula (negative control)"""
        if not tolerance_factor > 0:
            raise nzerr.InvalidValue("tolerance factor", tolerance_factor, "Must be positive.")
        self.tolerance_factor = tolerance_factor
        self.bch_a_scale = bch_a_scale

class RunConfig():
    def __init__(self,
                 parameter_values: dict[str, float],
                 map_config: MapConfig,
                 potential: PotentialConfig,
                 n_max: int,
                 green: GreenConfig,
                 verify: VerifyConfig,
                 output_format: str = "csv",
                 config_path: str = None):
        self.parameter_values = parameter_values
        self.map = map_config
        self.potential = potential
        self.n_max = n_max
        self.green = green
        self.verify = verify
        self.output_format = output_format
        self.config_path = config_path

    @property
    def params(self) -> NatanzonParams:
        """The six parameters; all are required by potential, spectrum and green."""
        for name in PARAMETER_NAMES:
            if name not in self.parameter_values:
                raise nzerr.MissingRequiredKey(name)
        return NatanzonParams(**self.parameter_values)

def config_spec() -> YamlElement:
    """YAML schema of a run configuration"""
    opt_float = lambda: YamlElement("float", required=False)
    return YamlElement("dict", dict_type={
        "parameters": YamlElement("dict", required=False, default={},
                                  dict_type={k: opt_float() for k in PARAMETER_NAMES}),
        "map": YamlElement("dict", required=False, default={}, dict_type={
            "tolerance": opt_float(),
            "max nodes": YamlElement("int", required=False),
            "anchor h": opt_float(),
            "anchor r": opt_float()
        }),
        "potential": YamlElement("dict", required=False, default={}, dict_type={
            "r": YamlElement("list", required=False, list_type=YamlElement("float")),
            "r min": opt_float(),
            "r max": opt_float(),
            "count": YamlElement("int", required=False)
        }),
        "spectrum": YamlElement("dict", required=False, default={}, dict_type={
            "n max": YamlElement("int", required=False)
        }),
        "green": YamlElement("dict", required=False, default={}, dict_type={
            "r": YamlElement("list", required=False, list_type=YamlElement("float")),
            "r prime": YamlElement("list", required=False, list_type=YamlElement("float")),
            "epsilon": opt_float()
        }),
        "verify": YamlElement("dict", required=False, default={}, dict_type={
            "tolerance factor": opt_float(),
            "bch a scale": opt_float()
        }),
        "output": YamlElement("dict", required=False, default={}, dict_type={
            "format": YamlElement("str", required=False)
        })
    })

def read_config_file(path: str) -> dict[str, dict[str, any]]:
    """Decode a YAML run configuration. Errors report the file."""
    source = SourcePosition(path, None, None)
    try:
        with open(path, 'r') as f:
            data = safe_load(f)
    except OSError as e:
        raise nzerr.UsageError(f"Cannot open config file: {e}", source) from e
    except YAMLError as e:
        raise nzerr.UsageError(f"Malformed YAML: {e}", source) from e
    return add_source_position(source)(decode_yaml)(data, config_spec())

def load_config(path: str = None, overrides: dict[str, dict[str, any]] = None) -> RunConfig:
    """Build the run configuration from an optional YAML file and command line values.

    overrides has the same sections and keys as the YAML file; None values are ignored
    and other values win over the file."""
    data = read_config_file(path) if path else decode_yaml({}, config_spec())
    for section, values in (overrides or {}).items():
        for key, value in values.items():
            if value is not None:
                data[section][key] = value

    params = {k: float(v) for k, v in data["parameters"].items()}

    m = data["map"]
    anchor = None
    if "anchor h" in m or "anchor r" in m:
        anchor = (m.get("anchor h", 1.0), m.get("anchor r", 0.0))
    defaults = MapConfig()
    map_config = MapConfig(tolerance=m.get("tolerance", defaults.tolerance),
                           max_nodes=m.get("max nodes", defaults.max_nodes),
                           anchor=anchor)

    p = data["potential"]
    potential = PotentialConfig(p.get("r"), p.get("r min"), p.get("r max"), p.get("count"))

    n_max = data["spectrum"].get("n max", 5)
    if n_max < 0:
        raise nzerr.InvalidValue("n max", n_max, "Must be non-negative.")

    g = data["green"]
    green = GreenConfig(g.get("r"), g.get("r prime"), g.get("epsilon"))

    v = data["verify"]
    verify = VerifyConfig(v.get("tolerance factor", 1.0), v.get("bch a scale", 1.0))
    if not math.isfinite(verify.bch_a_scale):
        raise nzerr.InvalidValue("bch a scale", verify.bch_a_scale, "Must be finite.")

    fmt = data["output"].get("format", "csv")
    if fmt not in FORMATS:
        raise nzerr.InvalidValue("format", fmt, f"Expected one of {', '.join(FORMATS)}.")

    logger.debug(f"configuration loaded from {path}" if path else "configuration from command line")
    return RunConfig(params, map_config, potential, n_max, green, verify, fmt, path)
