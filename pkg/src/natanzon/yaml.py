import logging
import math

import natanzon.errors as nzerr

logger = logging.getLogger(__name__)

class YamlElement():
    def __init__(self,
                 type: str,
                 required: bool = True,
                 default: any = None,
                 list_type: 'YamlElement' = None,
                 dict_type: dict[str, 'YamlElement'] = None) -> None:
        """
        type: type of the element (str, int, float, list, dict)
        required: True if the element is required. Applies only to dict elements.
        default: default value if the element is not present. Applies only to dict elements.
            If default is None, the element will not be present in the dict.
        list_type: type of the list elements
        dict_type: type of the dict values
        """
        self.type = type
        self.required = required
        self.default = default
        self.list_type = list_type
        self.dict_type = dict_type

def read_float(s: str, name: str = "value") -> float:
    """Read a finite float from a string."""
    try:
        x = float(s)
    except ValueError as e:
        raise nzerr.InvalidValue(name, s, "Expected a real number.") from e
    if not math.isfinite(x):
        raise nzerr.InvalidValue(name, s, "Expected a finite number.")
    return x

def read_int(s: str, name: str = "value") -> int:
    """Read an integer from a string."""
    try:
        return int(s)
    except ValueError as e:
        raise nzerr.InvalidValue(name, s, "Expected an integer.") from e

def decode_yaml(data: any, spec: YamlElement, name: str = "value") -> any:
    """Decode a yaml document against spec.

    Keys of dict elements not listed in the spec raise UnknownKey."""

    if spec.type == "str":
        if not isinstance(data, str):
            raise nzerr.InvalidYamlType("str", type(data).__name__)
        return data
    elif spec.type == "int":
        if isinstance(data, bool):
            raise nzerr.InvalidYamlType("int", "bool")
        if isinstance(data, int):
            return data
        elif isinstance(data, str):
            return read_int(data, name)
        else:
            raise nzerr.InvalidYamlType("int", type(data).__name__)
    elif spec.type == "float":
        if isinstance(data, bool):
            raise nzerr.InvalidYamlType("float", "bool")
        if isinstance(data, (int, float, str)):
            # PyYAML reads 1e-3 (no dot) as a string
            return read_float(data, name)
        else:
            raise nzerr.InvalidYamlType("float", type(data).__name__)
    elif spec.type == "list":
        if not isinstance(data, list):
            raise nzerr.InvalidYamlType("list", type(data).__name__)
        return [decode_yaml(e, spec.list_type, name) for e in data]
    elif spec.type == "dict":
        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise nzerr.InvalidYamlType("dict", type(data).__name__)
        for k in data.keys():
            if k not in spec.dict_type:
                raise nzerr.UnknownKey(str(k))
        d = {}
        for k, e in spec.dict_type.items():
            if k in data:
                d[k] = decode_yaml(data[k], e, k)
            elif e.required:
                raise nzerr.MissingRequiredKey(k)
            elif e.default is not None:
                d[k] = e.default
        return d
    else:
        raise nzerr.UsageError(f"Unsupported YAML element type {spec.type}")
