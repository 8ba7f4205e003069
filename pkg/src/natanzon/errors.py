import logging
import os

logger = logging.getLogger(__name__)

class SourcePosition:
    """Class to store the source position of an error"""
    def __init__(self,file: str, line: int = None, column: int = None):
        self.file = file
        self.line = line
        self.column = column

    def __str__(self):
        if self.line is None:
            return f"{self.file}"
        if self.column is None:
            return f"{self.file}:{self.line}"
        return f"{self.file}:{self.line}:{self.column}"

def add_source_position(source: SourcePosition):
    def decorator(function):
        def wrapper(*args, **kwargs):
            try:
                return function(*args, **kwargs)
            except NatanzonException as e:
                if e.source is None:
                    e.source = source
                    e.args = (e.render(),)
                raise
        return wrapper
    return decorator

class NatanzonException(Exception):
    """Base exception class for natanzon."""
    exit_code = 3

    def __init__(self, message: str, source: SourcePosition = None):
        self.message = message
        self.source = source
        super().__init__(self.render())

    def render(self) -> str:
        msg = self.message if self.message else ""
        if self.source is not None:
            basename = os.path.basename(self.source.file)
            msg = msg + f"\nFile: {basename}\n" + f"Fullpath: {self.source}"
        return msg

# Usage and configuration errors

class UsageError(NatanzonException):
    """Exception raised when the command line is malformed"""
    exit_code = 1

    def __init__(self, message: str, source: SourcePosition = None):
        super().__init__(message, source)

class InvalidYamlType(UsageError):
    """Exception raised when the YAML type is invalid"""
    def __init__(self, expected_type: str, actual_type: str, source: SourcePosition = None):
        self.expected_type = expected_type
        self.actual_type = actual_type
        msg = f"Invalid YAML type. Expected: {expected_type}. Actual: {actual_type}"
        super().__init__(msg, source)

class MissingRequiredKey(UsageError):
    """Exception raised when a key is missing"""
    def __init__(self, key: str, source: SourcePosition = None):
        self.key = key
        msg = f"Missing key: {key}"
        super().__init__(msg, source)

class UnknownKey(UsageError):
    """Exception raised when a configuration key is not recognized"""
    def __init__(self, key: str, source: SourcePosition = None):
        self.key = key
        msg = f"Unknown key '{key}' in YAML config."
        super().__init__(msg, source)

class InvalidValue(UsageError):
    """Exception raised when a configuration value is out of range"""
    def __init__(self, name: str, value: any, reason: str, source: SourcePosition = None):
        self.name = name
        self.value = value
        msg = f"Invalid value for {name}: {value}. {reason}"
        super().__init__(msg, source)

# Domain errors

class DomainError(NatanzonException):
    """Exception raised when an argument lies outside the domain of an operation"""
    exit_code = 2

    def __init__(self, message: str, source: SourcePosition = None):
        super().__init__(message, source)

class InvalidParams(DomainError):
    """Exception raised when sigma1, sigma2 and c0 all vanish"""
    def __init__(self, source: SourcePosition = None):
        msg = ("Invalid potential parameters: sigma1, sigma2 and c0 are all zero. "
               "R(h) vanishes identically and the coordinate map dh/dr = 2h/sqrt(R) is singular.")
        super().__init__(msg, source)

class RadicandError(DomainError):
    """Exception raised when a square root radicand of the quantization condition is negative"""
    def __init__(self, name: str, value: float, epsilon: float, source: SourcePosition = None):
        self.name = name
        self.value = value
        self.epsilon = epsilon
        msg = f"Energy {epsilon!r} is not admissible: {name} = {value!r}"
        super().__init__(msg, source)

class OutOfDomain(DomainError):
    """Exception raised when a coordinate lies outside the domain of the map"""
    def __init__(self, variable: str, value: float, domain: tuple[float, float], source: SourcePosition = None):
        self.variable = variable
        self.value = value
        self.domain = domain
        msg = f"{variable} = {value!r} lies outside the open interval ({domain[0]!r}, {domain[1]!r})"
        super().__init__(msg, source)

class PoleError(DomainError):
    """Exception raised when evaluating at a pole of the Gamma function"""
    def __init__(self, x: float, source: SourcePosition = None):
        self.x = x
        msg = f"Gamma function pole at {x!r}"
        super().__init__(msg, source)

class DegenerateParameterError(DomainError):
    """Exception raised when the lower parameter of a confluent function is a non-positive integer"""
    def __init__(self, b: float, source: SourcePosition = None):
        self.b = b
        msg = f"Confluent hypergeometric function undefined for b = {b!r}"
        super().__init__(msg, source)

class PreconditionError(DomainError):
    """Exception raised when an operation is called outside its validity range"""
    def __init__(self, operation: str, condition: str, source: SourcePosition = None):
        self.operation = operation
        self.condition = condition
        msg = f"{operation}: requires {condition}"
        super().__init__(msg, source)

# Numerical failures

class NumericalError(NatanzonException):
    """Exception raised when a numerical procedure fails"""
    exit_code = 3

    def __init__(self, message: str, source: SourcePosition = None):
        super().__init__(message, source)

class ConvergenceError(NumericalError):
    """Exception raised when a series or an iteration exhausts its budget"""
    def __init__(self, what: str, detail: str = "", source: SourcePosition = None):
        self.what = what
        msg = f"{what} did not converge" + (f": {detail}" if detail else "")
        super().__init__(msg, source)

class QuadratureError(NumericalError):
    """Exception raised when a quadrature misses its accuracy target"""
    def __init__(self, estimate: float, target: float, source: SourcePosition = None):
        self.estimate = estimate
        self.target = target
        msg = f"Quadrature error estimate {estimate!r} exceeds target {target!r}"
        super().__init__(msg, source)

class MultipleRootsError(NumericalError):
    """Exception raised when more than one root passes the branch filter"""
    def __init__(self, n: int, roots: list[float], source: SourcePosition = None):
        self.n = n
        self.roots = roots
        msg = f"Quantization condition for n = {n} has several admissible roots: {roots}"
        super().__init__(msg, source)

class VerificationFailed(NumericalError):
    """Exception raised when at least one verification check fails"""
    def __init__(self, failed: list[str], source: SourcePosition = None):
        self.failed = failed
        msg = f"Verification failed: {', '.join(failed)}"
        super().__init__(msg, source)
