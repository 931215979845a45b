"""Configuration for the q-Euler toolkit."""

from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from dotenv import dotenv_values
from pydantic import BaseModel, field_validator

from arith import Backend, QBracketContext, QParam
from arith.scalar import check_prime
from qeuler.parser import parse_degrees, parse_q

# Numeric defaults
DEFAULT_PRIME = 3
DEFAULT_PRECISION = 6
DEFAULT_BACKEND = "padic"
DEFAULT_FORMAT = "json"

OUTPUT_FORMATS = ("json", "csv", "text")

# Keys recognized in a --config file
CONFIG_KEYS = {
    "QEULER_PRIME": "prime",
    "QEULER_PRECISION": "precision",
    "QEULER_BACKEND": "backend",
    "QEULER_FORMAT": "output_format",
}


def load_defaults(path: Optional[Union[str, Path]] = None) -> Dict[str, Any]:
    """
    Built-in defaults, overlaid with the QEULER_* keys of a dotenv-format file.

    Args:
        path: Optional defaults file; the process environment is never read

    Returns:
        Mapping of RunConfig field names to values
    """
    defaults: Dict[str, Any] = {
        "prime": DEFAULT_PRIME,
        "precision": DEFAULT_PRECISION,
        "backend": DEFAULT_BACKEND,
        "output_format": DEFAULT_FORMAT,
    }
    if path is None:
        return defaults
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"設定ファイルが見つかりません: {path}")
    for key, value in dotenv_values(path).items():
        if key in CONFIG_KEYS and value is not None:
            defaults[CONFIG_KEYS[key]] = value
    return defaults


class RunConfig(BaseModel):
    """Validated settings for one command."""

    prime: int = DEFAULT_PRIME
    precision: int = DEFAULT_PRECISION
    backend: Backend = Backend(DEFAULT_BACKEND)
    q: Optional[str] = None
    degrees: str = "0"
    n_max: Optional[int] = None
    output_format: str = DEFAULT_FORMAT

    @field_validator("prime")
    @classmethod
    def validate_prime(cls, v: int) -> int:
        return check_prime(v)

    @field_validator("precision")
    @classmethod
    def validate_precision(cls, v: int) -> int:
        if v < 1:
            raise ValueError(f"precision must be at least 1, got {v}")
        return v

    @field_validator("q")
    @classmethod
    def validate_q(cls, v: Optional[str]) -> Optional[str]:
        if v is not None:
            parse_q(v)
        return v

    @field_validator("degrees")
    @classmethod
    def validate_degrees(cls, v: str) -> str:
        parse_degrees(v)
        return v

    @field_validator("n_max")
    @classmethod
    def validate_n_max(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and v < 1:
            raise ValueError(f"level cap must be at least 1, got {v}")
        return v

    @field_validator("output_format")
    @classmethod
    def validate_format(cls, v: str) -> str:
        if v not in OUTPUT_FORMATS:
            raise ValueError(f"format must be one of {', '.join(OUTPUT_FORMATS)}, got {v!r}")
        return v

    @property
    def q_text(self) -> str:
        """q as given, defaulting to 1 + p."""
        return self.q if self.q is not None else str(1 + self.prime)

    @property
    def degree_list(self) -> List[int]:
        return parse_degrees(self.degrees)

    def q_param(self, backend: Optional[Backend] = None) -> QParam:
        value = parse_q(self.q_text)
        backend = self.backend if backend is None else backend
        precision = self.precision if backend is Backend.PADIC else None
        return QParam.from_rational(value.numerator, value.denominator, self.prime,
                                    backend, precision)

    def context(self, backend: Optional[Backend] = None) -> QBracketContext:
        """Bracket context for q in the configured (or the given) backend."""
        return QBracketContext(self.q_param(backend))
