"""
Error types and shared argument checks.

Every public entry point validates its arguments through ``ParamValidator`` and
reports failures with one of the exceptions below.
"""

import math
from typing import Any, Iterable, Optional, Sequence


class FracsobError(Exception):
    pass


class InvalidArgumentError(FracsobError, ValueError):
    pass


class DivergentIntegralError(FracsobError, ArithmeticError):
    pass


class PVInstabilityError(FracsobError, ArithmeticError):
    pass


class TraceUndefinedError(FracsobError, ValueError):
    pass


class WrongRegimeError(FracsobError, ValueError):
    pass


class UnsupportedDomainError(FracsobError, ValueError):
    pass


class PreconditionViolationError(FracsobError, ValueError):
    pass


class ParamValidator:
    @staticmethod
    def require_order(s: float, allow_one: bool = False) -> float:
        """Check that a fractional order lies in (0,1), or (0,1] when ``allow_one``."""
        s = float(s)
        upper_ok = s <= 1.0 if allow_one else s < 1.0
        if not (s > 0.0 and upper_ok):
            bound = "(0, 1]" if allow_one else "(0, 1)"
            raise InvalidArgumentError(f"Fractional order s={s} must lie in {bound}")
        return s

    @staticmethod
    def require_exponent(p: float) -> float:
        p = float(p)
        if not (p >= 1.0 and math.isfinite(p)):
            raise InvalidArgumentError(f"Integrability exponent p={p} must be finite and >= 1")
        return p

    @staticmethod
    def require_dimension(n: int, allowed: Optional[Iterable[int]] = None) -> int:
        if isinstance(n, bool) or int(n) != n or n < 1:
            raise InvalidArgumentError(f"Dimension n={n} must be a positive integer")
        n = int(n)
        if allowed is not None and n not in tuple(allowed):
            raise InvalidArgumentError(f"Dimension n={n} is not supported here (allowed: {tuple(allowed)})")
        return n

    @staticmethod
    def require_positive(value: float, name: str) -> float:
        value = float(value)
        if not (value > 0.0 and math.isfinite(value)):
            raise InvalidArgumentError(f"{name}={value} must be finite and > 0")
        return value

    @staticmethod
    def require_non_empty(values: Sequence[Any], name: str) -> list:
        values = list(values)
        if not values:
            raise InvalidArgumentError(f"{name} must not be empty")
        return values

    @staticmethod
    def require_subcritical(n: int, sp: float) -> None:
        """Sobolev-type statements need s*p < n."""
        if sp >= n:
            raise WrongRegimeError(
                f"s*p={sp:g} >= n={n}: the critical-exponent regime requires s*p < n; "
                f"use holder_check for s*p > n"
            )

    @staticmethod
    def require_supercritical(n: int, sp: float) -> None:
        """Hoelder-type statements need s*p > n."""
        if sp <= n:
            raise WrongRegimeError(
                f"s*p={sp:g} <= n={n}: the Hoelder regime requires s*p > n; "
                f"use sobolev_ratio for s*p < n"
            )
