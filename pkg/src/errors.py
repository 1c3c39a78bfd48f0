#!/usr/bin/env python3

from typing import Optional


class TropDynError(ValueError):
    """Base class for every error raised by the tropdyn library"""

    exit_code = 1


class DomainError(TropDynError):
    exit_code = 2


class DimensionMismatchError(DomainError):
    pass


class InvalidPolynomialError(DomainError):
    pass


class EmptyLevelSetError(DomainError):
    def __init__(self, level, maximum):
        self.level = level
        self.maximum = maximum
        super().__init__(f"Level {level} is above the maximum of h° ({maximum}); level set is empty")


class DegeneratePolytopeError(DomainError):
    pass


class OffSkeletonError(DomainError):
    pass


class InvalidMapError(DomainError):
    pass


class ConcavityError(DomainError):
    pass


class LatticeDirectionError(DomainError):
    pass


class ConfigError(DomainError):
    pass


class DynamicsPreconditionError(TropDynError):
    exit_code = 3


class NotHyperbolicError(DynamicsPreconditionError):
    def __init__(self, message: str, eigenvalues: Optional[list] = None):
        self.eigenvalues = eigenvalues or []
        super().__init__(message)


class UndefinedReflectionError(DynamicsPreconditionError):
    pass


class InternalConsistencyError(TropDynError):
    exit_code = 4


class OrbitBlowupError(InternalConsistencyError):
    pass
