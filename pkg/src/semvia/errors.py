"""Exception types raised across the package."""


class DomainError(ValueError):
    """A parameter lies outside the domain where a quantity is defined."""


class DivergentSeries(DomainError):
    """A stationary series (e.g. the VIA pmf) fails its convergence condition."""


class TruncationTooSmall(ValueError):
    """A truncated chain leaves more tail mass than allowed."""


class NotIrreducible(ValueError):
    """An explicit chain does not have a single recurrent class."""


class NoConvergence(RuntimeError):
    def __init__(self, tol, iterations):
        super().__init__(f"stationary solve did not reach tol={tol:g} after {iterations} iterations")
        self.tol = tol
        self.iterations = iterations


class DegenerateOptimum(RuntimeError):
    """Grid search collapsed onto a parameterization with no stationary regime."""
