import math

from .errors import ParamRange


def sphere_measure(n: int) -> float:
    """(n-1)-dimensional measure of the unit sphere S^{n-1} in R^n."""
    if n < 1:
        raise ParamRange("sphere_measure needs n >= 1")
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)
