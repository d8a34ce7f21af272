from dataclasses import dataclass

from .exceptions import DegenerateSchedulingError, ValidationError


@dataclass(frozen=True)
class ModelParams:
    """Per-step probabilities of the sleep-scheduled SIS process.

    Attributes
    ----------
    beta : float
        Infection probability per active infected neighbour.
    gamma : float
        Recovery probability of an active infected node.
    u : float
        Active -> sleep probability.
    v : float
        Sleep -> active probability.
    """

    beta: float
    gamma: float
    u: float
    v: float

    def __post_init__(self):
        for name in ("beta", "gamma", "u", "v"):
            value = getattr(self, name)
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise ValidationError(f"{name} must be a number, got {value!r}") from None
            if not 0.0 <= value <= 1.0:
                raise ValidationError(f"{name} must lie in [0, 1], got {value}")
            object.__setattr__(self, name, value)
        if self.u + self.v <= 0.0:
            raise DegenerateSchedulingError("u = v = 0: sleep scheduling has no stationary split")

    @property
    def active_fraction(self):
        return self.v / (self.u + self.v)

    @property
    def sleep_ratio(self):
        if self.v == 0.0:
            raise DegenerateSchedulingError("v = 0: sleep/active ratio u/v is undefined")
        return self.u / self.v

    def replace(self, **changes):
        fields = {"beta": self.beta, "gamma": self.gamma, "u": self.u, "v": self.v}
        fields.update(changes)
        return ModelParams(**fields)
