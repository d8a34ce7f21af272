"""Time-indexed compartment fractions and their CSV form."""
import io
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .exceptions import ValidationError

STATES = ("US", "AS", "UI", "AI")


class Fractions(NamedTuple):
    rho_US: float
    rho_AS: float
    rho_UI: float
    rho_AI: float

    @property
    def infected(self):
        return self.rho_UI + self.rho_AI

    @property
    def active(self):
        return self.rho_AS + self.rho_AI

    @property
    def asleep(self):
        return self.rho_US + self.rho_UI


def _fmt(x):
    # repr of a Python float is the shortest string that round-trips exactly
    return repr(float(x))


@dataclass(frozen=True, eq=False)
class FractionSeries:
    """Fractions ``(rho_US, rho_AS, rho_UI, rho_AI)`` at steps ``t``.

    ``sd`` holds the per-step sample standard deviation when the series is an
    ensemble mean. ``settled`` is False when a run stopped at its step cap
    before meeting its convergence criterion.
    """

    t: np.ndarray
    values: np.ndarray
    sd: Optional[np.ndarray] = None
    settled: bool = True

    def __post_init__(self):
        if self.values.ndim != 2 or self.values.shape[1] != 4:
            raise ValidationError("values must have shape (steps, 4)")
        if len(self.t) != len(self.values):
            raise ValidationError("t and values differ in length")
        if len(self.t) and (self.t[0] != 0 or np.any(np.diff(self.t) <= 0)):
            raise ValidationError("step indices must increase strictly from 0")

    def __len__(self):
        return len(self.t)

    def __eq__(self, other):
        if not isinstance(other, FractionSeries):
            return NotImplemented
        sd_equal = (self.sd is None and other.sd is None) or (
            self.sd is not None and other.sd is not None and np.array_equal(self.sd, other.sd)
        )
        return (
            np.array_equal(self.t, other.t)
            and np.array_equal(self.values, other.values)
            and sd_equal
            and self.settled == other.settled
        )

    __hash__ = None

    def at(self, i):
        return Fractions(*map(float, self.values[i]))

    @property
    def final(self):
        return self.at(-1)

    def tail_mean(self, fraction=0.25):
        """Mean fractions over the last ``fraction`` of the recorded rows."""
        k = max(1, int(round(len(self) * fraction)))
        return Fractions(*map(float, self.values[-k:].mean(axis=0)))

    def to_csv(self, path_or_buf=None):
        """Write ``t,rho_US,rho_AS,rho_UI,rho_AI`` (plus ``sd_*`` columns for
        ensembles) at full double precision. Returns the text when no target
        is given."""
        header = ["t"] + [f"rho_{s}" for s in STATES]
        if self.sd is not None:
            header += [f"sd_{s}" for s in STATES]
        buf = io.StringIO()
        buf.write(",".join(header) + "\n")
        for i, t in enumerate(self.t.tolist()):
            row = [str(t)] + [_fmt(x) for x in self.values[i]]
            if self.sd is not None:
                row += [_fmt(x) for x in self.sd[i]]
            buf.write(",".join(row) + "\n")
        text = buf.getvalue()
        if path_or_buf is None:
            return text
        if hasattr(path_or_buf, "write"):
            path_or_buf.write(text)
        else:
            with open(path_or_buf, "w", newline="\n") as fh:
                fh.write(text)
        return None

    @classmethod
    def from_csv(cls, path_or_buf):
        if hasattr(path_or_buf, "read"):
            text = path_or_buf.read()
        else:
            with open(path_or_buf) as fh:
                text = fh.read()
        lines = text.strip().splitlines()
        header = lines[0].split(",")
        rows = np.array([[float(x) for x in line.split(",")] for line in lines[1:]]).reshape(-1, len(header))
        sd = rows[:, 5:9] if len(header) == 9 else None
        return cls(rows[:, 0].astype(np.int64), rows[:, 1:5], sd)
