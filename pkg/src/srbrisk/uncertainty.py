"""Activity-duration uncertainty.

Every family is driven by a standard-normal deviate ``z`` and maps it
monotonically to a duration, so the same deviate table can be replayed
across control periods and candidate schedules (common random numbers).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy import special

from .errors import SRBError, ValidationError
from .instance_io import MultiProjectProblem, ProjectInstance

__all__ = [
    "FAMILIES",
    "DurationSpec",
    "DurationModel",
    "lognormal_params",
    "assign_cvs",
    "sample_duration",
    "build_model",
]

FAMILIES = ("lognormal", "triangular", "beta", "uniform", "normal", "two-point", "deterministic")

# Symmetric Beta(4, 4) on mean +/- 3 sd has exactly the requested variance.
_BETA_SHAPE = 4.0


@dataclass(frozen=True)
class DurationSpec:
    family: str
    mean: float
    cv: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValidationError(f"unknown duration family {self.family!r}; choose from {FAMILIES}")
        if not (math.isfinite(self.mean) and math.isfinite(self.cv)):
            raise ValidationError("mean and cv must be finite")
        if self.mean < 0:
            raise ValidationError(f"mean duration must be non-negative, got {self.mean}")
        if self.cv < 0:
            raise ValidationError(f"cv must be non-negative, got {self.cv}")
        if self.family != "deterministic" and self.cv > 0 and self.mean == 0:
            raise ValidationError("a stochastic duration needs a positive mean")

    @property
    def sd(self) -> float:
        return self.cv * self.mean

    @property
    def is_deterministic(self) -> bool:
        return self.family == "deterministic" or self.cv == 0 or self.mean == 0

    @classmethod
    def fixed(cls, duration: float) -> "DurationSpec":
        return cls("deterministic", float(duration), 0.0)


def lognormal_params(mean: float, cv: float) -> tuple[float, float]:
    """Location and scale of the normal underlying a lognormal with the
    given mean and coefficient of variation."""
    if not mean > 0:
        raise ValueError(f"lognormal mean must be positive, got {mean}")
    if not cv > 0:
        raise ValueError(f"lognormal cv must be positive, got {cv}")
    var_log = math.log1p(cv * cv)
    return math.log(mean) - var_log / 2.0, math.sqrt(var_log)


def sample_duration(spec: DurationSpec, z):
    """Duration(s) for standard-normal deviate(s) ``z``.

    Non-lognormal families push ``z`` through the inverse CDF via Phi(z).
    Results are clipped at zero; that only bites for normal samples and for
    bounded families whose support would otherwise reach below zero
    (cv above 1/3 for beta).
    """
    z = np.asarray(z, dtype=float)
    if spec.is_deterministic:
        return np.full(z.shape, float(spec.mean)) if z.ndim else float(spec.mean)
    m, sd, fam = spec.mean, spec.sd, spec.family
    if fam == "lognormal":
        loc, scale = lognormal_params(m, spec.cv)
        out = np.exp(loc + scale * z)
    elif fam == "normal":
        out = m + sd * z
    elif fam == "uniform":
        u = special.ndtr(z)
        out = m + sd * math.sqrt(3.0) * (2.0 * u - 1.0)
    elif fam == "triangular":
        half = math.sqrt(6.0) * sd
        lower_tail = special.ndtr(np.minimum(z, 0.0))  # u for z < 0
        upper_tail = special.ndtr(-np.maximum(z, 0.0))  # 1 - u for z >= 0
        out = np.where(
            z < 0,
            m - half + half * np.sqrt(2.0 * lower_tail),
            m + half - half * np.sqrt(2.0 * upper_tail),
        )
    elif fam == "beta":
        u = special.ndtr(z)
        x = special.betaincinv(_BETA_SHAPE, _BETA_SHAPE, u)
        out = m + 3.0 * sd * (2.0 * x - 1.0)
    elif fam == "two-point":
        out = np.where(z < 0, m - sd, m + sd)
    else:  # pragma: no cover - guarded by DurationSpec
        raise ValidationError(fam)
    out = np.maximum(out, 0.0)
    return out if out.ndim else float(out)


def assign_cvs(target, seed: int, lo: float = 0.10, hi: float = 0.30) -> dict[tuple[int, int], float]:
    """Draw one cv ~ U(lo, hi) per real activity; dummies get 0.

    Each draw comes from a generator seeded with ``(seed, project,
    activity)``, so the result does not depend on declaration order.
    Keys are ``(project, activity)`` as in schedule files.
    """
    if lo < 0 or hi < lo:
        raise ValueError(f"need 0 <= lo <= hi, got lo={lo}, hi={hi}")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    out = {}
    for project, inst in _projects(target):
        for act in inst.activities:
            if inst.is_dummy(act.id):
                out[(project, act.label)] = 0.0
            elif lo == hi:
                out[(project, act.label)] = float(lo)
            else:
                rng = np.random.default_rng([seed, project, act.label])
                out[(project, act.label)] = float(rng.uniform(lo, hi))
    return out


def _projects(target):
    if isinstance(target, ProjectInstance):
        return [(1, target)]
    if isinstance(target, MultiProjectProblem):
        return [(p, e.instance) for p, e in enumerate(target.projects, start=1)]
    raise TypeError(f"expected ProjectInstance or MultiProjectProblem, got {type(target).__name__}")


@dataclass
class DurationModel:
    """Per-activity duration specs plus the replication seed and count.

    ``cv_range`` and ``cv_seed`` only document how the cvs were drawn.
    """

    specs: Mapping[tuple[int, int], DurationSpec]
    seed: int
    replications: int = 10_000
    cv_range: tuple[float, float] | None = None
    cv_seed: int | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.replications < 2:
            raise ValidationError("replications must be at least 2 to estimate a variance")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must be a 64-bit unsigned integer")
        for key, spec in self.specs.items():
            if spec.cv >= 1:
                raise ValidationError(f"activity {key}: cv must be below 1, got {spec.cv}")

    @property
    def family(self) -> str:
        fams = {s.family for s in self.specs.values() if s.family != "deterministic"}
        if not fams:
            return "deterministic"
        return fams.pop() if len(fams) == 1 else "mixed"

    def spec_for(self, key) -> DurationSpec | None:
        return self.specs.get(key)

    def with_seed(self, seed: int) -> "DurationModel":
        return DurationModel(dict(self.specs), seed, self.replications, self.cv_range, self.cv_seed, dict(self.extra))

    def with_replications(self, replications: int) -> "DurationModel":
        return DurationModel(dict(self.specs), self.seed, replications, self.cv_range, self.cv_seed, dict(self.extra))

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "family": self.family,
            "seed": self.seed,
            "replications": self.replications,
            "cv_range": list(self.cv_range) if self.cv_range else None,
            "cv_seed": self.cv_seed,
            "activities": [
                {"project": p, "activity": a, "family": s.family, "mean": s.mean, "cv": s.cv}
                for (p, a), s in sorted(self.specs.items())
            ],
            **({"extra": self.extra} if self.extra else {}),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: Mapping) -> "DurationModel":
        try:
            specs = {
                (int(r["project"]), int(r["activity"])): DurationSpec(r["family"], float(r["mean"]), float(r["cv"]))
                for r in data["activities"]
            }
            cv_range = tuple(data["cv_range"]) if data.get("cv_range") else None
            return cls(
                specs=specs,
                seed=int(data["seed"]),
                replications=int(data["replications"]),
                cv_range=cv_range,
                cv_seed=data.get("cv_seed"),
                extra=dict(data.get("extra", {})),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SRBError(f"malformed duration model: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "DurationModel":
        return cls.from_dict(json.loads(text))


def build_model(
    target,
    family: str = "lognormal",
    cv_lo: float = 0.10,
    cv_hi: float = 0.30,
    cv_seed: int = 0,
    seed: int | None = None,
    replications: int = 10_000,
    cvs: Mapping[tuple[int, int], float] | None = None,
) -> DurationModel:
    """Model whose means are the planned activity durations.

    cvs come from :func:`assign_cvs` unless given explicitly; dummies and
    zero-duration activities are deterministic.
    """
    if family not in FAMILIES:
        raise ValidationError(f"unknown duration family {family!r}")
    if cvs is None:
        cvs = assign_cvs(target, cv_seed, cv_lo, cv_hi)
    specs = {}
    for project, inst in _projects(target):
        for act in inst.activities:
            key = (project, act.label)
            cv = float(cvs.get(key, 0.0))
            if inst.is_dummy(act.id) or act.duration == 0 or family == "deterministic":
                specs[key] = DurationSpec.fixed(act.duration)
            else:
                specs[key] = DurationSpec(family, float(act.duration), cv)
    return DurationModel(
        specs=specs,
        seed=cv_seed if seed is None else seed,
        replications=replications,
        cv_range=(cv_lo, cv_hi),
        cv_seed=cv_seed,
    )
