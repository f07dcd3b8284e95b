"""Algorithm configurations.

Each config class carries the tuned defaults of one algorithm. Fields listed
in ``TABLE_ROWS`` are the reference tuning parameters, keyed by snake_case
versions of their row labels. Other fields are implementation constants
(Gaussian step sizes, per-gene rates) that the reference parameters leave open.
"""
import math
from dataclasses import asdict, dataclass, fields
from typing import ClassVar

from ..errors import ConfigError


def _rate(name, value):
    if not 0.0 <= value <= 1.0:
        raise ConfigError(f"{name} must lie in [0, 1], got {value}")


def _positive(name, value):
    if not value > 0:
        raise ConfigError(f"{name} must be > 0, got {value}")


def _popsize(value, minimum=2):
    if int(value) != value or value < minimum:
        raise ConfigError(f"population_size must be an integer >= {minimum}, got {value}")


class _Config:
    tag: ClassVar[str]
    title: ClassVar[str]
    TABLE_ROWS: ClassVar[dict]

    def to_dict(self):
        return {"algorithm": self.tag, **asdict(self)}

    def describe(self):
        """Render the reference parameter block, then the implementation constants."""
        lines = [self.title]
        for key, label in self.TABLE_ROWS.items():
            lines.append(f"  {label:<48} {_fmt(getattr(self, key))}")
        extra = [f.name for f in fields(self) if f.name not in self.TABLE_ROWS]
        for key in extra:
            lines.append(f"  ({key}) {_fmt(getattr(self, key))}")
        return "\n".join(lines)

    __str__ = describe


def _fmt(v):
    if v is None:
        return "auto"
    if isinstance(v, float) and v.is_integer() and not math.isinf(v):
        return str(int(v))
    return str(v)


@dataclass(frozen=True)
class AisConfig(_Config):
    population_size: int = 50
    mutation_rate: float = 0.1
    number_of_clones: int = 5
    generations_to_keep: float = 68
    sigma: float = 1.0

    tag: ClassVar[str] = "ais"
    title: ClassVar[str] = "Artificial immune algorithm (AIS)"
    TABLE_ROWS: ClassVar[dict] = {
        "population_size": "Population size",
        "mutation_rate": "Mutation rate",
        "number_of_clones": "Number of clones",
        "generations_to_keep": "Number of generations to keep an individual",
    }

    def __post_init__(self):
        _popsize(self.population_size)
        _rate("mutation_rate", self.mutation_rate)
        if int(self.number_of_clones) != self.number_of_clones or self.number_of_clones < 1:
            raise ConfigError(f"number_of_clones must be a positive integer, got {self.number_of_clones}")
        if not self.generations_to_keep >= 0:
            raise ConfigError(f"generations_to_keep must be >= 0, got {self.generations_to_keep}")
        _positive("sigma", self.sigma)


@dataclass(frozen=True)
class ClonalgConfig(_Config):
    population_size: int = 100
    mutation_rate: float = 0.2
    cloned_antibodies: int = 10
    clones_per_antibody: float = 0.9
    regenerated_fraction: float = 0.0
    sigma: float = 0.25  # step = sigma * mutation_rate * exp(normalized error)

    tag: ClassVar[str] = "clonalg"
    title: ClassVar[str] = "Clonal selection algorithm (CLONALG)"
    TABLE_ROWS: ClassVar[dict] = {
        "population_size": "Population size",
        "mutation_rate": "Mutation rate",
        "cloned_antibodies": "Cloned antibodies in each generation",
        "clones_per_antibody": "Number of clones for every antibody (%)",
        "regenerated_fraction": "Fraction of population which is regenerated",
    }

    def __post_init__(self):
        _popsize(self.population_size)
        _rate("mutation_rate", self.mutation_rate)
        if int(self.cloned_antibodies) != self.cloned_antibodies or self.cloned_antibodies < 1:
            raise ConfigError(f"cloned_antibodies must be a positive integer, got {self.cloned_antibodies}")
        if self.cloned_antibodies > self.population_size:
            raise ConfigError(
                f"cloned_antibodies ({self.cloned_antibodies}) exceeds population_size ({self.population_size})"
            )
        _positive("clones_per_antibody", self.clones_per_antibody)
        _rate("regenerated_fraction", self.regenerated_fraction)
        _positive("sigma", self.sigma)


@dataclass(frozen=True)
class CmaesConfig(_Config):
    population_size: int = 20
    mu: int = 3
    mutation_probability: float = 0.7
    sigma0: float = 1.0

    tag: ClassVar[str] = "cmaes"
    title: ClassVar[str] = "Covariance matrix adaptation (CMA-ES)"
    TABLE_ROWS: ClassVar[dict] = {
        "population_size": "Population size",
        "mu": "Mu",
        "mutation_probability": "Mutation probability",
    }

    def __post_init__(self):
        _popsize(self.population_size)
        if int(self.mu) != self.mu or not 1 <= self.mu <= self.population_size:
            raise ConfigError(f"mu must be an integer in [1, population_size], got {self.mu}")
        # kept for the record only; canonical CMA-ES has no such gate
        _rate("mutation_probability", self.mutation_probability)
        _positive("sigma0", self.sigma0)


@dataclass(frozen=True)
class DeConfig(_Config):
    population_size: int = 500
    mutation_probability: float = 0.5
    scaling_constant: float = 0.4
    crossover_rate: float = 0.9

    tag: ClassVar[str] = "de"
    title: ClassVar[str] = "Differential evolution (DE)"
    TABLE_ROWS: ClassVar[dict] = {
        "population_size": "Population size",
        "mutation_probability": "Mutation probability",
        "scaling_constant": "Scaling constant",
        "crossover_rate": "Crossover rate",
    }

    def __post_init__(self):
        # rand/1 needs three distinct partners besides the target vector
        _popsize(self.population_size, minimum=4)
        _rate("mutation_probability", self.mutation_probability)
        if not self.scaling_constant >= 0:
            raise ConfigError(f"scaling_constant must be >= 0, got {self.scaling_constant}")
        _rate("crossover_rate", self.crossover_rate)


@dataclass(frozen=True)
class RwConfig(_Config):
    population_size: int = 500
    mutation_probability: float = 0.5
    crossover_probability: float = 0.9
    selection_pressure: float = 20
    sigma: float = 1.0
    gene_mutation_rate: float | None = None

    tag: ClassVar[str] = "rw"
    title: ClassVar[str] = "Roulette wheel genetic algorithm (RW)"
    TABLE_ROWS: ClassVar[dict] = {
        "population_size": "Population size",
        "mutation_probability": "Mutation probability",
        "crossover_probability": "Crossover probability",
        "selection_pressure": "Selection pressure",
    }

    def __post_init__(self):
        _popsize(self.population_size)
        _rate("mutation_probability", self.mutation_probability)
        _rate("crossover_probability", self.crossover_probability)
        if not self.selection_pressure >= 1:
            raise ConfigError(f"selection_pressure must be >= 1, got {self.selection_pressure}")
        _positive("sigma", self.sigma)
        if self.gene_mutation_rate is not None:
            _rate("gene_mutation_rate", self.gene_mutation_rate)


@dataclass(frozen=True)
class SstConfig(_Config):
    population_size: int = 20
    mutation_probability: float = 0.9
    tournament_size: int = 3
    sigma: float = 1.0
    gene_mutation_rate: float | None = 0.2  # per gene; None means 1/d

    tag: ClassVar[str] = "sst"
    title: ClassVar[str] = "Steady state genetic algorithm (SST)"
    TABLE_ROWS: ClassVar[dict] = {
        "population_size": "Population size",
        "mutation_probability": "Mutation probability",
        "tournament_size": "Tournament size",
    }

    def __post_init__(self):
        _popsize(self.population_size)
        _rate("mutation_probability", self.mutation_probability)
        if int(self.tournament_size) != self.tournament_size or self.tournament_size < 2:
            raise ConfigError(f"tournament_size must be an integer >= 2, got {self.tournament_size}")
        if self.tournament_size > self.population_size:
            raise ConfigError(
                f"tournament_size ({self.tournament_size}) exceeds population_size ({self.population_size})"
            )
        _positive("sigma", self.sigma)
        if self.gene_mutation_rate is not None:
            _rate("gene_mutation_rate", self.gene_mutation_rate)


CONFIGS = {c.tag: c for c in (AisConfig, ClonalgConfig, CmaesConfig, DeConfig, RwConfig, SstConfig)}
ALGORITHMS = tuple(CONFIGS)

AlgorithmConfig = AisConfig | ClonalgConfig | CmaesConfig | DeConfig | RwConfig | SstConfig


def default_config(tag):
    return config_from_dict({"algorithm": tag})


def config_from_dict(doc):
    """Build a config from ``{"algorithm": tag, <field>: value, ...}``; missing fields take defaults."""
    doc = dict(doc)
    tag = str(doc.pop("algorithm", "")).lower()
    if tag not in CONFIGS:
        raise ConfigError(f"unknown algorithm {tag!r}; valid tags: {', '.join(ALGORITHMS)}")
    cls = CONFIGS[tag]
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(doc) - known)
    if unknown:
        raise ConfigError(f"unknown {tag} parameter(s): {', '.join(unknown)}")
    if doc.get("generations_to_keep") in ("inf", "infinity", ".inf"):
        doc["generations_to_keep"] = math.inf
    try:
        return cls(**doc)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
