"""Stochastic growth engines.

All models start from the primordial hypergraph (one vertex, one edge)
and add one edge per step:

* ``rrh``            join the new vertex to a uniformly random edge;
* ``redirect``       pick a random edge e, attach to e with probability
                     1-r, with probability r attach to the maternal edge
                     of e (the primordial edge has none, so e itself);
* ``duplicate``      with probability 1-mu grow as in rrh, with
                     probability mu copy a random edge without adding a
                     vertex;
* ``choice-smaller`` draw two edges with replacement, attach to the
                     smaller one, ties broken by a fair coin.

Growth is O(N) per realization; the heavy lifting lives in the kernel
backend, these wrappers only shape configs and results.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .backend import kernels
from .edgetree import EdgeTree, MultiHypergraph
from .rng import DEFAULT_SEED, RngStream

MODELS = ("rrh", "redirect", "duplicate", "choice-smaller")
_KIND = {"rrh": 0, "redirect": 1, "choice-smaller": 2}


@dataclass(frozen=True)
class ModelConfig:
    """Growth model plus exactly the parameters that model takes."""

    model: str
    target_n: int
    seed: int = DEFAULT_SEED
    r: float | Fraction | None = None
    mu: float | Fraction | None = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}")
        if self.target_n < 1:
            raise ValueError("target_n must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if (self.r is not None) != (self.model == "redirect"):
            raise ValueError("r is set if and only if model is 'redirect'")
        if (self.mu is not None) != (self.model == "duplicate"):
            raise ValueError("mu is set if and only if model is 'duplicate'")
        if self.r is not None and not 0 <= self.r <= 1:
            raise ValueError("r must lie in [0, 1]")
        if self.mu is not None and not 0 <= self.mu <= 1:
            raise ValueError("mu must lie in [0, 1]")

    @property
    def kind(self) -> int:
        """Kernel code of the model (duplicate has its own kernel)."""
        if self.model == "duplicate":
            raise ValueError("duplicate growth uses grow_duplicate_arrays")
        return _KIND[self.model]

    @property
    def param(self) -> float:
        if self.model == "redirect":
            return float(self.r)
        if self.model == "duplicate":
            return float(self.mu)
        return 0.0

    def to_json_dict(self) -> dict:
        d = {"model": self.model, "target_n": self.target_n, "seed": self.seed}
        if self.r is not None:
            d["r"] = str(Fraction(self.r)) if isinstance(self.r, Fraction) else self.r
        if self.mu is not None:
            d["mu"] = str(Fraction(self.mu)) if isinstance(self.mu, Fraction) else self.mu
        return d

    @classmethod
    def from_json_dict(cls, d: dict) -> "ModelConfig":
        r = d.get("r")
        mu = d.get("mu")
        return cls(
            model=d["model"],
            target_n=d["target_n"],
            seed=d.get("seed", DEFAULT_SEED),
            r=Fraction(r) if isinstance(r, str) else r,
            mu=Fraction(mu) if isinstance(mu, str) else mu,
        )


def grow_rrh(n: int, rng: RngStream) -> EdgeTree:
    """Grow a plain random recursive hypergraph of size n."""
    return EdgeTree(kernels.grow_parents(0, n, 0.0, rng.base), validate=False)


def grow_redirect(n: int, r, rng: RngStream) -> EdgeTree:
    """Grow with redirection probability r (r=0 reduces to rrh in law)."""
    if not 0 <= r <= 1:
        raise ValueError("r must lie in [0, 1]")
    return EdgeTree(kernels.grow_parents(1, n, float(r), rng.base), validate=False)


def grow_choice_smaller(n: int, rng: RngStream) -> EdgeTree:
    """Grow attaching to the smaller of two provisionally drawn edges."""
    return EdgeTree(kernels.grow_parents(2, n, 0.0, rng.base), validate=False)


def grow_duplicate(n_edges: int, mu, rng: RngStream) -> MultiHypergraph:
    """Grow the duplication model until it has ``n_edges`` edges."""
    if not 0 <= mu <= 1:
        raise ValueError("mu must lie in [0, 1]")
    src, grown = kernels.grow_duplicate_arrays(n_edges, float(mu), rng.base)
    return MultiHypergraph(src, grown)


def grow(config: ModelConfig, replica: int = 0):
    """Grow one realization of ``config`` (replica selects the stream)."""
    rng = RngStream(config.seed, replica)
    if config.model == "rrh":
        return grow_rrh(config.target_n, rng)
    if config.model == "redirect":
        return grow_redirect(config.target_n, config.r, rng)
    if config.model == "choice-smaller":
        return grow_choice_smaller(config.target_n, rng)
    return grow_duplicate(config.target_n, config.mu, rng)


def step(state, config: ModelConfig, rng: RngStream):
    """Advance a realization by one growth step.

    Draw indices are a fixed function of the current size, so iterating
    ``step`` reproduces ``grow`` of the same stream bit for bit; this is
    what makes trajectory statistics consistent with whole-run growth.
    """
    if config.model == "duplicate":
        if not isinstance(state, MultiHypergraph):
            raise TypeError("duplicate model advances a MultiHypergraph")
        j = state.n_edges + 1
        dup = rng.uniform(2 * (j - 2)) < config.mu
        e = 1 + rng.integers(2 * (j - 2) + 1, j - 1)
        src = list(state.src) + [e]
        grown = list(state.grown) + [0 if dup else 1]
        return MultiHypergraph(src, grown)

    if not isinstance(state, EdgeTree):
        raise TypeError(f"model {config.model!r} advances an EdgeTree")
    i = state.n + 1
    if config.model == "rrh":
        p = 1 + rng.integers(i - 2, i - 1)
    elif config.model == "redirect":
        e = 1 + rng.integers(2 * (i - 2), i - 1)
        u = rng.uniform(2 * (i - 2) + 1)
        p = int(state.parents[e]) if (u < config.r and e != 1) else e
    else:  # choice-smaller
        e1 = 1 + rng.integers(3 * (i - 2), i - 1)
        e2 = 1 + rng.integers(3 * (i - 2) + 1, i - 1)
        u3 = rng.draw(3 * (i - 2) + 2)
        s1, s2 = state.rank_of(e1), state.rank_of(e2)
        if s1 < s2:
            p = e1
        elif s2 < s1:
            p = e2
        else:
            p = e1 if (u3 >> 63) == 0 else e2
    parents = list(state.parents) + [p]
    return EdgeTree(parents, validate=False)
