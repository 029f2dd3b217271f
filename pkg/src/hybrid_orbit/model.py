"""Multi-domain cyclic hybrid systems with parameterized phase controllers.

A system is an ordered ring of N domains executed 1 -> 2 -> ... -> N -> 1.
Each domain owns a continuous flow x' = f(x) + g(x) u, a scalar exit guard
whose zero set is the switching surface into the next domain, a reset map
applied at the crossing, and a controller u = Gamma(x, beta) parameterized
by a vector beta that event-triggered feedback freezes at phase entry.

System descriptions are immutable after construction and every stored
callable must be pure so that section-map Jacobian columns can be evaluated
concurrently.
"""

import warnings
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

__all__ = [
    "SectionChart",
    "Domain",
    "MultiDomainSystem",
    "PeriodicOrbit",
    "FeedbackLaw",
    "closed_loop",
    "validate_c1_c2",
    "ConditionReport",
    "affine_section_chart",
    "chart_from_guard",
    "guard_gradient",
    "guard_rate",
]

_GRAD_STEP = 1e-7


@dataclass(frozen=True)
class SectionChart:
    """Reduced coordinates on a switching surface.

    embed maps k reduced coordinates to a full state on the surface;
    project inverts it.  project(embed(y)) must equal y.
    """

    k: int
    embed: Callable[[np.ndarray], np.ndarray]
    project: Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Domain:
    """One continuous phase and its exit transition."""

    state_dim: int
    control_dim: int
    param_dim: int
    drift: Callable[[np.ndarray], np.ndarray]
    input_map: Callable[[np.ndarray], np.ndarray]
    controller: Callable[[np.ndarray, np.ndarray], np.ndarray]
    guard: Callable[[np.ndarray], float]
    reset: Callable[[np.ndarray], np.ndarray]
    exit_chart: SectionChart | None = None

    def __post_init__(self):
        if self.state_dim < 1:
            raise ValueError("state_dim must be positive")
        if self.control_dim < 0 or self.param_dim < 0:
            raise ValueError("control_dim and param_dim must be nonnegative")

    def vector_field(self, beta: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
        """Closed-phase vector field f + g Gamma(., beta) with beta held fixed."""
        beta = np.asarray(beta, dtype=float)
        if beta.shape != (self.param_dim,):
            raise ValueError(
                f"parameter vector has shape {beta.shape}, expected ({self.param_dim},)"
            )
        if self.control_dim == 0:
            return self.drift

        def f(x: np.ndarray) -> np.ndarray:
            return self.drift(x) + self.input_map(x) @ self.controller(x, beta)

        return f

    def nominal_control(self, x: np.ndarray) -> np.ndarray:
        return self.controller(x, np.zeros(self.param_dim))


def guard_gradient(domain: Domain, x: np.ndarray) -> np.ndarray:
    """Central finite-difference gradient of the exit guard at x."""
    x = np.asarray(x, dtype=float)
    grad = np.zeros_like(x)
    for j in range(x.size):
        h = _GRAD_STEP * max(1.0, abs(x[j]))
        e = np.zeros_like(x)
        e[j] = h
        grad[j] = (domain.guard(x + e) - domain.guard(x - e)) / (2.0 * h)
    return grad


def guard_rate(domain: Domain, x: np.ndarray, beta: np.ndarray | None = None) -> float:
    """Time derivative of the guard along the (closed-loop) flow at x."""
    if beta is None:
        beta = np.zeros(domain.param_dim)
    f = domain.vector_field(np.asarray(beta, dtype=float))
    return float(guard_gradient(domain, x) @ f(np.asarray(x, dtype=float)))


@dataclass(frozen=True)
class MultiDomainSystem:
    """Ordered cyclic collection of domains; index N wraps to 0."""

    domains: tuple[Domain, ...]
    law: "FeedbackLaw | None" = None

    def __post_init__(self):
        if len(self.domains) < 1:
            raise ValueError("a system needs at least one domain")
        object.__setattr__(self, "domains", tuple(self.domains))

    @property
    def n_domains(self) -> int:
        return len(self.domains)

    def domain(self, i: int) -> Domain:
        return self.domains[i % self.n_domains]

    def chart(self, i: int) -> SectionChart:
        """Chart of the section at the exit of domain i."""
        chart = self.domain(i).exit_chart
        if chart is None:
            raise ValueError(f"domain {i % self.n_domains} has no exit chart")
        return chart


@dataclass(frozen=True)
class PeriodicOrbit:
    """Per-section fixed points and phase durations of a periodic solution.

    fixed_points[i] holds the reduced coordinates of the orbit's crossing
    of the section at the exit of domain i.
    """

    fixed_points: tuple[np.ndarray, ...]
    phase_durations: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(
            self,
            "fixed_points",
            tuple(np.asarray(x, dtype=float) for x in self.fixed_points),
        )
        object.__setattr__(self, "phase_durations", tuple(float(t) for t in self.phase_durations))
        if len(self.fixed_points) != len(self.phase_durations):
            raise ValueError("fixed_points and phase_durations must have equal length")
        if any(t <= 0.0 for t in self.phase_durations):
            raise ValueError("phase durations must be positive")

    @property
    def period(self) -> float:
        return float(sum(self.phase_durations))


@dataclass(frozen=True)
class FeedbackLaw:
    """Event-triggered parameter feedback beta_i = -K_i (x_sec - x*).

    The deviation is measured in reduced section coordinates on entry into
    phase i, before the reset is applied, and beta_i is held constant for
    the remainder of the phase.  trust_radius only triggers a warning; the
    admissible-parameter set is otherwise treated as unbounded.
    """

    gains: tuple[np.ndarray, ...]
    orbit: PeriodicOrbit
    trust_radius: float = float("inf")

    def __post_init__(self):
        object.__setattr__(
            self, "gains", tuple(np.asarray(k, dtype=float) for k in self.gains)
        )
        if len(self.gains) != len(self.orbit.fixed_points):
            raise ValueError("need one gain matrix per phase")

    def beta(self, i: int, x_section: np.ndarray) -> np.ndarray:
        n = len(self.gains)
        gain = self.gains[i % n]
        ref = self.orbit.fixed_points[(i - 1) % n]
        value = -gain @ (np.asarray(x_section, dtype=float) - ref)
        if np.max(np.abs(value), initial=0.0) > self.trust_radius:
            warnings.warn(
                f"phase {i % n}: |beta| = {np.max(np.abs(value)):.3e} exceeds the "
                f"trust radius {self.trust_radius:.3e}",
                RuntimeWarning,
                stacklevel=2,
            )
        return value


def closed_loop(system: MultiDomainSystem, law: FeedbackLaw) -> MultiDomainSystem:
    """Attach an event-triggered feedback law, checking gain dimensions."""
    for i, dom in enumerate(system.domains):
        gain = law.gains[i]
        if gain.ndim != 2 or gain.shape[0] != dom.param_dim:
            raise ValueError(
                f"gain {i} has shape {gain.shape}, expected ({dom.param_dim}, k)"
            )
        entry_chart = system.chart(i - 1)
        if gain.shape[1] != entry_chart.k:
            raise ValueError(
                f"gain {i} has {gain.shape[1]} columns, entry section has k = {entry_chart.k}"
            )
        ref = law.orbit.fixed_points[(i - 1) % system.n_domains]
        if ref.shape != (entry_chart.k,):
            raise ValueError(f"fixed point {i} has shape {ref.shape}, expected ({entry_chart.k},)")
    return replace(system, law=law)


@dataclass
class ConditionReport:
    """Outcome of the controller-consistency checks on sampled states.

    c1_deviation[t] is max |Gamma(x, beta_t) - Gamma(x, 0)| over samples and
    probe directions at shrink level t; c2_deviation is the analogous
    state-gradient mismatch.  Both must vanish as beta -> 0.
    """

    scales: list[float]
    c1_deviation: list[float]
    c2_deviation: list[float]
    c1_pass: bool
    c2_pass: bool

    @property
    def passed(self) -> bool:
        return self.c1_pass and self.c2_pass


def validate_c1_c2(
    domain: Domain,
    samples: list[np.ndarray],
    scales: tuple[float, ...] = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5),
    tol: float = 1e-4,
) -> ConditionReport:
    """Check that the parameterized controller degenerates to the nominal one.

    For each sample state the controller is probed along every parameter
    axis at shrinking magnitudes.  Violations are reported, never raised.
    """
    if domain.param_dim == 0:
        return ConditionReport(list(scales), [0.0] * len(scales), [0.0] * len(scales), True, True)

    def grad_x(x, beta):
        cols = []
        for j in range(x.size):
            h = _GRAD_STEP * max(1.0, abs(x[j]))
            e = np.zeros_like(x)
            e[j] = h
            cols.append((domain.controller(x + e, beta) - domain.controller(x - e, beta)) / (2 * h))
        return np.array(cols).T

    c1_dev, c2_dev = [], []
    for scale in scales:
        worst_c1 = 0.0
        worst_c2 = 0.0
        for x in samples:
            x = np.asarray(x, dtype=float)
            u0 = domain.nominal_control(x)
            g0 = grad_x(x, np.zeros(domain.param_dim))
            for j in range(domain.param_dim):
                beta = np.zeros(domain.param_dim)
                beta[j] = scale
                worst_c1 = max(worst_c1, float(np.max(np.abs(domain.controller(x, beta) - u0))))
                worst_c2 = max(worst_c2, float(np.max(np.abs(grad_x(x, beta) - g0))))
        c1_dev.append(worst_c1)
        c2_dev.append(worst_c2)

    c1_pass = c1_dev[-1] <= tol
    c2_pass = c2_dev[-1] <= max(tol, 10.0 * _GRAD_STEP)
    return ConditionReport(list(scales), c1_dev, c2_dev, c1_pass, c2_pass)


def affine_section_chart(normal, offset: float, drop_index: int | None = None) -> SectionChart:
    """Chart on an affine surface {x : normal . x = offset}.

    Eliminates the coordinate with the largest guard-gradient component
    (best solvability) unless drop_index overrides the choice.
    """
    normal = np.asarray(normal, dtype=float)
    m = normal.size
    j = int(np.argmax(np.abs(normal))) if drop_index is None else int(drop_index)
    if normal[j] == 0.0:
        raise ValueError("cannot eliminate a coordinate with zero normal component")
    keep = [i for i in range(m) if i != j]

    def embed(y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        x = np.empty(m)
        x[keep] = y
        x[j] = (offset - normal[keep] @ y) / normal[j]
        return x

    def project(x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=float)[keep].copy()

    return SectionChart(k=m - 1, embed=embed, project=project)


def chart_from_guard(
    domain: Domain,
    x_ref: np.ndarray,
    newton_tol: float = 1e-12,
    newton_max_iter: int = 50,
) -> SectionChart:
    """Default chart on a domain's exit surface near a reference crossing.

    The coordinate with the largest |dH/dx| component at x_ref is solved
    from H(x) = 0 by scalar Newton iteration; the remaining coordinates are
    the reduced ones.  Exact (one-step) for guards affine in the eliminated
    coordinate.
    """
    x_ref = np.asarray(x_ref, dtype=float)
    grad = guard_gradient(domain, x_ref)
    j = int(np.argmax(np.abs(grad)))
    if grad[j] == 0.0:
        raise ValueError("guard gradient vanishes at the reference point")
    m = x_ref.size
    keep = [i for i in range(m) if i != j]
    x_ref_j = float(x_ref[j])

    def embed(y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        x = np.empty(m)
        x[keep] = y
        x[j] = x_ref_j
        for _ in range(newton_max_iter):
            h_val = domain.guard(x)
            if abs(h_val) <= newton_tol:
                return x
            step = _GRAD_STEP * max(1.0, abs(x[j]))
            e = np.zeros(m)
            e[j] = step
            slope = (domain.guard(x + e) - domain.guard(x - e)) / (2 * step)
            if slope == 0.0:
                break
            x[j] -= h_val / slope
        raise ValueError("could not solve the guard for the eliminated coordinate")

    def project(x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=float)[keep].copy()

    return SectionChart(k=m - 1, embed=embed, project=project)
