"""Model constants, the state container and the pointwise reaction terms.

The state is ``w = (c1, c2, v, y, kappa)``: proliferating cells, migrating
cells, extracellular matrix, ECM-bound integrins and contractivity.  All
operators here work cellwise and accept either scalars or arrays.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace

import numpy as np

COMPONENTS = ("c1", "c2", "v", "y", "kappa")
C1, C2, V, Y, KAPPA = range(5)


class DegenerateStateError(ValueError):
    """Diffusion coefficient denominator is not positive."""


@dataclass(frozen=True)
class ModelParams:
    mu_c: float = 1.0
    eta_1: float = 0.05
    gamma: float = 0.055
    lambda_: float = 0.152
    D_c: float = 0.01
    D_h: float = 10.0
    delta_v: float = 5.0
    mu_v: float = 0.3
    eta_2: float = 0.9
    k_1: float = 2.0
    k_m1: float = 0.06
    q: float = 3.0
    M_rate: float = 2.0
    chi: float = 0.01
    tau: float = 20.0

    def __post_init__(self):
        if not 0.0 < self.chi <= 1.0:
            # chi = 1 is admitted for non-stiff test configurations
            raise ValueError(f"chi must lie in (0, 1], got {self.chi}")
        if self.tau < 0:
            raise ValueError(f"tau must be nonnegative, got {self.tau}")
        for f in fields(self):
            if f.name in ("chi", "tau"):
                continue
            if getattr(self, f.name) < 0:
                raise ValueError(f"rate {f.name} must be nonnegative")

    @property
    def delay(self) -> float:
        """Delay offset in macroscopic time, ``chi * tau``."""
        return self.chi * self.tau

    def replace(self, **changes) -> "ModelParams":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)


#: Baseline parameter block of the model.
BASE_PARAMS = ModelParams()

#: Parameters of the convergence experiment (Experiment 0).
EXPERIMENT0_PARAMS = ModelParams(
    mu_c=1.0, eta_1=0.05, gamma=0.055, lambda_=0.076,
    D_c=1e-3, D_h=1.0,
    delta_v=10.0, mu_v=0.3, eta_2=0.9,
    k_1=2.0, k_m1=0.06,
    q=3.0, M_rate=1.0,
    chi=0.01, tau=0.04,
)

#: Parameters of the invasion experiment (Experiment 1).
EXPERIMENT1_PARAMS = ModelParams(
    mu_c=1.0, eta_1=0.05, gamma=0.055, lambda_=0.152,
    D_c=1e-2, D_h=10.0,
    delta_v=5.0, mu_v=0.3, eta_2=0.9,
    k_1=2.0, k_m1=0.06,
    q=3.0, M_rate=1.0,
    chi=0.01, tau=0.04,
)

PRESETS = {
    "base": BASE_PARAMS,
    "exp0": EXPERIMENT0_PARAMS,
    "exp1": EXPERIMENT1_PARAMS,
}


@dataclass
class StateField:
    """The five per-cell unknowns, stored as one ``(5, n_cells)`` array."""

    data: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        if self.data.ndim != 2 or self.data.shape[0] != 5:
            raise ValueError(f"state must have shape (5, n), got {self.data.shape}")

    @classmethod
    def from_components(cls, c1, c2, v, y, kappa) -> "StateField":
        return cls(np.stack([np.asarray(f, dtype=float) for f in (c1, c2, v, y, kappa)]))

    @classmethod
    def zeros(cls, n_cells: int) -> "StateField":
        return cls(np.zeros((5, n_cells)))

    @property
    def n_cells(self) -> int:
        return self.data.shape[1]

    c1 = property(lambda self: self.data[C1])
    c2 = property(lambda self: self.data[C2])
    v = property(lambda self: self.data[V])
    y = property(lambda self: self.data[Y])
    kappa = property(lambda self: self.data[KAPPA])

    def copy(self) -> "StateField":
        return StateField(self.data.copy())

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.data)))

    def component(self, name: str) -> np.ndarray:
        return self.data[COMPONENTS.index(name)]


def _unpack(w):
    w = np.asarray(w, dtype=float)
    return w[0], w[1], w[2], w[3], w[4]


def reaction_full(params: ModelParams, w, y_delayed) -> np.ndarray:
    """Complete reaction vector with ``y(t - chi*tau)`` replaced by ``y_delayed``."""
    return reaction_expl(params, w, y_delayed) + reaction_impl(params, w)


def reaction_expl(params: ModelParams, w, y_delayed) -> np.ndarray:
    """Explicitly treated reactions; the integrin component is zero.

    ``w`` has leading axis of length 5 and may carry trailing cell axes.
    """
    p = params
    c1, c2, v, y, kappa = _unpack(w)
    cells = c1 + c2
    out = np.zeros(np.shape(w), dtype=float)
    out[0] = p.mu_c * c1 * (1.0 - cells - p.eta_1 * v) + p.gamma * c2 - p.lambda_ * c1
    out[1] = p.lambda_ * c1 - p.gamma * c2
    out[2] = -p.delta_v * cells * v + p.mu_v * v * (1.0 - p.eta_2 * cells - v)
    out[4] = (-p.q * kappa + p.M_rate * np.asarray(y_delayed, dtype=float)) / p.chi
    return out


def reaction_impl(params: ModelParams, w) -> np.ndarray:
    """Implicitly treated reactions: integrin binding/unbinding only."""
    p = params
    _, _, v, y, _ = _unpack(w)
    out = np.zeros(np.shape(w), dtype=float)
    out[3] = (p.k_1 * (1.0 - y) * v - p.k_m1 * y) / p.chi
    return out


def diffusion_coefficient(params: ModelParams, w):
    """``T = D_c * kappa / (1 + (c1 + c2) * v)``, cellwise."""
    c1, c2, v, _, kappa = _unpack(w)
    denom = 1.0 + (c1 + c2) * v
    if np.any(denom <= 0.0):
        raise DegenerateStateError("1 + (c1 + c2) v must be positive")
    return params.D_c * kappa / denom
