"""Two-step low-rank quaternion tensor completion with transform-domain sparsity.

The outer loop re-estimates the leading ``r`` singular subspaces of the
current estimate; the inner loop is an ADMM on

    ||T||_* - |tr(A * H * B^H)| + lam ||S||_1
    s.t.  P_Omega(H) = P_Omega(O),  H = T,  S = C(T)

with ``C`` the left-handed quaternion tensor DCT.  Variant ``rnns1`` uses
singular value thresholding for the T-step, ``rnns2`` the logarithmic
thresholding.
"""

from __future__ import annotations

import logging
import math
import time
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DimensionMismatch, InvalidTruncation, IterationLimit
from .prox import LogPenaltyParams, l1_prox, log_scalar_threshold
from .qtdct import QtdctContext, qtdct_forward, qtdct_inverse
from .tensor import QTensor3, TransformSpec, qt_product, spectral_map, tqt_svd

log = logging.getLogger(__name__)

VARIANTS = ("rnns1", "rnns2")
DEFAULT_RHO = {"rnns1": 1.1, "rnns2": 1.01}


@dataclass(frozen=True)
class Observation:
    """Observed tensor (zero off the sampling set) and its boolean mask."""

    observed: QTensor3
    mask: np.ndarray

    def __post_init__(self):
        mask = np.array(self.mask, dtype=bool)
        if mask.shape != self.observed.shape:
            raise DimensionMismatch(f"mask {mask.shape} does not match tensor {self.observed.shape}")
        if not mask.any():
            raise ValueError("observation mask is empty; at least one entry must be observed")
        if np.any(self.observed.components()[~mask]):
            raise ValueError("observed tensor must be exactly zero outside the mask")
        mask.flags.writeable = False
        object.__setattr__(self, "mask", mask)

    @classmethod
    def from_full(cls, full: QTensor3, mask) -> "Observation":
        """Sample ``full`` on ``mask``."""
        return cls(full.mask(mask), mask)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.observed.shape

    @property
    def sample_rate(self) -> float:
        return float(self.mask.mean())


@dataclass(frozen=True)
class SolverConfig:
    variant: str = "rnns1"
    r: int | None = None  # None: ceil(0.05 * min(I1, I2))
    lam: float = 0.05
    beta1: float = 0.1
    rho: float | None = None  # None: 1.1 for rnns1, 1.01 for rnns2
    beta_max: float = 1e7
    tol_inner: float = 1e-4  # relative to ||O||_F
    tol_outer: float = 1e-4  # relative to ||O||_F
    max_inner: int = 500
    max_outer: int = 10
    log_eps: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        checks = {
            "lam": self.lam >= 0,
            "beta1": self.beta1 > 0,
            "beta_max": self.beta_max >= self.beta1,
            "tol_inner": self.tol_inner > 0,
            "tol_outer": self.tol_outer > 0,
            "max_inner": self.max_inner >= 1,
            "max_outer": self.max_outer >= 1,
            "log_eps": self.log_eps > 0,
        }
        if self.rho is not None:
            checks["rho"] = self.rho >= 1
        if self.r is not None:
            checks["r"] = self.r >= 0
        bad = [k for k, ok in checks.items() if not ok]
        if bad:
            raise ValueError(f"invalid solver settings: {', '.join(bad)}")

    @property
    def growth(self) -> float:
        return DEFAULT_RHO[self.variant] if self.rho is None else self.rho

    def truncation(self, dims) -> int:
        k = min(dims[0], dims[1])
        r = math.ceil(0.05 * k) if self.r is None else self.r
        if not 0 <= r < k:
            raise InvalidTruncation(f"r={r} must satisfy 0 <= r < min(I1, I2) = {k}")
        return r


@dataclass(frozen=True)
class SolverState:
    T: QTensor3
    S: QTensor3
    H: QTensor3
    Y: QTensor3
    Z: QTensor3
    beta: float
    k: int = 0


@dataclass
class SolveReport:
    converged: bool = False
    outer_iterations: int = 0
    inner_iterations: list[int] = field(default_factory=list)
    outer_deltas: list[float] = field(default_factory=list)
    trace: list[dict] = field(default_factory=list)
    final_residuals: tuple[float, float] = (math.nan, math.nan)
    seconds: float = 0.0

    @property
    def iterations(self) -> int:
        return sum(self.inner_iterations)


def truncated_factors(T: QTensor3, r: int, spec: TransformSpec) -> tuple[QTensor3, QTensor3]:
    """Leading-``r`` singular factors ``A = U(:, :r, :)^H``, ``B = V(:, :r, :)^H``."""
    i1, i2, i3 = T.shape
    if not 0 <= r < min(i1, i2):
        raise InvalidTruncation(f"r={r} must satisfy 0 <= r < min(I1, I2) = {min(i1, i2)}")
    if r == 0:
        return QTensor3.zeros((0, i1, i3)), QTensor3.zeros((0, i2, i3))
    U, _, V = tqt_svd(T, spec)
    A = QTensor3._wrap(U.data[:, :, :r]).hermitian()
    B = QTensor3._wrap(V.data[:, :, :r]).hermitian()
    return A, B


def truncation_gradient(A: QTensor3, B: QTensor3, spec: TransformSpec) -> QTensor3:
    """``A^H * B``, the gradient of ``Re tr(A * H * B^H)`` in ``H``."""
    return qt_product(A.hermitian(), B, spec)


def t_target(state: SolverState, ctx: QtdctContext) -> QTensor3:
    """``G = (H - Y/beta + C^{-1}(S + Z/beta)) / 2``, the point the T-step shrinks."""
    b = state.beta
    back = qtdct_inverse(state.S + state.Z / b, ctx)
    return 0.5 * (state.H - state.Y / b + back)


def _t_step(state: SolverState, cfg: SolverConfig, ctx: QtdctContext, spec: TransformSpec):
    G = t_target(state, ctx)
    weight = 1.0 / (2.0 * state.beta)
    if cfg.variant == "rnns1":
        fn = lambda s: np.maximum(s - weight, 0.0)  # noqa: E731
    else:
        params = LogPenaltyParams(weight, cfg.log_eps)
        fn = lambda s: log_scalar_threshold(s, params)  # noqa: E731
    return spectral_map(G, fn, spec, return_values=True)


def update_T(state: SolverState, cfg: SolverConfig, ctx: QtdctContext, spec: TransformSpec) -> QTensor3:
    """T-step: prox of the rank surrogate with weight ``1/(2 beta)`` at :func:`t_target`.

    ``rnns1`` soft-thresholds the transform-domain singular values,
    ``rnns2`` applies the log-penalty threshold with offset ``cfg.log_eps``.
    """
    return _t_step(state, cfg, ctx, spec)[0]


def update_S(state: SolverState, cfg: SolverConfig, ctx: QtdctContext, CT: QTensor3 | None = None) -> QTensor3:
    """S-step: shrink ``C(T) - Z/beta`` entrywise by ``4 lam / beta``.

    ``state.T`` must already hold this iteration's T; pass ``CT = C(T)`` to
    skip recomputing it.
    """
    if CT is None:
        CT = qtdct_forward(state.T, ctx)
    return l1_prox(CT - state.Z / state.beta, 4.0 * cfg.lam / state.beta)


def update_H(
    state: SolverState,
    cfg: SolverConfig,
    obs: Observation,
    A: QTensor3,
    B: QTensor3,
    spec: TransformSpec,
    correction: QTensor3 | None = None,
) -> QTensor3:
    """H-step: ``T + (Y + A^H * B) / beta``, then observed entries reset to the data.

    ``correction`` may carry a precomputed :func:`truncation_gradient`.
    """
    if state.T.shape != obs.shape:
        raise DimensionMismatch(f"state {state.T.shape} does not match observation {obs.shape}")
    if correction is None:
        correction = truncation_gradient(A, B, spec)
    H = state.T + (state.Y + correction) / state.beta
    return obs.observed.where(obs.mask, H)


def _init_multipliers(dims, seed: int, stream: int) -> tuple[QTensor3, QTensor3]:
    rng = np.random.default_rng([seed, stream])
    i1, i2, i3 = dims
    Y = QTensor3._wrap(rng.uniform(-0.01, 0.01, (i3, i1, i2, 4)))
    Z = QTensor3._wrap(rng.uniform(-0.01, 0.01, (i3, i1, i2, 4)))
    return Y, Z


@dataclass
class InnerResult:
    T: QTensor3
    state: SolverState
    trace: list[dict]
    converged: bool
    residual_TH: float
    residual_SC: float


def admm_inner(
    obs: Observation,
    cfg: SolverConfig,
    A: QTensor3,
    B: QTensor3,
    ctx: QtdctContext,
    spec: TransformSpec,
    T_init: QTensor3 | None = None,
    *,
    stream: int = 0,
) -> InnerResult:
    """Inner ADMM for fixed truncation factors ``A``, ``B``.

    Stops once ``||T^{k+1} - T^k||_F <= tol_inner * ||O||_F`` or after
    ``max_inner`` iterations; the latter emits :class:`IterationLimit`.
    """
    T = obs.observed if T_init is None else T_init
    r = A.shape[0]
    scale = max(obs.observed.norm(), np.finfo(float).tiny)
    tol = cfg.tol_inner * scale
    rho = cfg.growth
    Y, Z = _init_multipliers(obs.shape, cfg.seed, stream)
    state = SolverState(T=T, S=qtdct_forward(T, ctx), H=T, Y=Y, Z=Z, beta=cfg.beta1)
    correction = truncation_gradient(A, B, spec)

    trace = []
    converged = False
    for k in range(1, cfg.max_inner + 1):
        beta = state.beta
        T_new, sv = _t_step(state, cfg, ctx, spec)
        CT = qtdct_forward(T_new, ctx)
        state = replace(state, T=T_new)
        S_new = update_S(state, cfg, ctx, CT)
        state = replace(state, S=S_new)
        H_new = update_H(state, cfg, obs, A, B, spec, correction)
        TH = T_new - H_new
        SC = S_new - CT
        Y_new = state.Y + beta * TH
        Z_new = state.Z + beta * SC
        delta = (T_new - T).norm()
        res_TH, res_SC = TH.norm(), SC.norm()
        trace.append(
            {
                "inner": k,
                "beta": beta,
                "delta_T": delta,
                "res_TH": res_TH,
                "res_SC": res_SC,
                "objective": float(np.sum(sv[:, r:])) + cfg.lam * float(np.sum(S_new.modulus())),
            }
        )
        state = SolverState(T=T_new, S=S_new, H=H_new, Y=Y_new, Z=Z_new, beta=min(rho * beta, cfg.beta_max), k=k)
        T = T_new
        if delta <= tol:
            converged = True
            break
    if not converged:
        warnings.warn(
            f"inner ADMM stopped at max_inner={cfg.max_inner} with ||dT||={delta:.3e} > {tol:.3e}",
            IterationLimit,
            stacklevel=2,
        )
    return InnerResult(T, state, trace, converged, res_TH, res_SC)


def solve(
    obs: Observation,
    cfg: SolverConfig | None = None,
    ctx: QtdctContext | None = None,
    spec: TransformSpec | None = None,
    *,
    callback=None,
) -> tuple[QTensor3, SolveReport]:
    """Recover a quaternion tensor from ``obs``.

    The returned tensor carries the observed entries verbatim; every other
    entry comes from the final iterate.  ``callback(outer, T)`` is invoked
    after each outer pass if given.
    """
    cfg = cfg or SolverConfig()
    ctx = ctx or QtdctContext(obs.shape)
    spec = spec or TransformSpec.dct(obs.shape[2])
    r = cfg.truncation(obs.shape)
    scale = max(obs.observed.norm(), np.finfo(float).tiny)
    report = SolveReport()
    start = time.perf_counter()

    if obs.mask.all():
        # nothing to complete; O is already the fixed point
        report.converged = True
        report.final_residuals = (0.0, 0.0)
        report.seconds = time.perf_counter() - start
        return obs.observed, report

    T = obs.observed
    for outer in range(1, cfg.max_outer + 1):
        A, B = truncated_factors(T, r, spec)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IterationLimit)
            inner = admm_inner(obs, cfg, A, B, ctx, spec, T, stream=outer)
        delta = (inner.T - T).norm()
        T = inner.T
        report.outer_iterations = outer
        report.inner_iterations.append(len(inner.trace))
        report.outer_deltas.append(delta)
        report.trace.extend({"outer": outer, **row} for row in inner.trace)
        report.final_residuals = (inner.residual_TH, inner.residual_SC)
        log.debug("outer %d: %d inner iterations, ||dT|| = %.3e", outer, len(inner.trace), delta)
        if callback is not None:
            callback(outer, T)
        if delta <= cfg.tol_outer * scale:
            report.converged = True
            break
    report.seconds = time.perf_counter() - start
    if not report.converged:
        warnings.warn(f"outer loop stopped at max_outer={cfg.max_outer}", IterationLimit, stacklevel=2)
    return obs.observed.where(obs.mask, T), report
