"""Sliding-window nonlinear least-squares factor graph.

Variables are real vectors; factors map connected variable values to weighted
residuals. Solving runs Levenberg-Marquardt over the free variables; windowing
works by hard-fixing old time-indexed variables (their values become constants
inside factors) rather than marginalizing them out.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from ..config import SolverOptions
from ..errors import DuplicateId, SingularNormalEquations, UnknownVariable

_DIAG_FLOOR = 1e-12
_LAMBDA_MAX = 1e10


@dataclass
class Variable:
    id: str
    value: np.ndarray
    time_index: Optional[int] = None
    fixed: bool = False

    @property
    def dim(self) -> int:
        return len(self.value)

    @property
    def is_static(self) -> bool:
        return self.time_index is None


@dataclass(frozen=True)
class Factor:
    """Residual block connecting one or more variables.

    residual_fn(*values) returns a length-k vector; jacobian_fn(*values)
    returns one (k, dim_i) block per connected variable, in the same order.
    sigma holds the per-row residual standard deviations.
    """

    var_ids: tuple
    residual_fn: Callable
    jacobian_fn: Callable
    sigma: np.ndarray
    kind: str = "factor"
    time_index: Optional[int] = None

    def __init__(self, var_ids, residual_fn, jacobian_fn, sigma,
                 kind="factor", time_index=None):
        sig = np.atleast_1d(np.asarray(sigma, dtype=float))
        if np.any(sig <= 0):
            raise ValueError(f"factor {kind!r} sigma must be positive")
        object.__setattr__(self, "var_ids", tuple(var_ids))
        object.__setattr__(self, "residual_fn", residual_fn)
        object.__setattr__(self, "jacobian_fn", jacobian_fn)
        object.__setattr__(self, "sigma", sig)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "time_index", time_index)

    def residual(self, *values) -> np.ndarray:
        return np.atleast_1d(np.asarray(self.residual_fn(*values), dtype=float))

    def jacobian(self, *values):
        blocks = self.jacobian_fn(*values)
        return [np.atleast_2d(np.asarray(b, dtype=float)) for b in blocks]


@dataclass
class SolveReport:
    iterations: int
    initial_cost: float
    final_cost: float
    converged: bool
    factor_norms: tuple = ()
    condition: float = 0.0
    singular: bool = False

    def norm_by_kind(self) -> dict:
        out = {}
        for kind, norm in self.factor_norms:
            out[kind] = max(out.get(kind, 0.0), norm)
        return out


def jacobian_check(factor: Factor, values: Sequence[np.ndarray],
                   h: float = 1e-6) -> float:
    """Max relative error between analytic and central-difference Jacobians."""
    if h <= 0:
        raise ValueError("step h must be positive")
    vals = [np.atleast_1d(np.asarray(v, dtype=float)) for v in values]
    analytic = factor.jacobian(*vals)
    worst = 0.0
    for vi, J in enumerate(analytic):
        fd = np.zeros_like(J)
        for j in range(vals[vi].size):
            bump = vals[vi].copy()
            bump[j] += h
            hi = factor.residual(*(vals[:vi] + [bump] + vals[vi + 1:]))
            bump[j] -= 2 * h
            lo = factor.residual(*(vals[:vi] + [bump] + vals[vi + 1:]))
            fd[:, j] = (hi - lo) / (2 * h)
        scale = max(1.0, float(np.abs(fd).max()))
        worst = max(worst, float(np.abs(J - fd).max()) / scale)
    return worst


class FactorGraph:
    """Mutable factor-graph container with an LM solver.

    One graph per estimation thread; methods are not thread-safe.
    """

    def __init__(self, options: SolverOptions = SolverOptions()):
        self.options = options
        self.variables: dict = {}
        self.factors: list = []

    # -- construction -----------------------------------------------------

    def add_variable(self, var_id: str, initial, time_index: Optional[int] = None):
        if var_id in self.variables:
            raise DuplicateId(f"variable {var_id!r} already exists")
        value = np.atleast_1d(np.asarray(initial, dtype=float)).copy()
        self.variables[var_id] = Variable(var_id, value, time_index)
        return self.variables[var_id]

    def add_factor(self, factor: Factor):
        for vid in factor.var_ids:
            if vid not in self.variables:
                raise UnknownVariable(f"factor {factor.kind!r} references "
                                      f"unknown variable {vid!r}")
        self.factors.append(factor)
        return factor

    def has_variable(self, var_id: str) -> bool:
        return var_id in self.variables

    def get(self, var_id: str) -> np.ndarray:
        return self.variables[var_id].value.copy()

    def set_value(self, var_id: str, value):
        var = self.variables[var_id]
        arr = np.atleast_1d(np.asarray(value, dtype=float))
        if arr.shape != var.value.shape:
            raise ValueError(f"dimension mismatch for {var_id!r}")
        var.value = arr.copy()

    def fix_variable(self, var_id: str):
        self.variables[var_id].fixed = True

    def snapshot(self) -> dict:
        return {vid: v.value.copy() for vid, v in self.variables.items()}

    def restore(self, snap: dict):
        for vid, value in snap.items():
            if vid in self.variables:
                self.variables[vid].value = value.copy()

    # -- windowing ---------------------------------------------------------

    def slide_window(self, horizon: int):
        """Fix time-indexed variables older than the horizon; drop factors
        whose variables are all fixed (their cost is constant)."""
        if horizon < 2:
            raise ValueError("horizon must be at least 2")
        newest = max((v.time_index for v in self.variables.values()
                      if v.time_index is not None), default=None)
        if newest is None:
            return
        cutoff = newest - horizon + 1
        for v in self.variables.values():
            if v.time_index is not None and v.time_index < cutoff:
                v.fixed = True
        self.factors = [f for f in self.factors
                        if any(not self.variables[vid].fixed for vid in f.var_ids)]

    def active_time_indices(self) -> list:
        return sorted({v.time_index for v in self.variables.values()
                       if v.time_index is not None and not v.fixed})

    # -- solving -----------------------------------------------------------

    def _values_of(self, factor: Factor):
        return [self.variables[vid].value for vid in factor.var_ids]

    def _active_factors(self):
        return [f for f in self.factors
                if any(not self.variables[vid].fixed for vid in f.var_ids)]

    def _cost(self, factors) -> float:
        total = 0.0
        for f in factors:
            r = f.residual(*self._values_of(f)) / f.sigma
            total += float(r @ r)
        return total

    def _assemble(self, factors, offsets, n_cols, n_rows):
        """Weighted residual vector and Jacobian at the current values."""
        r = np.empty(n_rows)
        rows, cols, data = [], [], []
        row0 = 0
        for f in factors:
            values = self._values_of(f)
            res = f.residual(*values)
            k = res.size
            r[row0:row0 + k] = res / f.sigma
            blocks = f.jacobian(*values)
            if len(blocks) != len(f.var_ids):
                raise ValueError(f"factor {f.kind!r} returned "
                                 f"{len(blocks)} jacobian blocks")
            for vid, block in zip(f.var_ids, blocks):
                if vid not in offsets:
                    continue  # fixed variable: treated as a constant
                c0 = offsets[vid]
                block = block / f.sigma[:, None]
                for i in range(block.shape[0]):
                    for j in range(block.shape[1]):
                        rows.append(row0 + i)
                        cols.append(c0 + j)
                        data.append(block[i, j])
            row0 += k
        J = scipy.sparse.coo_matrix((data, (rows, cols)),
                                    shape=(n_rows, n_cols)).tocsr()
        return r, J

    def solve(self, options: Optional[SolverOptions] = None) -> SolveReport:
        opts = options or self.options
        factors = self._active_factors()
        free = [v for v in self.variables.values() if not v.fixed]
        offsets, n_cols = {}, 0
        for v in free:
            offsets[v.id] = n_cols
            n_cols += v.dim
        n_rows = 0
        for f in factors:
            k = f.residual(*self._values_of(f)).size
            if f.sigma.size not in (1, k):
                raise ValueError(f"factor {f.kind!r} sigma length {f.sigma.size} "
                                 f"!= residual length {k}")
            n_rows += k

        initial_cost = self._cost(factors)
        if not math.isfinite(initial_cost):
            raise SingularNormalEquations("non-finite residuals at initial point")
        report = SolveReport(0, initial_cost, initial_cost, True)
        if n_cols == 0 or n_rows == 0:
            report.factor_norms = self._factor_norms(factors)
            return report

        lam = opts.lambda0
        cost = initial_cost
        converged = False
        singular = False
        condition = 0.0
        iterations = 0
        for _ in range(opts.max_iter):
            iterations += 1
            r, J = self._assemble(factors, offsets, n_cols, n_rows)
            H = (J.T @ J).toarray() if n_cols <= opts.dense_limit else J.T @ J
            g = J.T @ r
            diag = H.diagonal() if scipy.sparse.issparse(H) else np.diag(H).copy()
            if np.any(diag < _DIAG_FLOOR):
                singular = True
            damp_base = np.maximum(diag, _DIAG_FLOOR)
            if not scipy.sparse.issparse(H):
                dmax, dmin = float(damp_base.max()), float(damp_base.min())
                condition = dmax / dmin if dmin > 0 else math.inf
            accepted = False
            new_cost = cost
            step = None
            # First attempt is always the undamped Gauss-Newton step; the
            # damping ladder engages only when that fails or increases cost.
            trial = 0.0
            while trial <= _LAMBDA_MAX:
                step = self._try_step(H, g, trial, damp_base)
                if step is None:
                    singular = True
                    trial = lam if trial == 0.0 else trial * opts.lambda_up
                    continue
                before = [(v, v.value) for v in free]
                for v in free:
                    c0 = offsets[v.id]
                    v.value = v.value + step[c0:c0 + v.dim]
                new_cost = self._cost(factors)
                if math.isfinite(new_cost) and new_cost <= cost:
                    accepted = True
                    break
                for v, old in before:
                    v.value = old
                trial = lam if trial == 0.0 else trial * opts.lambda_up
            if accepted and trial > 0.0:
                lam = max(trial / opts.lambda_down, opts.lambda0)
            if not accepted:
                # No descent step exists within damping range: cost decrease is
                # zero, which meets the convergence criterion.
                converged = True
                break
            drop = cost - new_cost
            cost = new_cost
            if (drop <= opts.cost_tol * max(cost, 1e-30)
                    or float(np.abs(step).max()) <= opts.step_tol):
                converged = True
                break

        report.iterations = iterations
        report.final_cost = cost
        report.converged = converged
        report.singular = singular
        report.condition = condition
        report.factor_norms = self._factor_norms(factors)
        return report

    @staticmethod
    def _try_step(H, g, lam, damp_base):
        """Solve the (possibly damped) normal equations; None on failure."""
        try:
            if scipy.sparse.issparse(H):
                Hd = H + scipy.sparse.diags(lam * damp_base) if lam > 0 else H
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    step = scipy.sparse.linalg.spsolve(Hd.tocsc(), -g)
            else:
                Hd = H + np.diag(lam * damp_base) if lam > 0 else H
                step = np.linalg.solve(Hd, -g)
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(step)):
            return None
        return step

    def _factor_norms(self, factors) -> tuple:
        out = []
        for f in factors:
            r = f.residual(*self._values_of(f))
            out.append((f.kind, float(np.linalg.norm(r))))
        return tuple(out)

    # -- debugging ---------------------------------------------------------

    def dump(self) -> dict:
        return {
            "variables": {
                vid: {"value": v.value.tolist(), "time_index": v.time_index,
                      "fixed": v.fixed}
                for vid, v in self.variables.items()
            },
            "factors": [
                {"kind": f.kind, "vars": list(f.var_ids),
                 "residual": f.residual(*self._values_of(f)).tolist(),
                 "sigma": f.sigma.tolist()}
                for f in self.factors
            ],
        }
