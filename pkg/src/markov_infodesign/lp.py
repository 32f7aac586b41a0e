"""Dense two-phase simplex with Bland's pivoting rule.

Deterministic: the entering column is the lowest-index improving column and
the leaving row is the minimum ratio, ties to the lowest basic variable index.
Problems are maximize c @ x subject to A_eq x = b_eq, A_ub x <= b_ub, x >= 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PIVOT_TOL = 1e-9


class InfeasibleError(RuntimeError):
    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class UnboundedError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class LinearProgram:
    c: np.ndarray
    A_eq: np.ndarray
    b_eq: np.ndarray
    A_ub: np.ndarray
    b_ub: np.ndarray
    var_names: tuple = ()
    eq_names: tuple = ()
    ub_names: tuple = ()

    def __post_init__(self):
        n = len(self.c)
        for name, rows in (("A_eq", "b_eq"), ("A_ub", "b_ub")):
            A = np.asarray(getattr(self, name), dtype=float).reshape(-1, n)
            b = np.asarray(getattr(self, rows), dtype=float).reshape(-1)
            if A.shape[0] != b.shape[0]:
                raise ValueError(f"{name} has {A.shape[0]} rows but {rows} has {b.shape[0]}")
            if not (np.isfinite(A).all() and np.isfinite(b).all()):
                raise ValueError(f"non-finite coefficient in {name}")
            object.__setattr__(self, name, A)
            object.__setattr__(self, rows, b)
        object.__setattr__(self, "c", np.asarray(self.c, dtype=float))

    @property
    def n_vars(self):
        return len(self.c)

    def to_text(self) -> str:
        """Plain-text tableau dump: one line per objective and constraint row."""
        names = self.var_names or tuple(f"x{j}" for j in range(self.n_vars))

        def fmt(row):
            return " ".join(f"{v:+.12g}*{names[j]}" for j, v in enumerate(row) if v != 0.0) or "0"

        lines = [f"vars {self.n_vars} eq {len(self.b_eq)} ub {len(self.b_ub)}",
                 f"max {fmt(self.c)}"]
        for r in range(len(self.b_eq)):
            tag = self.eq_names[r] if self.eq_names else f"e{r}"
            lines.append(f"{tag}: {fmt(self.A_eq[r])} = {self.b_eq[r]:.12g}")
        for r in range(len(self.b_ub)):
            tag = self.ub_names[r] if self.ub_names else f"u{r}"
            lines.append(f"{tag}: {fmt(self.A_ub[r])} <= {self.b_ub[r]:.12g}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True, eq=False)
class LPSolution:
    status: str                      # "optimal" or "infeasible"
    x: np.ndarray | None
    objective: float | None
    iterations: int
    certificate: dict | None = None  # Farkas multipliers when infeasible


def presolve(lp: LinearProgram):
    """Drop variables fixed at zero by singleton rows `a * x_j = 0` and empty rows.

    Returns (reduced lp, kept column indices, kept eq rows). Raises
    InfeasibleError on an empty row with a nonzero right-hand side.
    """
    A, b = lp.A_eq, lp.b_eq
    keep_cols = np.ones(lp.n_vars, dtype=bool)
    keep_rows = np.ones(len(b), dtype=bool)
    fixed_by = {}
    nnz = (A != 0)
    single = (nnz.sum(axis=1) == 1) & (b == 0)
    for r in np.flatnonzero(single):
        j = int(np.flatnonzero(nnz[r])[0])
        keep_cols[j] = False
        keep_rows[r] = False
        fixed_by.setdefault(j, int(r))
    empty = ~(A[:, keep_cols] != 0).any(axis=1) & keep_rows
    if np.any(np.abs(b[empty]) > PIVOT_TOL):
        r = int(np.flatnonzero(empty & (np.abs(b) > PIVOT_TOL))[0])
        # -sign(b_r) on the row, cancelled column-wise through the singleton rows
        y = np.zeros(len(b))
        y[r] = -np.sign(b[r])
        for j in np.flatnonzero(A[r]):
            s = fixed_by[int(j)]
            y[s] += np.sign(b[r]) * A[r, j] / A[s, j]
        raise InfeasibleError("empty equality row with nonzero right-hand side",
                              {"eq": y, "ub": np.zeros(len(lp.b_ub))})
    keep_rows &= ~empty
    reduced = LinearProgram(lp.c[keep_cols], A[np.ix_(keep_rows, keep_cols)], b[keep_rows],
                            lp.A_ub[:, keep_cols], lp.b_ub)
    return reduced, np.flatnonzero(keep_cols), np.flatnonzero(keep_rows)


def _lift_certificate(lp: LinearProgram, kept_cols, y_eq, y_ub):
    """Make y @ A >= 0 on presolved-away columns via their zero-rhs singleton rows (in place)."""
    removed = np.setdiff1d(np.arange(lp.n_vars), kept_cols)
    if removed.size == 0:
        return
    nnz = lp.A_eq != 0
    single = (nnz.sum(axis=1) == 1) & (lp.b_eq == 0)
    yA = y_eq @ lp.A_eq + y_ub @ lp.A_ub
    for j in removed:
        if yA[j] < 0:
            s = int(np.flatnonzero(single & nnz[:, j])[0])
            y_eq[s] -= yA[j] / lp.A_eq[s, j]


def _pivot(T, row, col):
    T[row] /= T[row, col]
    factor = T[:, col].copy()
    factor[row] = 0.0
    T -= factor[:, None] * T[row][None, :]


def _simplex(T, basis, n_cols, tol, max_iter):
    """Maximize the last row's negated reduced costs over columns [0, n_cols)."""
    it = 0
    while True:
        costs = T[-1, :n_cols]
        improving = np.flatnonzero(costs < -tol)
        if improving.size == 0:
            return it
        col = int(improving[0])
        column = T[:-1, col]
        pos = column > tol
        if not pos.any():
            raise UnboundedError("objective unbounded")
        ratios = np.full(column.shape, np.inf)
        ratios[pos] = T[:-1, -1][pos] / column[pos]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + tol * max(1.0, abs(best)))
        row = int(ties[np.argmin(basis[ties])])
        _pivot(T, row, col)
        basis[row] = col
        it += 1
        if it > max_iter:
            raise RuntimeError("simplex iteration limit reached")


def solve_lp(lp: LinearProgram, tol: float = 1e-9, max_iter: int = 100000,
             use_presolve: bool = True) -> LPSolution:
    """Two-phase Bland simplex; returns an infeasible status with a Farkas certificate.

    The certificate (y_eq, y_ub) satisfies y_eq @ A_eq + y_ub @ A_ub >= 0,
    y_ub >= 0 and y_eq @ b_eq + y_ub @ b_ub < 0.
    """
    try:
        red, cols, rows = presolve(lp) if use_presolve else (
            lp, np.arange(lp.n_vars), np.arange(len(lp.b_eq)))
    except InfeasibleError as exc:
        return LPSolution("infeasible", None, None, 0, exc.certificate)
    n = red.n_vars
    m_eq, m_ub = len(red.b_eq), len(red.b_ub)
    m = m_eq + m_ub
    # standard form rows: [A_eq 0; A_ub I] x' = b, with rows sign-normalized to b >= 0
    A = np.zeros((m, n + m_ub))
    A[:m_eq, :n] = red.A_eq
    A[m_eq:, :n] = red.A_ub
    A[m_eq:, n:] = np.eye(m_ub)
    b = np.concatenate([red.b_eq, red.b_ub])
    sign = np.where(b < 0, -1.0, 1.0)
    A *= sign[:, None]
    b = b * sign
    n_std = n + m_ub

    # phase 1 tableau with one artificial per row
    T = np.zeros((m + 1, n_std + m + 1))
    T[:m, :n_std] = A
    T[:m, n_std:n_std + m] = np.eye(m)
    T[:m, -1] = b
    T[-1, :n_std] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()
    basis = np.arange(n_std, n_std + m)
    it = _simplex(T, basis, n_std + m, tol, max_iter)
    infeas = -T[-1, -1]
    if infeas > max(tol, 1e-7) * max(1.0, np.abs(b).max(initial=0.0)):
        # duals of phase 1: y = -reduced cost of artificial columns
        y_std = -T[-1, n_std:n_std + m] + 1.0
        y = -(y_std * sign)
        y_eq = np.zeros(len(lp.b_eq))
        y_eq[rows] = y[:m_eq]
        _lift_certificate(lp, cols, y_eq, y[m_eq:])
        cert = {"eq": y_eq, "ub": y[m_eq:], "phase1_objective": float(infeas)}
        return LPSolution("infeasible", None, None, it, cert)

    # drive zero-level artificials out of the basis, dropping redundant rows
    keep = np.ones(m, dtype=bool)
    for r in range(m):
        if basis[r] >= n_std:
            nz = np.flatnonzero(np.abs(T[r, :n_std]) > tol)
            if nz.size:
                _pivot(T, r, int(nz[0]))
                basis[r] = int(nz[0])
            else:
                keep[r] = False
    T = np.vstack([T[:m][keep], T[-1:]])
    basis = basis[keep]
    T = np.delete(T, np.arange(n_std, n_std + m), axis=1)

    # phase 2: maximize c, tableau bottom row holds -c plus basis corrections
    c_std = np.concatenate([red.c, np.zeros(m_ub)])
    T[-1, :] = 0.0
    T[-1, :n_std] = -c_std
    for r, j in enumerate(basis):
        if T[-1, j] != 0.0:
            T[-1] -= T[-1, j] * T[r]
    it += _simplex(T, basis, n_std, tol, max_iter)
    x_std = np.zeros(n_std)
    x_std[basis] = T[:-1, -1]
    x = np.zeros(lp.n_vars)
    x[cols] = np.clip(x_std[:n], 0.0, None)
    return LPSolution("optimal", x, float(lp.c @ x), it)
