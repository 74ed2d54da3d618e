"""Sampled LMI feasibility problem in SDPA sparse format (.dat-s).

The primal form read by SDPA-family solvers is

    find y  s.t.  Σ_v y_v F_v - F_0 ⪰ 0,

with an all-zero objective here. Decision variables are the upper-triangular
entries of a constant W (row-major) followed by a constant ρ. Per grid point
one block carries -R1 - ε_margin I ⪰ 0; two trailing blocks carry the metric
bounds (the lower-bound block also holds ρ ≥ 0). Killing equalities that are
not identically zero at a point become a diagonal (LP) block holding
|R2 entries| ≤ ε_kill as pairs of inequalities.
"""
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import List, Sequence

import numpy as np

from ..exceptions import InvalidInputError, UnsupportedDegreeError
from ..systems.base import ControlAffineSystem

logger = logging.getLogger(__name__)

# Killing coefficients below this are treated as structurally zero.
COEF_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class SDPAProblem:
    block_dims: List[int]            # negative entries are diagonal (LP) blocks
    c: np.ndarray                    # (n_vars,)
    matrices: List[List[np.ndarray]] # matrices[v][b], v = 0 is F_0
    comment: str = ""

    @property
    def n_vars(self) -> int:
        return len(self.c)

    @property
    def n_blocks(self) -> int:
        return len(self.block_dims)


def sym_basis(n: int) -> List[np.ndarray]:
    """Symmetric unit matrices, one per upper-triangular entry in row-major order."""
    basis = []
    for i in range(n):
        for j in range(i, n):
            b = np.zeros((n, n))
            b[i, j] = b[j, i] = 1.0
            basis.append(b)
    return basis


def killing_rows(s_bs: Sequence[np.ndarray], basis: Sequence[np.ndarray]) -> List[np.ndarray]:
    """Coefficient rows of the upper-triangular entries of S_b W + W S_bᵀ in the basis coordinates.

    Rows that vanish structurally are dropped.
    """
    n = basis[0].shape[0]
    rows = []
    for s_b in s_bs:
        images = [s_b @ b + b @ s_b.T for b in basis]
        for r in range(n):
            for col in range(r, n):
                coef = np.array([img[r, col] for img in images])
                if np.abs(coef).max() > COEF_TOL:
                    rows.append(coef)
    return rows


def build_sdpa_problem(
    system: ControlAffineSystem,
    lam: float,
    grid: Sequence[np.ndarray],
    a1: float = 0.1,
    a2: float = 10.0,
    eps_margin: float = 1e-6,
    eps_kill: float = 1e-8,
    degree: int = 0,
    t: float = 0.0,
) -> SDPAProblem:
    if degree != 0:
        raise UnsupportedDegreeError(f"SDPA export supports constant metrics only, got degree {degree}")
    if len(grid) == 0:
        raise InvalidInputError("SDPA export needs a non-empty grid")
    n = system.manifold.n_dim
    basis = sym_basis(n)
    n_w = len(basis)
    n_vars = n_w + 1
    eye = np.eye(n)

    blocks_per_var: List[List[np.ndarray]] = [[] for _ in range(n_vars + 1)]
    dims: List[int] = []

    def add_block(f0, fvars, dim):
        dims.append(dim)
        blocks_per_var[0].append(f0)
        for v, fv in enumerate(fvars, start=1):
            blocks_per_var[v].append(fv)

    killing_blocks = []
    for x in grid:
        ops = system.reduced_operators(x, t)
        s_f = ops.S_f
        fvars = [-(b @ s_f.T + s_f @ b + 2.0 * lam * b) for b in basis]
        fvars.append(ops.E @ ops.E.T)
        add_block(eps_margin * eye, fvars, n)
        # Each upper-triangular entry of R2[i] is linear in the W entries.
        killing_blocks.append(killing_rows(ops.S_b, basis))

    lower_vars = [np.pad(b, ((0, 1), (0, 1))) for b in basis]
    rho_entry = np.zeros((n + 1, n + 1))
    rho_entry[n, n] = 1.0
    lower_vars.append(rho_entry)
    add_block(np.pad(eye / a2, ((0, 1), (0, 1))), lower_vars, n + 1)
    add_block(-eye / a1, [-b for b in basis] + [np.zeros((n, n))], n)

    for rows in killing_blocks:
        if not rows:
            continue
        coef = np.array(rows)
        k = 2 * len(rows)
        add_block(
            np.diag(np.full(k, -eps_kill)),
            [np.diag(np.concatenate([coef[:, v], -coef[:, v]])) for v in range(n_w)] + [np.zeros((k, k))],
            -k,
        )

    comment = f"{system.name} lambda={lam:.17g} a1={a1:.17g} a2={a2:.17g} points={len(grid)}"
    return SDPAProblem(block_dims=dims, c=np.zeros(n_vars), matrices=blocks_per_var, comment=comment)


def _fmt(value: float) -> str:
    return "%.17g" % value


def format_sdpa(problem: SDPAProblem) -> str:
    lines = []
    if problem.comment:
        lines.append(f'"{problem.comment}')
    lines.append(str(problem.n_vars))
    lines.append(str(problem.n_blocks))
    lines.append(" ".join(str(d) for d in problem.block_dims))
    lines.append(" ".join(_fmt(c) for c in problem.c))
    for v, blocks in enumerate(problem.matrices):
        for b, mat in enumerate(blocks, start=1):
            rows, cols = np.nonzero(np.triu(mat))
            for i, j in zip(rows, cols):
                lines.append(f"{v} {b} {i + 1} {j + 1} {_fmt(mat[i, j])}")
    return "\n".join(lines) + "\n"


def write_sdpa(problem: SDPAProblem, path) -> Path:
    path = Path(path)
    path.write_text(format_sdpa(problem), encoding="utf-8")
    logger.info("Wrote SDPA problem with %d variables and %d blocks to %s", problem.n_vars, problem.n_blocks, path)
    return path


def read_sdpa(path) -> SDPAProblem:
    """Parse an SDPA sparse file; lower triangles are filled from the upper ones."""
    text = Path(path).read_text(encoding="utf-8")
    comment_lines = []
    body = []
    for line in text.splitlines():
        if line.startswith(('"', "*")):
            comment_lines.append(line[1:])
        elif line.strip():
            body.append(re.sub(r"[{},()]", " ", line).split())
    if len(body) < 4:
        raise InvalidInputError(f"{path}: truncated SDPA file")
    n_vars = int(body[0][0])
    n_blocks = int(body[1][0])
    dims = [int(d) for d in body[2][:n_blocks]]
    c = np.array([float(v) for v in body[3][:n_vars]])
    matrices = [[np.zeros((abs(d), abs(d))) for d in dims] for _ in range(n_vars + 1)]
    for entry in body[4:]:
        v, b, i, j = (int(e) for e in entry[:4])
        value = float(entry[4])
        mat = matrices[v][b - 1]
        mat[i - 1, j - 1] = value
        mat[j - 1, i - 1] = value
    return SDPAProblem(block_dims=dims, c=c, matrices=matrices, comment="\n".join(comment_lines))


def export_sdpa(
    system: ControlAffineSystem,
    lam: float,
    grid: Sequence[np.ndarray],
    path,
    **kwargs,
) -> SDPAProblem:
    problem = build_sdpa_problem(system, lam, grid, **kwargs)
    write_sdpa(problem, path)
    return problem
