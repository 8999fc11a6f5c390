"""Cross-checks tying the two evaluation routes to each other and to the
defining equations.

Every check is falsifiable: the suite can rerun itself with deliberately
perturbed inputs and must then report failures.  Residuals are normalized by
the largest contributing term, not by the (possibly cancelling) value.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import IllConditioned, OrderTooHigh
from .gkz import GkzSystem, Simplex
from .lattice import (
    CharacterMatrix,
    character_matrix,
    quotient_representatives,
    sigmabar_representatives,
    _graded_shell,
)
from .mellin_barnes import ContourSpec, MbFamilyEvaluator, family_phase_growth
from .series import GammaSeriesSpec, Truncation, gamma_series_derivative, gamma_series_eval


@dataclass(frozen=True)
class Thresholds:
    """Pass thresholds, reported alongside every verdict.

    identity_rel compares two independent numeric channels; truncation_rel
    bounds residuals whose only error source is series/quadrature truncation.
    """

    identity_rel: float = 1e-6
    truncation_rel: float = 1e-8
    recovered_matrix_abs: float = 1e-5
    condition_max: float = 1e8


@dataclass(frozen=True)
class ResidualReport:
    operator: str
    point: tuple[complex, ...]
    residual: float
    scale: float
    threshold: float
    verdict: bool

    @property
    def normalized(self) -> float:
        return self.residual / self.scale if self.scale > 0 else math.inf


# ---------------------------------------------------------------------------
# point evaluators exposing a derivative channel


class SeriesPointEvaluator:
    """Coset series as a black box f(z, alpha)."""

    def __init__(self, system: GkzSystem, sigma: Simplex, k, truncation=Truncation()):
        self.spec = GammaSeriesSpec(system, sigma, tuple(k), truncation)
        self.label = f"series[k={tuple(k)}]"

    def __call__(self, z, alpha=None) -> complex:
        if alpha is None or not any(alpha):
            return gamma_series_eval(self.spec, z, check_domain=False).value
        return gamma_series_derivative(self.spec, z, alpha).value


class MbPointEvaluator:
    """Contour integral as a black box f(z, alpha); grids cached per z."""

    def __init__(
        self,
        system: GkzSystem,
        sigma: Simplex,
        k_tilde=None,
        contour: ContourSpec = ContourSpec(),
        tail_tol: float = 1e-12,
    ):
        self.system = system
        self.sigma = sigma
        self.k_tilde = tuple(k_tilde) if k_tilde is not None else (0,) * system.n
        self.contour = contour
        self.tail_tol = tail_tol
        self._growth = family_phase_growth(system, sigma, [self.k_tilde])
        self._cache: dict[tuple[complex, ...], MbFamilyEvaluator] = {}
        self.label = f"contour[k~={self.k_tilde}]"

    def _grid(self, z) -> MbFamilyEvaluator:
        key = tuple(complex(x) for x in z)
        if key not in self._cache:
            self._cache[key] = MbFamilyEvaluator(
                self.system, self.sigma, key, self.contour, self.tail_tol,
                phase_growth=self._growth,
            )
        return self._cache[key]

    def __call__(self, z, alpha=None) -> complex:
        grid = self._grid(z)
        if alpha is None or not any(alpha):
            return grid.value(self.k_tilde)
        return grid.derivative(alpha, self.k_tilde)


# ---------------------------------------------------------------------------
# operator residuals


def euler_residual(
    f: Callable, system: GkzSystem, z, threshold: float = 1e-8
) -> tuple[ResidualReport, ...]:
    """Residual of each scaling operator sum_j a_ij z_j d_j + c_i on f at z."""
    n, ncols = system.n, system.num_columns
    point = tuple(complex(x) for x in z)
    value = f(z, None)
    derivs = []
    for j in range(ncols):
        alpha = tuple(1 if t == j else 0 for t in range(ncols))
        derivs.append(f(z, alpha))
    reports = []
    for i in range(n):
        acc = complex(system.c[i]) * value
        scale = abs(acc)
        for j in range(ncols):
            term = system.a.data[i][j] * point[j] * derivs[j]
            acc += term
            scale = max(scale, abs(term))
        res = abs(acc)
        reports.append(
            ResidualReport(
                operator=f"E_{i + 1}",
                point=point,
                residual=res,
                scale=scale,
                threshold=threshold,
                verdict=res <= threshold * scale,
            )
        )
    return tuple(reports)


def _split_kernel_vector(u: Sequence[int], ncols: int):
    u = tuple(int(x) for x in u)
    if len(u) != ncols:
        raise ValueError("kernel vector length must equal the number of columns")
    if not any(u):
        raise ValueError("the zero vector is not a valid kernel choice")
    plus = tuple(x if x > 0 else 0 for x in u)
    minus = tuple(-x if x < 0 else 0 for x in u)
    if sum(plus) > 6 or sum(minus) > 6:
        raise OrderTooHigh("kernel vector orders above 6 are not supported")
    return plus, minus


def box_residual(
    f: Callable, system: GkzSystem, u: Sequence[int], z, threshold: float = 1e-8
) -> ResidualReport:
    """Residual of the toric operator d^{u+} - d^{u-} on f at z."""
    if any(x != 0 for x in system.a @ u):
        raise ValueError("u is not in the kernel lattice of A")
    plus, minus = _split_kernel_vector(u, system.num_columns)
    point = tuple(complex(x) for x in z)
    vp = f(z, plus)
    vm = f(z, minus)
    res = abs(vp - vm)
    scale = max(abs(vp), abs(vm))
    return ResidualReport(
        operator=f"box_{tuple(int(x) for x in u)}",
        point=point,
        residual=res,
        scale=scale,
        threshold=threshold,
        verdict=res <= threshold * scale,
    )


# ---------------------------------------------------------------------------
# the basis relation and its recovered transform


@dataclass(frozen=True)
class BasisRelationResult:
    max_rel_err: float
    matrix_used: CharacterMatrix
    recovered_max_abs_err: float
    condition_number: float
    recovery_base: tuple[complex, ...]
    thresholds: Thresholds
    passed: bool


def _wrapped_character_phases(kt_phases: Sequence[Fraction]) -> list[Fraction]:
    # rotate sigma-bar entries by exp(2 pi i theta) with theta in [-1/2, 1/2)
    return [p - math.floor(p + Fraction(1, 2)) for p in kt_phases]


def basis_relation_check(
    system: GkzSystem,
    sigma: Simplex,
    z,
    thresholds: Thresholds = Thresholds(),
    truncation: Truncation = Truncation(),
    contour: ContourSpec = ContourSpec(),
    tail_tol: float = 1e-12,
    rep_bound: int = 64,
    _perturb_matrix: bool = False,
) -> BasisRelationResult:
    """Check that the continuation family equals the character matrix times
    the coset-series vector, then re-derive the matrix from values alone.

    The relation itself is tested at the given z.  The matrix recovery uses
    r sample points obtained from a balanced base point by rotating the
    sigma-bar coordinates with the character phases of each representative,
    which makes the sample matrix unitary up to row scaling.
    """
    a = system.a
    comp = sigma.complement(system.num_columns)
    k_reps = sigmabar_representatives(a, sigma.indices, rep_bound)
    kt_reps = quotient_representatives(sigma.a_sigma.transpose()).representatives
    r = len(k_reps)
    a_bar = a.submatrix_columns(comp) if comp else None
    analytic = character_matrix(sigma.a_sigma, a_bar, system.c, kt_reps, k_reps)
    t_full = np.array(analytic.full())
    if _perturb_matrix and r > 1:
        t_full = t_full[list(range(1, r)) + [0], :]

    # relation residual at the requested point
    phis = np.array(
        [
            gamma_series_eval(GammaSeriesSpec(system, sigma, k, truncation), z,
                              check_domain=False).value
            for k in k_reps
        ]
    )
    growth = family_phase_growth(system, sigma, kt_reps)
    grid = MbFamilyEvaluator(system, sigma, z, contour, tail_tol, phase_growth=growth)
    f_vec = np.array([grid.value(kt) for kt in kt_reps])
    rhs = t_full @ phis
    max_rel = float(np.max(np.abs(f_vec - rhs) / np.maximum(np.abs(rhs), 1e-300)))

    # matrix recovery at a balanced base point
    base = list(complex(x) for x in z)
    for pos, j in enumerate(comp):
        scale = 1.0
        col = sigma.inv_times(a.column(j))
        for i, si in enumerate(sigma.indices):
            scale *= abs(complex(z[si])) ** float(col[i])
        base[j] = 0.45 * scale * (base[j] / abs(base[j]))
    base = tuple(base)
    kt_phases = []
    for kt in kt_reps:
        row = []
        for j in comp:
            col = sigma.inv_times(a.column(j))
            row.append(sum(Fraction(int(kv)) * col[i] for i, kv in enumerate(kt)))
        kt_phases.append(_wrapped_character_phases(row))
    growth_base = growth + 2 * math.pi * 0.5
    grid_base = MbFamilyEvaluator(
        system, sigma, base, contour, tail_tol, phase_growth=growth_base
    )
    phi_mat = np.zeros((r, r), dtype=complex)
    f_mat = np.zeros((r, r), dtype=complex)
    for q in range(r):
        zq = list(base)
        for pos, j in enumerate(comp):
            zq[j] = base[j] * cmath.exp(2j * math.pi * float(kt_phases[q][pos]))
        for jdx, k in enumerate(k_reps):
            phi_mat[jdx, q] = gamma_series_eval(
                GammaSeriesSpec(system, sigma, k, truncation), zq, check_domain=False
            ).value
        for idx, kt in enumerate(kt_reps):
            f_mat[idx, q] = grid_base.value(kt, extra_dim_phases=kt_phases[q])
    cond = float(np.linalg.cond(phi_mat))
    if cond > thresholds.condition_max:
        raise IllConditioned(
            f"sample matrix condition number {cond:.3e} exceeds {thresholds.condition_max:.1e}"
        )
    t_rec = np.linalg.solve(phi_mat.T, f_mat.T).T
    rec_err = float(np.max(np.abs(t_rec - np.array(analytic.full()))))
    passed = max_rel < thresholds.identity_rel and rec_err < thresholds.recovered_matrix_abs
    return BasisRelationResult(
        max_rel_err=max_rel,
        matrix_used=analytic,
        recovered_max_abs_err=rec_err,
        condition_number=cond,
        recovery_base=base,
        thresholds=thresholds,
        passed=passed,
    )


# ---------------------------------------------------------------------------
# partition of the exponent lattice


@dataclass(frozen=True)
class PartitionResult:
    passed: bool
    bound: int
    class_hits: tuple[int, ...]
    counterexample: tuple[int, ...] | None = None
    detail: str = ""


def partition_check(
    system: GkzSystem, sigma: Simplex, bound: int = 12, reps=None
) -> PartitionResult:
    """Every complement exponent of total degree <= bound must match exactly
    one representative class; `reps` may override the canonical list (the
    self-test passes a corrupted one)."""
    comp = sigma.complement(system.num_columns)
    if reps is None:
        reps = sigmabar_representatives(system.a, sigma.indices)
    group = quotient_representatives(sigma.a_sigma)
    a_bar = system.a.submatrix_columns(comp)
    keys = [group.canonical_key(a_bar @ k) for k in reps]
    hits = [0] * len(reps)
    for degree in range(bound + 1):
        for m in _graded_shell(len(comp), degree):
            key = group.canonical_key(a_bar @ m)
            matches = [i for i, k in enumerate(keys) if k == key]
            if len(matches) != 1:
                return PartitionResult(
                    passed=False,
                    bound=bound,
                    class_hits=tuple(hits),
                    counterexample=m,
                    detail=f"exponent {m} matches classes {matches}",
                )
            hits[matches[0]] += 1
    return PartitionResult(passed=True, bound=bound, class_hits=tuple(hits))


# ---------------------------------------------------------------------------
# harness self-test (falsifiability)


@dataclass(frozen=True)
class SelfTestResult:
    injected: dict[str, bool]  # check name -> injected failure was detected

    @property
    def passed(self) -> bool:
        return all(self.injected.values())


def harness_self_test(
    system: GkzSystem,
    sigma: Simplex,
    z,
    truncation: Truncation = Truncation(),
    thresholds: Thresholds = Thresholds(),
) -> SelfTestResult:
    """Inject known defects and confirm every check reports them."""
    from .gkz import build_system

    detected = {}
    # perturbed parameter must break the scaling-operator residual
    c_bad = tuple(
        (Fraction(ci) + Fraction(1, 997)) if system.c_is_rational else complex(ci) + 1e-3
        for ci in system.c
    )
    bad_system = build_system(system.a, c_bad)
    k_reps = sigmabar_representatives(system.a, sigma.indices)
    f_bad = SeriesPointEvaluator(bad_system, sigma, k_reps[0], truncation)
    # operators of the original system applied to the perturbed solution
    reports = euler_residual(f_bad, system, z, threshold=1e-3)
    detected["euler_sensitivity"] = any(not rep.verdict for rep in reports)
    # corrupted representative list must break the partition
    if len(k_reps) > 1:
        corrupted = (k_reps[0],) + k_reps[:-1]  # duplicates the first class
        detected["partition_corruption"] = not partition_check(
            system, sigma, bound=8, reps=corrupted
        ).passed
    else:
        detected["partition_corruption"] = True  # single class: nothing to corrupt
    # row-swapped transform matrix must break the basis relation
    if len(k_reps) > 1:
        rel = basis_relation_check(
            system, sigma, z, thresholds=thresholds, truncation=truncation,
            _perturb_matrix=True,
        )
        detected["relation_sensitivity"] = rel.max_rel_err > thresholds.identity_rel
    else:
        detected["relation_sensitivity"] = True
    return SelfTestResult(injected=detected)
