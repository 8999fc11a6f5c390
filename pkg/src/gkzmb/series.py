"""Reciprocal gamma and convergent series solutions indexed by lattice cosets.

The series attached to a simplex sigma and a coset representative k sums
monomials z_sigma^{-A_sigma^{-1}(c + A_sigmabar p)} z_sigmabar^p over the
nonnegative complement exponents p congruent to k, each divided by
Gamma(1 - A_sigma^{-1}(c + A_sigmabar p)) p!.  Exponents are kept as exact
rationals; all branch choices are principal logarithms plus explicit
2*pi*i integer shifts.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import BranchCut, DomainError, OrderTooHigh, TailNotConverged
from .gkz import GkzSystem, Simplex
from .lattice import _graded_shell, quotient_representatives

# Lanczos approximation, g = 607/128 with 15 coefficients.  The widely used
# g = 7, 9-term set tops out near 2e-13 relative error on |z| <= 50 and
# misses the 1e-13 target; this set stays below 4e-14 there.
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_COEFFS = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)
_LANCZOS_C = np.array(_LANCZOS_COEFFS)
_SQRT_TWO_PI = math.sqrt(2.0 * math.pi)


def _lanczos_gamma_scalar(z: complex) -> complex:
    # valid for Re z >= 0.5
    x = _LANCZOS_COEFFS[0]
    for i in range(1, len(_LANCZOS_COEFFS)):
        x += _LANCZOS_COEFFS[i] / (z - 1 + i)
    t = z + (_LANCZOS_G - 0.5)
    return _SQRT_TWO_PI * t ** (z - 0.5) * cmath.exp(-t) * x


def _reciprocal_gamma_scalar(z: complex) -> complex:
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == round(z.real):
        return 0.0 + 0.0j
    if z.real >= 0.5:
        return 1.0 / _lanczos_gamma_scalar(z)
    return cmath.sin(math.pi * z) / math.pi * _lanczos_gamma_scalar(1.0 - z)


def _reciprocal_gamma_array(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape, dtype=complex)
    right = z.real >= 0.5
    if np.any(right):
        zr = z[right]
        x = np.full(zr.shape, _LANCZOS_C[0], dtype=complex)
        for i in range(1, len(_LANCZOS_C)):
            x += _LANCZOS_C[i] / (zr - 1 + i)
        t = zr + (_LANCZOS_G - 0.5)
        out[right] = np.exp(t - (zr - 0.5) * np.log(t)) / (_SQRT_TWO_PI * x)
    left = ~right
    if np.any(left):
        zl = z[left]
        w = 1.0 - zl
        x = np.full(zl.shape, _LANCZOS_C[0], dtype=complex)
        for i in range(1, len(_LANCZOS_C)):
            x += _LANCZOS_C[i] / (w - 1 + i)
        t = w + (_LANCZOS_G - 0.5)
        gamma_w = _SQRT_TWO_PI * np.exp((w - 0.5) * np.log(t) - t) * x
        vals = np.sin(np.pi * zl) / np.pi * gamma_w
        pole = (zl.imag == 0.0) & (zl.real == np.round(zl.real))
        vals[pole] = 0.0
        out[left] = vals
    return out


def reciprocal_gamma(z):
    """1/Gamma(z), entire, exactly zero at nonpositive integers.

    Accepts complex scalars or numpy arrays; relative accuracy is better
    than 1e-13 for |z| <= 50.
    """
    if isinstance(z, np.ndarray):
        return _reciprocal_gamma_array(z)
    return _reciprocal_gamma_scalar(z)


def gamma_function(z):
    """Gamma(z) through the same Lanczos kernel (poles map to inf)."""
    r = reciprocal_gamma(z)
    if isinstance(r, np.ndarray):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(r == 0, np.inf + 0j, 1.0 / r)
    return complex("inf") if r == 0 else 1.0 / r


# ---------------------------------------------------------------------------
# series data and evaluation


@dataclass(frozen=True)
class Truncation:
    max_order: int = 40
    tail_tol: float = 1e-12

    def __post_init__(self):
        if self.max_order < 0 or self.tail_tol <= 0:
            raise ValueError("max_order must be >= 0 and tail_tol > 0")


@dataclass(frozen=True)
class GammaSeriesSpec:
    system: GkzSystem
    sigma: Simplex
    k: tuple[int, ...]
    truncation: Truncation = Truncation()

    def __post_init__(self):
        comp = self.sigma.complement(self.system.num_columns)
        if len(self.k) != len(comp) or any(x < 0 for x in self.k):
            raise ValueError("k must be a nonnegative complement exponent vector")


@dataclass(frozen=True)
class SeriesValue:
    value: complex
    terms_used: int
    tail_bound: float
    branch_log: tuple[complex, ...]


class _SeriesContext:
    """Cached exact data shared by every evaluation of one (system, sigma)."""

    def __init__(self, system: GkzSystem, sigma: Simplex):
        self.system = system
        self.sigma = sigma
        self.comp = sigma.complement(system.num_columns)
        self.group = quotient_representatives(sigma.a_sigma)
        self.inv_c = sigma.inv_times(system.c)  # A_sigma^{-1} c
        # columns of A_sigma^{-1} A_sigmabar, exact
        self.b_cols = [sigma.inv_times(system.a.column(j)) for j in self.comp]

    def class_key(self, p: Sequence[int]) -> tuple[int, ...]:
        img = self.system.a.submatrix_columns(self.comp) @ p if self.comp else ()
        return self.group.canonical_key(img) if self.comp else ()

    def exponent_sigma(self, p: Sequence[int]) -> list:
        """-A_sigma^{-1}(c + A_sigmabar p) as exact/complex entries."""
        out = []
        for i in range(self.system.n):
            acc = self.inv_c[i]
            for bj, pj in zip(self.b_cols, p):
                acc = acc + bj[i] * pj
            out.append(-acc)
        return out


def lambda_class_member(m: Sequence[int], k: Sequence[int], system: GkzSystem, sigma) -> bool:
    """Whether exponent m and representative k lie in the same coset class,
    i.e. A_sigmabar (m - k) belongs to the column lattice of A_sigma."""
    sx = sigma if isinstance(sigma, Simplex) else system.simplex(sigma)
    if any(x < 0 for x in m) or any(x < 0 for x in k):
        raise ValueError("exponents must be componentwise nonnegative")
    ctx = _SeriesContext(system, sx)
    return ctx.class_key(m) == ctx.class_key(k)


def _falling(a, order: int):
    out = 1
    for i in range(order):
        out = out * (a - i)
    return out


def _check_branch(z, sigma: Simplex):
    for j in sigma.indices:
        zj = complex(z[j])
        if zj.imag == 0.0 and zj.real <= 0.0:
            raise BranchCut(f"z_{j + 1} = {zj} lies on the closed negative real axis")


def _sigma_logs(z, sigma: Simplex, log_shifts) -> tuple[complex, ...]:
    logs = []
    for pos, j in enumerate(sigma.indices):
        shift = 0 if log_shifts is None else int(log_shifts[pos])
        logs.append(cmath.log(complex(z[j])) + 2j * math.pi * shift)
    return tuple(logs)


def _series_sum(
    ctx: _SeriesContext,
    z,
    truncation: Truncation,
    alpha: Sequence[int] | None,
    log_shifts,
    class_key: tuple[int, ...] | None,
):
    """Graded-shell Kahan summation; returns (value, terms, tail, logs)."""
    sigma = ctx.sigma
    n = ctx.system.n
    comp = ctx.comp
    logs = _sigma_logs(z, sigma, log_shifts)
    alpha = tuple(int(a) for a in alpha) if alpha is not None else tuple(0 for _ in range(ctx.system.num_columns))
    a_sigma_pos = {j: pos for pos, j in enumerate(sigma.indices)}
    a_comp_pos = {j: pos for pos, j in enumerate(comp)}
    zbar = [complex(z[j]) for j in comp]

    total = 0.0 + 0.0j
    comp_err = 0.0 + 0.0j
    terms = 0
    shell_mags: list[tuple[int, float]] = []
    for degree in range(truncation.max_order + 1):
        shell_mag = 0.0
        for p in _graded_shell(len(comp), degree) if comp else ([()] if degree == 0 else []):
            if class_key is not None and ctx.class_key(p) != class_key:
                continue
            exps = ctx.exponent_sigma(p)
            coeff = 1.0 + 0.0j
            skip = False
            for j, aj in enumerate(alpha):
                if aj == 0:
                    continue
                if j in a_sigma_pos:
                    f = _falling(exps[a_sigma_pos[j]], aj)
                    coeff *= complex(f)
                elif j in a_comp_pos:
                    pj = p[a_comp_pos[j]]
                    if pj < aj:
                        skip = True
                        break
                    coeff *= _falling(pj, aj)
                else:  # pragma: no cover - alpha indexes all columns
                    raise ValueError("alpha index out of range")
            if skip:
                continue
            val = coeff
            for i in range(n):
                e = exps[i] - alpha[sigma.indices[i]]
                val *= cmath.exp(complex(e) * logs[i])
            for pos, pj in enumerate(p):
                e = pj - alpha[comp[pos]]
                if zbar[pos] == 0:
                    if e != 0:
                        val = 0.0j
                        break
                elif e:
                    val *= zbar[pos] ** e
            if val == 0:
                continue
            for i in range(n):
                val *= _reciprocal_gamma_scalar(complex(1 + exps[i]))
                if val == 0:
                    break
            if val == 0:
                continue
            for pj in p:
                val /= math.factorial(pj)
            terms += 1
            shell_mag += abs(val)
            # Kahan step
            y = val - comp_err
            t = total + y
            comp_err = (t - total) - y
            total = t
        if shell_mag > 0.0:
            shell_mags.append((degree, shell_mag))

    tail = 0.0
    if shell_mags:
        degrees = [d for d, _ in shell_mags]
        max_gap = max(
            (b - a for a, b in zip(degrees, degrees[1:])), default=1
        )
        terminated = degrees[-1] + 2 * max_gap <= truncation.max_order
        if not terminated:
            if len(shell_mags) >= 2:
                rho = shell_mags[-1][1] / shell_mags[-2][1]
                if rho >= 0.9:
                    raise TailNotConverged(
                        f"shell ratio {rho:.3f} >= 0.9, tail majorant invalid"
                    )
                tail = shell_mags[-1][1] * rho / (1.0 - rho)
            else:
                tail = math.inf
    return total, terms, tail, logs


def gamma_series_eval(
    spec: GammaSeriesSpec, z, log_shifts=None, check_domain: bool = True
) -> SeriesValue:
    """Evaluate the coset series for spec.k at z with principal branches.

    `log_shifts` adds 2*pi*i times the given integers to the logarithms of
    the sigma-block variables, realizing analytic continuations exactly.
    """
    _check_branch(z, spec.sigma)
    if check_domain:
        from .mellin_barnes import in_convergence_domain

        report = in_convergence_domain(spec.sigma, spec.system.a, z)
        if not report.inside:
            warnings.warn("z lies outside the certified convergence domain", stacklevel=2)
    ctx = _SeriesContext(spec.system, spec.sigma)
    key = ctx.class_key(spec.k)
    value, terms, tail, logs = _series_sum(
        ctx, z, spec.truncation, None, log_shifts, key
    )
    return SeriesValue(value=value, terms_used=terms, tail_bound=tail, branch_log=logs)


def gamma_series_derivative(
    spec: GammaSeriesSpec, z, alpha: Sequence[int], log_shifts=None, check_domain: bool = False
) -> SeriesValue:
    """Termwise partial derivative d^alpha of the coset series.

    alpha is a multi-index over all N coordinates; falling factorials are
    accumulated as exact products on the rational exponents.
    """
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != spec.system.num_columns or any(a < 0 for a in alpha):
        raise ValueError("alpha must be a nonnegative multi-index over all columns")
    if sum(alpha) > 6:
        raise OrderTooHigh("derivative order above 6 is not supported")
    _check_branch(z, spec.sigma)
    if check_domain:
        from .mellin_barnes import in_convergence_domain

        if not in_convergence_domain(spec.sigma, spec.system.a, z).inside:
            warnings.warn("z lies outside the certified convergence domain", stacklevel=2)
    ctx = _SeriesContext(spec.system, spec.sigma)
    key = ctx.class_key(spec.k)
    value, terms, tail, logs = _series_sum(ctx, z, spec.truncation, alpha, log_shifts, key)
    return SeriesValue(value=value, terms_used=terms, tail_bound=tail, branch_log=logs)


# ---------------------------------------------------------------------------
# the two-torus cycle family f_{k,l} for the diamond configuration


def diamond_f00_evaluator(
    system: GkzSystem,
    sigma=(0, 1),
    truncation: Truncation = Truncation(),
    normalization: str = "laplace",
) -> Callable:
    """Evaluator for the base cycle value f_{0,0}.

    normalization="laplace" multiplies the bare coset-sum series by
    (2*pi*i)^(N-n) / |det A_sigma| to match the torus-cycle integral;
    "bare" returns the plain series sum (the Mellin-Barnes normalization).
    The returned callable accepts (z, log_shifts) with integer shifts for
    the sigma-block logarithms.
    """
    if normalization not in ("laplace", "bare"):
        raise ValueError("normalization must be 'laplace' or 'bare'")
    sx = sigma if isinstance(sigma, Simplex) else system.simplex(sigma)
    ctx = _SeriesContext(system, sx)
    nn = system.num_columns - system.n
    factor = 1.0 + 0.0j
    if normalization == "laplace":
        factor = (2j * math.pi) ** nn / abs(sx.det)

    def evaluate(z, log_shifts=None) -> complex:
        _check_branch(z, sx)
        value, _, _, _ = _series_sum(ctx, z, truncation, None, log_shifts, None)
        return factor * value

    return evaluate


def diamond_cycle_value(f00: Callable, k: int, l: int, z) -> complex:
    """Value of the continued cycle f_{k,l}: the base evaluator with the
    logarithms of the first two coordinates shifted by -2*pi*i*k and -2*pi*i*l.

    Requires positive real z_1, z_2, matching the cycle construction.
    """
    z1, z2 = complex(z[0]), complex(z[1])
    for name, v in (("z_1", z1), ("z_2", z2)):
        if v.imag != 0.0 or v.real <= 0.0:
            raise DomainError(f"{name} must be positive real, got {v}")
    return f00(z, (-int(k), -int(l)))
