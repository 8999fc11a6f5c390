"""Hankel contours and tensor-product quadrature of Mellin-Barnes integrals.

One integration variable per complement column: each runs over a Hankel path
that comes in from infinity just below the negative real axis, circles the
origin counterclockwise at radius epsilon, and leaves just above the axis.
Arms are discretized in composite Gauss-Legendre panels whose boundaries are
aligned with the integer radii where the Gamma poles sit; panels adjacent to
those radii are subdivided so the nearby pole costs no accuracy.

The integrand of F_{sigma, ktilde} factors per dimension except for the
reciprocal-gamma denominator, so the weighted integrand is cached as a
tensor and contracted against per-dimension phase vectors; evaluating the
whole ktilde family then costs one quadrature plus cheap contractions.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import (
    BranchCut,
    DimensionTooLarge,
    DomainError,
    PoleHit,
    QuadratureNotConverged,
    SingularSimplex,
)
from .gkz import GkzSystem, Simplex, simplex_admissible
from .series import gamma_function, reciprocal_gamma

TWO_PI_I = 2j * math.pi


@dataclass(frozen=True)
class ContourSpec:
    """Geometry and quadrature resolution of one Hankel path."""

    epsilon: float = 0.5
    epsilon_prime: float = 0.05
    arm_length: float = 40.0
    panels_per_unit: int = 4
    nodes_per_panel: int = 16

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if not 0 < self.epsilon_prime < math.pi / 8:
            raise ValueError("epsilon_prime must lie in (0, pi/8)")
        if self.arm_length < 5:
            raise ValueError("arm_length must be at least 5")
        if self.panels_per_unit < 2 or self.nodes_per_panel < 2:
            raise ValueError("panels_per_unit and nodes_per_panel must be >= 2")


@lru_cache(maxsize=16)
def _gl_nodes(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _panel_quadrature(a: float, b: float, order: int):
    x, w = _gl_nodes(order)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return mid + half * x, half * w


@dataclass
class _Panel:
    kind: str  # "arm_in" | "arc" | "arm_out"
    nodes: np.ndarray
    weights: np.ndarray


def _arm_boundaries(spec: ContourSpec, refine_limit: int = 24) -> list[float]:
    eps, ppu = spec.epsilon, spec.panels_per_unit
    r_max = eps + spec.arm_length
    pts = {eps, r_max}
    k = math.floor(eps * ppu) + 1
    while k / ppu < r_max:
        pts.add(k / ppu)
        k += 1
    # graded refinement toward each integer radius (Gamma pole alignment)
    for m in range(1, min(int(r_max), refine_limit) + 1):
        for d in (1.0 / (2 * ppu), 1.0 / (4 * ppu)):
            for cand in (m - d, m + d):
                if eps < cand < r_max:
                    pts.add(cand)
    return sorted(pts)


def build_hankel_panels(spec: ContourSpec, shift: float = 0.0) -> dict[str, list[_Panel]]:
    """Panels of the Hankel path around `shift`, grouped and ordered so that
    each arm list runs from the arc outward; weights carry the path
    orientation (in along arg = -pi + eps', arc counterclockwise, out along
    arg = pi - eps')."""
    th_lo = -math.pi + spec.epsilon_prime
    th_hi = math.pi - spec.epsilon_prime
    bounds = _arm_boundaries(spec)
    e_lo = cmath.exp(1j * th_lo)
    e_hi = cmath.exp(1j * th_hi)
    arm_in, arm_out = [], []
    for a, b in zip(bounds, bounds[1:]):
        r, w = _panel_quadrature(a, b, spec.nodes_per_panel)
        arm_in.append(_Panel("arm_in", shift + r * e_lo, -w * e_lo))
        arm_out.append(_Panel("arm_out", shift + r * e_hi, w * e_hi))
    arc_len = spec.epsilon * (th_hi - th_lo)
    n_arc = max(2, math.ceil(arc_len * spec.panels_per_unit))
    arc = []
    for i in range(n_arc):
        t0 = th_lo + (th_hi - th_lo) * i / n_arc
        t1 = th_lo + (th_hi - th_lo) * (i + 1) / n_arc
        t, w = _panel_quadrature(t0, t1, spec.nodes_per_panel)
        pos = spec.epsilon * np.exp(1j * t)
        arc.append(_Panel("arc", shift + pos, 1j * pos * w))
    return {"arm_in": arm_in, "arc": arc, "arm_out": arm_out}


def hankel_contour(spec: ContourSpec, shift: float = 0.0) -> list[tuple[complex, complex]]:
    """Flat (node, weight) list in path order: incoming arm from far away,
    the counterclockwise arc, then the outgoing arm."""
    groups = build_hankel_panels(spec, shift)
    out = []
    for panel in reversed(groups["arm_in"]):
        out.extend(zip(panel.nodes[::-1].tolist(), panel.weights[::-1].tolist()))
    for panel in groups["arc"]:
        out.extend(zip(panel.nodes.tolist(), panel.weights.tolist()))
    for panel in groups["arm_out"]:
        out.extend(zip(panel.nodes.tolist(), panel.weights.tolist()))
    return out


# ---------------------------------------------------------------------------
# specs and the convergence domain


@dataclass(frozen=True)
class MbSpec:
    system: GkzSystem
    sigma: Simplex
    k_tilde: tuple[int, ...] = None  # defaults to the zero vector
    contour: ContourSpec = field(default_factory=ContourSpec)
    tail_tol: float = 1e-12

    def __post_init__(self):
        if self.k_tilde is None:
            object.__setattr__(self, "k_tilde", tuple(0 for _ in range(self.system.n)))
        if len(self.k_tilde) != self.system.n:
            raise ValueError("k_tilde must have one entry per row")
        if self.tail_tol <= 0:
            raise ValueError("tail_tol must be positive")
        report = simplex_admissible(self.system.a, self.sigma.indices)
        if not report.admissible:
            raise SingularSimplex(
                "sigma is not admissible: some column sum of A_sigma^{-1} a(j) exceeds 1"
            )


@dataclass(frozen=True)
class DomainReport:
    inside: bool
    columns: tuple[dict, ...]

    def __bool__(self):
        return self.inside


def in_convergence_domain(
    sigma: Simplex, a, z, margins=None, default_margin: float = 1.0
) -> DomainReport:
    """Certified convergence region of the contour integral and the series.

    Columns with critical sum exactly 1 must satisfy |z_j| < margin_j times
    |z_sigma^{A_sigma^{-1} a(j)}|; columns with smaller sum decay faster than
    any exponential along the contour and impose no constraint.
    """
    cols_report = []
    inside = all(complex(z[j]) != 0 for j in sigma.indices)
    for j in sigma.complement(a.cols):
        expo = sigma.inv_times(a.column(j))
        s_j = sum(expo)
        entry = {"column": j, "critical_sum": s_j}
        if s_j < 1:
            entry["constraint"] = "none (super-exponential decay)"
            entry["satisfied"] = True
        elif s_j == 1:
            margin = default_margin
            if margins is not None:
                margin = margins.get(j, default_margin) if isinstance(margins, dict) else float(margins)
            scale = 1.0
            ok = True
            for pos, i in enumerate(sigma.indices):
                zi = abs(complex(z[i]))
                if zi == 0:
                    ok = False
                    break
                scale *= zi ** float(expo[pos])
            ratio = abs(complex(z[j])) / scale if ok else math.inf
            entry["constraint"] = f"|z_{j + 1}| < {margin} * |z_sigma^(A_sigma^-1 a)|"
            entry["ratio"] = ratio
            entry["satisfied"] = ok and ratio < margin
            inside = inside and entry["satisfied"]
        else:
            entry["constraint"] = "critical sum exceeds 1: outside every such domain"
            entry["satisfied"] = False
            inside = False
        cols_report.append(entry)
    return DomainReport(inside=inside, columns=tuple(cols_report))


# ---------------------------------------------------------------------------
# integrand and quadrature


def _phase_vector(spec: MbSpec) -> tuple[Fraction, ...]:
    """k_tilde^T A_sigma^{-1} A_sigmabar as exact rationals, one per dimension."""
    comp = spec.sigma.complement(spec.system.num_columns)
    out = []
    for j in comp:
        col = spec.sigma.inv_times(spec.system.a.column(j))
        out.append(sum(Fraction(k) * col[i] for i, k in enumerate(spec.k_tilde)))
    return tuple(out)


def _branch_logs(z, n_cols: int) -> list[complex]:
    logs = []
    for j in range(n_cols):
        zj = complex(z[j])
        if zj.imag == 0.0 and zj.real <= 0.0:
            raise BranchCut(f"z_{j + 1} = {zj} lies on the closed negative real axis")
        logs.append(cmath.log(zj))
    return logs


class _MbContext:
    """Everything that depends on (system, sigma, z) but not on the contour."""

    def __init__(self, system: GkzSystem, sigma: Simplex, z):
        self.system = system
        self.sigma = sigma
        self.z = tuple(complex(x) for x in z)
        self.comp = sigma.complement(system.num_columns)
        self.nn = len(self.comp)
        self.logs = _branch_logs(z, system.num_columns)
        self.inv_c = sigma.inv_times(system.c)
        # B columns: A_sigma^{-1} a(j) for complement j, exact
        self.b_cols = [sigma.inv_times(system.a.column(j)) for j in self.comp]
        # per-dimension exponent multiplier: s_j * (sum_i B_ij log z_sigma_i - log z_j - i pi)
        self.dim_log = []
        for pos, j in enumerate(self.comp):
            acc = -self.logs[j] - 1j * math.pi
            for i, si in enumerate(sigma.indices):
                acc += float(self.b_cols[pos][i]) * self.logs[si]
            self.dim_log.append(acc)
        # scalar prefactor z_sigma^{-A_sigma^{-1} c}
        self.sigma_prefactor = cmath.exp(
            -sum(complex(ci) * self.logs[si] for ci, si in zip(self.inv_c, sigma.indices))
        )

    def denominator_args(self, s_arrays):
        """1 - invc_i + sum_j B_ij s_j for broadcast-ready s arrays."""
        out = []
        for i in range(self.system.n):
            acc = complex(1 - self.inv_c[i])
            term = None
            for pos in range(self.nn):
                contrib = float(self.b_cols[pos][i]) * s_arrays[pos]
                term = contrib if term is None else term + contrib
            out.append(acc + term)
        return out


def mb_integrand(spec: MbSpec, z, s) -> complex:
    """Value of the contour integrand at one point s (no prefactor).

    Gamma(s_j) factors, (e^{i pi} z_j)^{-s_j} with principal logarithms,
    z_sigma to the rational exponent A_sigma^{-1} A_sigmabar s, the ktilde
    phase, all divided by Gamma(1 - A_sigma^{-1}(c - A_sigmabar s)).
    """
    ctx = _MbContext(spec.system, spec.sigma, z)
    s = tuple(complex(x) for x in s)
    if len(s) != ctx.nn:
        raise ValueError("s must have one entry per complement column")
    for sj in s:
        if abs(sj.imag) < 1e-12 and sj.real <= 1e-12 and abs(sj.real - round(sj.real)) < 1e-12:
            raise PoleHit(f"s = {sj} is within 1e-12 of a nonpositive integer")
    phases = _phase_vector(spec)
    val = 1.0 + 0.0j
    for pos, sj in enumerate(s):
        val *= gamma_function(sj) * cmath.exp(
            sj * (ctx.dim_log[pos] + TWO_PI_I * float(phases[pos]))
        )
    denom_args = ctx.denominator_args([np.array(x) for x in s])
    for arg in denom_args:
        val *= complex(reciprocal_gamma(complex(arg)))
    return val


def _dim_base_values(ctx: _MbContext, pos: int, nodes: np.ndarray) -> np.ndarray:
    """Gamma(s) * exp(s * dim_log) on one dimension's nodes (no ktilde phase)."""
    return np.asarray(gamma_function(nodes)) * np.exp(nodes * ctx.dim_log[pos])


def _slice_magnitude(ctx: _MbContext, pos: int, nodes: np.ndarray, anchor: complex, growth: float) -> np.ndarray:
    """|integrand| along one dimension with the others pinned at `anchor`,
    inflated by exp(growth * |Im s|) to cover the worst ktilde phase."""
    vals = np.abs(_dim_base_values(ctx, pos, nodes))
    if growth:
        vals = vals * np.exp(growth * np.abs(nodes.imag))
    s_arrays = []
    for q in range(ctx.nn):
        s_arrays.append(nodes if q == pos else np.full(nodes.shape, anchor))
    for q in range(ctx.nn):
        if q != pos:
            vals = vals * np.abs(_dim_base_values(ctx, q, s_arrays[q]))
    for arg in ctx.denominator_args(s_arrays):
        vals = vals * np.abs(reciprocal_gamma(arg))
    return vals


def _truncate_dim(
    ctx: _MbContext,
    pos: int,
    groups: dict[str, list[_Panel]],
    tol: float,
    growth: float,
    anchor: complex,
) -> tuple[np.ndarray, np.ndarray, dict]:
    """Keep arc panels plus each arm's prefix until the 1-D slice magnitude
    stays below tol relative to its running maximum for 3 consecutive panels."""
    kept = {"arm_in": [], "arc": groups["arc"], "arm_out": []}
    run_max = 0.0
    for panel in groups["arc"]:
        run_max = max(run_max, float(np.max(_slice_magnitude(ctx, pos, panel.nodes, anchor, growth))))
    cutoffs = {}
    for arm in ("arm_in", "arm_out"):
        below = 0
        arm_max = run_max
        for idx, panel in enumerate(groups[arm]):
            mag = float(np.max(_slice_magnitude(ctx, pos, panel.nodes, anchor, growth)))
            arm_max = max(arm_max, mag)
            kept[arm].append(panel)
            if mag < tol * arm_max:
                below += 1
                if below >= 3:
                    break
            else:
                below = 0
        cutoffs[arm] = len(kept[arm])
    nodes = np.concatenate([p.nodes for arm in ("arm_in", "arc", "arm_out") for p in kept[arm]])
    weights = np.concatenate([p.weights for arm in ("arm_in", "arc", "arm_out") for p in kept[arm]])
    report = {
        "panels_kept": {k: len(v) for k, v in kept.items()},
        "panels_total": {k: len(v) for k, v in groups.items()},
    }
    return nodes, weights, report


class MbFamilyEvaluator:
    """Quadrature grid for one (system, sigma, z, contour), reusable across
    the whole ktilde family and across derivative multi-indices.

    The weighted ktilde-free integrand is stored as a tensor; a ktilde value
    or a derivative only changes cheap per-dimension or broadcast factors.
    """

    def __init__(
        self,
        system: GkzSystem,
        sigma: Simplex,
        z,
        contour: ContourSpec | Sequence[ContourSpec] = ContourSpec(),
        tail_tol: float = 1e-12,
        phase_growth: float = 0.0,
        dim_contours: Sequence[tuple[np.ndarray, np.ndarray] | None] | None = None,
    ):
        self.ctx = _MbContext(system, sigma, z)
        nn = self.ctx.nn
        if nn == 0:
            raise DimensionTooLarge("empty complement: nothing to integrate")
        if nn > 3:
            raise DimensionTooLarge("tensor quadrature supports at most 3 contour variables")
        contours = tuple(contour) if isinstance(contour, (tuple, list)) else (contour,) * nn
        self.tail_tol = tail_tol
        self.dim_nodes = []
        self.dim_weights = []
        self.truncation_report = []
        for pos in range(nn):
            if dim_contours is not None and dim_contours[pos] is not None:
                nodes, weights = dim_contours[pos]
                report = {"panels_kept": "explicit", "panels_total": "explicit"}
            else:
                groups = build_hankel_panels(contours[pos])
                nodes, weights, report = _truncate_dim(
                    self.ctx, pos, groups, tail_tol, phase_growth,
                    anchor=complex(contours[pos].epsilon),
                )
            self.dim_nodes.append(nodes)
            self.dim_weights.append(weights)
            self.truncation_report.append(report)
        self.nodes_used = int(np.prod([len(n) for n in self.dim_nodes]))
        self._build_tensor()

    def _build_tensor(self):
        ctx = self.ctx
        nn = ctx.nn
        per_dim = [
            _dim_base_values(ctx, pos, self.dim_nodes[pos]) * self.dim_weights[pos]
            for pos in range(nn)
        ]
        shape = [len(n) for n in self.dim_nodes]
        grids = []
        for pos in range(nn):
            reshape = [1] * nn
            reshape[pos] = shape[pos]
            grids.append(self.dim_nodes[pos].reshape(reshape))
        tensor = np.ones(shape, dtype=complex)
        for pos in range(nn):
            reshape = [1] * nn
            reshape[pos] = shape[pos]
            tensor = tensor * per_dim[pos].reshape(reshape)
        for arg in ctx.denominator_args(grids):
            tensor = tensor * reciprocal_gamma(np.broadcast_to(arg, shape).copy())
        self.tensor = tensor

    # -- contraction helpers ------------------------------------------------

    def _phase_vectors(self, phases: Sequence[Fraction]):
        return [
            np.exp(TWO_PI_I * float(phases[pos]) * self.dim_nodes[pos])
            for pos in range(self.ctx.nn)
        ]

    def _contract(self, extra: np.ndarray | None, phase_vecs) -> complex:
        t = self.tensor if extra is None else self.tensor * extra
        for vec in reversed(phase_vecs):
            t = t @ vec
        return complex(t)

    def _prefactor(self, k_tilde) -> complex:
        ctx = self.ctx
        if ctx.system.c_is_rational:
            w = sum(Fraction(k) * ci for k, ci in zip(k_tilde, ctx.inv_c))
            phase = cmath.exp(-TWO_PI_I * float(w % 1))
        else:
            w = sum(float(k) * complex(ci) for k, ci in zip(k_tilde, ctx.inv_c))
            phase = cmath.exp(-TWO_PI_I * w)
        return phase * ctx.sigma_prefactor / (TWO_PI_I**ctx.nn)

    def _phases_for(self, k_tilde) -> tuple[Fraction, ...]:
        out = []
        for pos in range(self.ctx.nn):
            out.append(
                sum(Fraction(k) * self.ctx.b_cols[pos][i] for i, k in enumerate(k_tilde))
            )
        return tuple(out)

    def value(self, k_tilde=None, extra_dim_phases=None) -> complex:
        """F for one ktilde; extra_dim_phases (real, one per dimension) add to
        the per-dimension phase exponents, which evaluates the integral at z
        with the corresponding sigma-bar entries rotated by exp(2 pi i phase)
        while keeping principal logarithms (the caller wraps into [-1/2,1/2))."""
        k_tilde = tuple(k_tilde) if k_tilde is not None else (0,) * self.ctx.system.n
        phases = list(self._phases_for(k_tilde))
        if extra_dim_phases is not None:
            phases = [p - q for p, q in zip(phases, extra_dim_phases)]
        phase_vecs = self._phase_vectors(phases)
        return self._prefactor(k_tilde) * self._contract(None, phase_vecs)

    def derivative(self, alpha: Sequence[int], k_tilde=None) -> complex:
        """d^alpha of the integral by exact power-rule factors under the sum."""
        ctx = self.ctx
        k_tilde = tuple(k_tilde) if k_tilde is not None else (0,) * ctx.system.n
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != ctx.system.num_columns or any(a < 0 for a in alpha):
            raise ValueError("alpha must be a nonnegative multi-index over all columns")
        phase_vecs = self._phase_vectors(self._phases_for(k_tilde))
        nn = ctx.nn
        shape = [len(n) for n in self.dim_nodes]
        extra = None
        z_power = 1.0 + 0.0j
        comp_pos = {j: pos for pos, j in enumerate(ctx.comp)}
        sigma_pos = {j: i for i, j in enumerate(ctx.sigma.indices)}
        for j, aj in enumerate(alpha):
            if aj == 0:
                continue
            z_power /= ctx.z[j] ** aj
            if j in comp_pos:
                pos = comp_pos[j]
                s = self.dim_nodes[pos]
                fall = np.ones(s.shape, dtype=complex)
                for t in range(aj):
                    fall = fall * (-s - t)
                reshape = [1] * nn
                reshape[pos] = shape[pos]
                factor = fall.reshape(reshape)
            elif j in sigma_pos:
                i = sigma_pos[j]
                e = np.zeros([1] * nn, dtype=complex) + complex(-ctx.inv_c[i])
                for pos in range(nn):
                    reshape = [1] * nn
                    reshape[pos] = shape[pos]
                    e = e + float(ctx.b_cols[pos][i]) * self.dim_nodes[pos].reshape(reshape)
                factor = np.ones_like(e)
                for t in range(aj):
                    factor = factor * (e - t)
            else:  # pragma: no cover
                raise ValueError("alpha index out of range")
            extra = factor if extra is None else extra * factor
        if extra is not None:
            extra = np.broadcast_to(extra, shape)
        return self._prefactor(k_tilde) * z_power * self._contract(extra, phase_vecs)


@dataclass(frozen=True)
class MbValue:
    value: complex
    nodes_used: int
    tail_report: dict


def _max_phase_growth(spec: MbSpec) -> float:
    phases = _phase_vector(spec)
    return TWO_PI_I.imag * max((abs(float(p)) for p in phases), default=0.0)


def family_phase_growth(system: GkzSystem, sigma: Simplex, ktilde_list) -> float:
    """Worst-case |ktilde^T A_sigma^{-1} A_sigmabar| over a family, times 2 pi;
    used to keep arm truncation safe for every member."""
    worst = 0.0
    for kt in ktilde_list:
        for j in sigma.complement(system.num_columns):
            col = sigma.inv_times(system.a.column(j))
            phi = sum(Fraction(int(k)) * col[i] for i, k in enumerate(kt))
            worst = max(worst, abs(float(phi)))
    return TWO_PI_I.imag * worst


def mb_eval(spec: MbSpec, z, check_convergence: bool = True) -> MbValue:
    """Tensor quadrature of F_{sigma, ktilde} at z.

    Warns when z is outside the certified convergence domain but still
    integrates.  With check_convergence the panel count is doubled once and
    a relative self-difference above 10 * tail_tol raises.
    """
    report = in_convergence_domain(spec.sigma, spec.system.a, z)
    if not report.inside:
        warnings.warn("z lies outside the certified convergence domain", stacklevel=2)
    growth = _max_phase_growth(spec)
    ev = MbFamilyEvaluator(
        spec.system, spec.sigma, z, spec.contour, spec.tail_tol, phase_growth=growth
    )
    value = ev.value(spec.k_tilde)
    tail_report = {
        "truncation": ev.truncation_report,
        "in_convergence_domain": report.inside,
    }
    if check_convergence:
        dense = ContourSpec(
            epsilon=spec.contour.epsilon,
            epsilon_prime=spec.contour.epsilon_prime,
            arm_length=spec.contour.arm_length,
            panels_per_unit=spec.contour.panels_per_unit * 2,
            nodes_per_panel=spec.contour.nodes_per_panel,
        )
        ev2 = MbFamilyEvaluator(
            spec.system, spec.sigma, z, dense, spec.tail_tol, phase_growth=growth
        )
        value2 = ev2.value(spec.k_tilde)
        scale = max(abs(value), abs(value2), 1e-300)
        diff = abs(value - value2) / scale
        tail_report["panel_doubling_delta"] = diff
        if diff > 10 * spec.tail_tol:
            raise QuadratureNotConverged(
                f"panel doubling moved the result by {diff:.3e} (> 10 * tail_tol)"
            )
    return MbValue(value=value, nodes_used=ev.nodes_used, tail_report=tail_report)


# ---------------------------------------------------------------------------
# residue partial sums with quadrature remainder


@dataclass(frozen=True)
class PartialSumResult:
    partial: complex
    remainder_bound: float
    remainder_estimate: complex


def residue_partial_sum(spec: MbSpec, z, m_terms: int) -> PartialSumResult:
    """Sum of the first m_terms^dim residue terms plus a quadrature bound on
    the remainder, obtained on contours whose arms are shifted left by
    m_terms (with loop contours around the swept poles in the mixed terms)."""
    if m_terms < 1:
        raise ValueError("m_terms must be >= 1")
    ctx = _MbContext(spec.system, spec.sigma, z)
    nn = ctx.nn
    phases = _phase_vector(spec)
    # exact residue terms
    from .lattice import _graded_shell

    partial = 0.0 + 0.0j
    for degree in range(nn * (m_terms - 1) + 1):
        for m in _graded_shell(nn, degree):
            if any(x >= m_terms for x in m):
                continue
            val = 1.0 + 0.0j
            for pos, mp in enumerate(m):
                # -(dim_log + i pi) per unit exponent is log z_j - sum B log z_sigma
                val *= cmath.exp(-mp * (ctx.dim_log[pos] + 1j * math.pi)) / math.factorial(mp)
                val *= cmath.exp(-TWO_PI_I * float((Fraction(mp) * phases[pos]) % 1))
            for i in range(ctx.system.n):
                arg = 1 - ctx.inv_c[i] - sum(
                    ctx.b_cols[pos][i] * mp for pos, mp in enumerate(m)
                )
                val *= complex(reciprocal_gamma(complex(arg)))
            partial += val
    growth = _max_phase_growth(spec)
    base = MbFamilyEvaluator(
        spec.system, spec.sigma, z, spec.contour, spec.tail_tol, phase_growth=growth
    )
    anchor = complex(spec.contour.epsilon)
    shifted_dims = []
    for pos in range(nn):
        shifted_dims.append(
            _truncate_dim(
                ctx, pos, build_hankel_panels(spec.contour, shift=-float(m_terms)),
                spec.tail_tol, growth, anchor,
            )[:2]
        )
    remainder_terms = []
    for j in range(nn):
        dims: list[tuple[np.ndarray, np.ndarray] | None] = []
        for pos in range(nn):
            if pos < j:  # loop contour around the swept poles
                sh_nodes, sh_weights = shifted_dims[pos]
                dims.append(
                    (
                        np.concatenate([base.dim_nodes[pos], sh_nodes]),
                        np.concatenate([base.dim_weights[pos], -sh_weights]),
                    )
                )
            elif pos == j:  # shifted open contour
                dims.append(shifted_dims[pos])
            else:  # original contour
                dims.append((base.dim_nodes[pos], base.dim_weights[pos]))
        ev = MbFamilyEvaluator(
            spec.system, spec.sigma, z, spec.contour, spec.tail_tol,
            phase_growth=growth, dim_contours=dims,
        )
        remainder_terms.append(ev.value(spec.k_tilde))
    pref = base._prefactor(spec.k_tilde)
    partial_value = pref * (TWO_PI_I**nn) * partial
    remainder_estimate = sum(remainder_terms)
    remainder_bound = 1.05 * sum(abs(t) for t in remainder_terms) + 1e-13 * abs(partial_value)
    return PartialSumResult(
        partial=partial_value,
        remainder_bound=remainder_bound,
        remainder_estimate=remainder_estimate,
    )


# ---------------------------------------------------------------------------
# classical one-dimensional cross-check


def barnes_2f1(alpha: complex, beta: complex, gamma_p: complex, z: complex,
               contour: ContourSpec = ContourSpec()) -> complex:
    """Gauss hypergeometric value from its Hankel-contour integral.

    Normalization pinned so that the value at z = 0 is 1: the integrand
    Gamma(s) Gamma(alpha-s) Gamma(beta-s) / Gamma(gamma-s) (e^{i pi} z)^{-s}
    is integrated over the Hankel path and divided by 2 pi i times
    Gamma(alpha) Gamma(beta) / Gamma(gamma).
    """
    z = complex(z)
    alpha, beta, gamma_p = complex(alpha), complex(beta), complex(gamma_p)
    if abs(z) >= 1:
        raise DomainError("requires |z| < 1")
    if z.imag == 0.0 and z.real <= 0.0:
        if z == 0:
            return 1.0 + 0.0j
        raise BranchCut("z on the closed negative real axis")
    if gamma_p.imag == 0 and gamma_p.real <= 0 and gamma_p.real == round(gamma_p.real):
        raise DomainError("gamma must avoid nonpositive integers")
    for name, par in (("alpha", alpha), ("beta", beta)):
        if par.real <= 0 and abs(par.imag) < 0.5:
            raise DomainError(
                f"{name} too close to the negative axis: the Hankel path cannot"
                " separate its Gamma poles"
            )
    # keep the arc clear of the rightmost pole families alpha + k, beta + k
    min_radius = min(abs(alpha), abs(beta))
    eps = min(contour.epsilon, 0.5 * min_radius) if min_radius > 0 else contour.epsilon
    arm = max(contour.arm_length, min(200.0, 18.0 / max(0.05, -math.log10(abs(z)))))
    spec = ContourSpec(
        epsilon=eps,
        epsilon_prime=contour.epsilon_prime,
        arm_length=arm,
        panels_per_unit=contour.panels_per_unit,
        nodes_per_panel=contour.nodes_per_panel,
    )
    log_ez = cmath.log(z) + 1j * math.pi
    total = 0.0 + 0.0j
    for node, weight in hankel_contour(spec):
        val = (
            gamma_function(node)
            * gamma_function(alpha - node)
            * gamma_function(beta - node)
            * complex(reciprocal_gamma(gamma_p - node))
            * cmath.exp(-node * log_ez)
        )
        total += weight * val
    norm = gamma_function(gamma_p) * complex(reciprocal_gamma(alpha)) * complex(
        reciprocal_gamma(beta)
    )
    return norm * total / TWO_PI_I
