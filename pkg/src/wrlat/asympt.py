"""Numerical verification of the counting asymptotics.

This is the only module that touches floating point.  It has three jobs:

* compute the base transcendental constants (Euler-Mascheroni gamma,
  zeta'(2), L'(1, chi_-4)) from documented series with Euler-Maclaurin or
  pairing-based tail corrections and explicit remainder bounds, at mpmath
  working precision;
* evaluate the closed formula for the Laurent constant of the square-lattice
  well-rounded counting series.  The formula contains two slowly convergent
  sums measuring how much the truncated harmonic windows (q in (p, sqrt(3)p),
  resp. odd values in the same aspect window) fall short of their limits
  log(3)/2 and log(3)/4.  Those sums are evaluated term-by-term in 80-bit
  extended precision and closed with the Euler-Maclaurin tail estimates

      sum_{p>P} term(p) = 1/(2P) + O(log(P)/P^2),
      sum_{k>K} term(k) = 1/(8(K+1)) + O(log(K)/K^2),

  which follow from H_n = log n + gamma + 1/(2n) + O(1/n^2) together with
  the equidistribution of the fractional parts of sqrt(3)p (the fractional
  part averages 1/2, and sqrt(3) is badly approximable, so the fluctuation
  term is O(log P / P^2)).  The declared error uses the conservative bound
  25/P^2 + (4/3)*25/K^2 plus an extended-precision rounding allowance; the
  test suite checks it by doubling every truncation parameter;
* fit summatory data A(x) against the growth models slope*x*(log x - 1) + c*x
  and slope*x, and report residuals normalized by the stated error terms.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Callable, Optional, Sequence, Union

import mpmath as mp
import numpy as np

from .hnf import CountTable, SummatoryReport, summatory

__all__ = [
    "ConstantBundle",
    "constant_bundle",
    "euler_gamma_em",
    "zeta_prime_2_em",
    "lprime1_chi4_em",
    "harmonic_window_defect_sum",
    "odd_harmonic_window_defect_sum",
    "CSquareResult",
    "compute_c_square",
    "AsymptoticModel",
    "model_thm3_square",
    "model_thm4_square",
    "model_triangle_two_term",
    "model_two_reflection",
    "LaurentFit",
    "estimate_laurent_constant",
    "fit_two_term",
    "residual_report",
    "default_log_grid",
]

_LONG = np.longdouble


# ---------------------------------------------------------------------------
# base constants from documented series
# ---------------------------------------------------------------------------


def _mpf_from_longdouble(x) -> mp.mpf:
    """Lossless-enough transfer of an 80-bit value into mpmath (hi/lo split)."""
    hi = float(x)
    lo = float(x - _LONG(hi))
    return mp.mpf(hi) + mp.mpf(lo)


def euler_gamma_em(n_direct: int = 2000, em_terms: int = 10) -> tuple[mp.mpf, mp.mpf]:
    """Euler-Mascheroni constant via the harmonic-number expansion.

    gamma = H_N - log N - 1/(2N) + sum_{k=1}^{K} B_{2k}/(2k N^{2k}) + R,
    with |R| below twice the first omitted term.
    """
    with mp.workprec(mp.mp.prec + 40):
        N = n_direct
        h = mp.mpf(0)
        for n in range(1, N + 1):
            h += mp.mpf(1) / n
        val = h - mp.log(N) - mp.mpf(1) / (2 * N)
        for k in range(1, em_terms + 1):
            val += mp.bernoulli(2 * k) / (2 * k * mp.mpf(N) ** (2 * k))
        bound = 2 * abs(mp.bernoulli(2 * em_terms + 2)) / (
            (2 * em_terms + 2) * mp.mpf(N) ** (2 * em_terms + 2)
        )
    return +val, +bound


def _em_tail_log_derivatives(power0: int, em_terms: int):
    """Coefficient pairs (A_j, B_j) of the derivatives of f(t) = log(u)/u^power0
    with u = scale*t + shift:  f^(j)(t) = scale^j (A_j + B_j log u)/u^(power0+j).
    The recurrence (A, B, p) -> (B - p A, -p B, p+1) is scale-independent."""
    coeffs = [(Fraction(0), Fraction(1))]
    p = power0
    for _ in range(2 * em_terms):
        a, b = coeffs[-1]
        coeffs.append((b - p * a, -p * b))
        p += 1
    return coeffs


def zeta_prime_2_em(n_direct: int = 400, em_terms: int = 8) -> tuple[mp.mpf, mp.mpf]:
    """zeta'(2) = -sum log(n)/n^2 with an Euler-Maclaurin tail from n_direct.

    Uses sum_{n=N}^inf f(n) = (log N + 1)/N + f(N)/2
    - sum_k B_{2k}/(2k)! f^(2k-1)(N) for f(t) = log(t)/t^2.
    """
    with mp.workprec(mp.mp.prec + 40):
        N = n_direct
        direct = mp.mpf(0)
        for n in range(2, N):
            direct += mp.log(n) / (mp.mpf(n) * n)
        logN = mp.log(N)
        tail = (logN + 1) / N + logN / (2 * mp.mpf(N) ** 2)
        coeffs = _em_tail_log_derivatives(2, em_terms)
        last = mp.mpf(0)
        for k in range(1, em_terms + 1):
            a, b = coeffs[2 * k - 1]
            deriv = (mp.mpf(a.numerator) / a.denominator
                     + mp.mpf(b.numerator) / b.denominator * logN) / mp.mpf(N) ** (2 * k + 1)
            last = mp.bernoulli(2 * k) / mp.factorial(2 * k) * deriv
            tail -= last
        val = -(direct + tail)
        bound = 2 * abs(last) if em_terms else mp.mpf(1)
    return +val, +bound


def lprime1_chi4_em(n_direct: int = 400, em_terms: int = 8) -> tuple[mp.mpf, mp.mpf]:
    """L'(1, chi_-4) by pairing residues mod 4 and an Euler-Maclaurin tail.

    L'(1) = -sum_{t>=0} g(t) with g(t) = log(4t+1)/(4t+1) - log(4t+3)/(4t+3);
    the pairing makes the series absolutely convergent, and
    int_N^inf g = (log^2(4N+3) - log^2(4N+1))/8 closes the tail.
    """
    with mp.workprec(mp.mp.prec + 40):
        N = n_direct
        direct = mp.mpf(0)
        for t in range(0, N):
            direct += mp.log(4 * t + 1) / (4 * t + 1) - mp.log(4 * t + 3) / (4 * t + 3)
        u1 = mp.mpf(4 * N + 1)
        u3 = mp.mpf(4 * N + 3)
        l1, l3 = mp.log(u1), mp.log(u3)
        tail = (l3 * l3 - l1 * l1) / 8
        tail += (l1 / u1 - l3 / u3) / 2
        coeffs = _em_tail_log_derivatives(1, em_terms)
        last = mp.mpf(0)
        for k in range(1, em_terms + 1):
            a, b = coeffs[2 * k - 1]
            af = mp.mpf(a.numerator) / a.denominator
            bf = mp.mpf(b.numerator) / b.denominator
            deriv = mp.mpf(4) ** (2 * k - 1) * (
                (af + bf * l1) / u1 ** (2 * k) - (af + bf * l3) / u3 ** (2 * k)
            )
            last = mp.bernoulli(2 * k) / mp.factorial(2 * k) * deriv
            tail -= last
        val = -(direct + tail)
        bound = 2 * abs(last) if em_terms else mp.mpf(1)
    return +val, +bound


@dataclass(frozen=True)
class ConstantBundle:
    """Base constants with per-constant absolute error bounds.

    zeta2 and the two L(1, .) values are closed forms in pi and carry only
    working-precision error; the other three come from the series above.
    """

    gamma: mp.mpf
    zeta2: mp.mpf
    zeta_prime_2: mp.mpf
    L1_chi4: mp.mpf
    L1_chi3: mp.mpf
    Lprime1_chi4: mp.mpf
    errors: dict

    def as_float_dict(self) -> dict:
        return {
            "gamma": float(self.gamma),
            "zeta2": float(self.zeta2),
            "zeta_prime_2": float(self.zeta_prime_2),
            "L1_chi4": float(self.L1_chi4),
            "L1_chi3": float(self.L1_chi3),
            "Lprime1_chi4": float(self.Lprime1_chi4),
        }


@functools.lru_cache(maxsize=4)
def constant_bundle(dps: int = 40) -> ConstantBundle:
    with mp.workdps(dps + 10):
        gamma, gamma_err = euler_gamma_em()
        zp2, zp2_err = zeta_prime_2_em()
        lp1, lp1_err = lprime1_chi4_em()
        zeta2 = mp.pi ** 2 / 6
        l1_4 = mp.pi / 4
        l1_3 = mp.pi / (3 * mp.sqrt(3))
        eps = mp.mpf(10) ** (-dps)
        bundle = ConstantBundle(
            gamma=+gamma,
            zeta2=+zeta2,
            zeta_prime_2=+zp2,
            L1_chi4=+l1_4,
            L1_chi3=+l1_3,
            Lprime1_chi4=+lp1,
            errors={
                "gamma": float(gamma_err + eps),
                "zeta2": float(eps),
                "zeta_prime_2": float(zp2_err + eps),
                "L1_chi4": float(eps),
                "L1_chi3": float(eps),
                "Lprime1_chi4": float(lp1_err + eps),
            },
        )
    return bundle


# ---------------------------------------------------------------------------
# the two slowly convergent window-defect sums
# ---------------------------------------------------------------------------


def _isqrt_array(v: np.ndarray) -> np.ndarray:
    """Vectorized floor(sqrt(v)) for int64 v (values far from exact squares)."""
    r = np.sqrt(v.astype(np.float64)).astype(np.int64)
    for _ in range(2):
        r = np.where((r + 1) * (r + 1) <= v, r + 1, r)
        r = np.where(r * r > v, r - 1, r)
    return r


def harmonic_window_defect_sum(terms: int) -> tuple[np.longdouble, float]:
    """sum_{p=1}^inf (1/p)(log(3)/2 - sum_{p<q<sqrt(3)p} 1/q), tail-corrected.

    Returns (value including the 1/(2P) tail correction, declared tail bound).
    """
    if terms < 16:
        raise ValueError("need at least 16 terms")
    P = terms
    p = np.arange(1, P + 1, dtype=np.int64)
    m = _isqrt_array(3 * p * p)  # largest q with q^2 < 3 p^2
    qmax = int(m[-1])
    inv = np.zeros(qmax + 1, dtype=_LONG)
    inv[1:] = 1.0 / np.arange(1, qmax + 1, dtype=_LONG)
    h = np.cumsum(inv)
    half_log3 = np.log(_LONG(3)) / 2
    term = (half_log3 - (h[m] - h[p])) / p.astype(_LONG)
    value = term.sum() + _LONG(1) / (2 * P)
    return value, 25.0 / (P * P)


def odd_harmonic_window_defect_sum(terms: int) -> tuple[np.longdouble, float]:
    """sum_{k=0}^inf (1/(2k+1))(log(3)/4 - sum over the odd window of 1/(2l+1)).

    The odd window is k < l with (2l+1)^2 < 3(2k+1)^2.  Returns the value
    including the 1/(8(K+1)) tail correction and the declared tail bound.
    """
    if terms < 16:
        raise ValueError("need at least 16 terms")
    K = terms
    k = np.arange(0, K + 1, dtype=np.int64)
    u = 2 * k + 1
    lmax = (_isqrt_array(3 * u * u) - 1) // 2
    jmax = int(lmax[-1])
    inv_odd = 1.0 / (2 * np.arange(0, jmax + 1, dtype=_LONG) + 1)
    oh = np.cumsum(inv_odd)
    quarter_log3 = np.log(_LONG(3)) / 4
    term = (quarter_log3 - (oh[lmax] - oh[k])) / u.astype(_LONG)
    value = term.sum() + _LONG(1) / (8 * (K + 1))
    return value, 25.0 / (K * K)


# ---------------------------------------------------------------------------
# the square-lattice Laurent constant
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CSquareResult:
    value: float
    error: float
    p_terms: int
    k_terms: int

    def agrees_with(self, reference: float, tolerance: float) -> bool:
        return abs(self.value - reference) <= tolerance + self.error


def compute_c_square(
    tol: float = 1e-5,
    p_terms: Optional[int] = None,
    k_terms: Optional[int] = None,
    dps: int = 40,
) -> CSquareResult:
    """Laurent constant of the square-lattice counting series at s = 1.

    Evaluates the closed formula: (L(1,chi_-4)/zeta(2)) times the bracket

        zeta(2)
        + (log 3 / 3) (L'(1,chi_-4)/L(1,chi_-4) + gamma - 2 zeta'(2)/zeta(2))
        + (log 3 / 3) (2 gamma - log(3)/4 - log(2)/6)
        - [harmonic window defect sum over all integers]
        - (4/3) [window defect sum over odd integers],

    with both slow sums tail-corrected as described in the module docstring.
    Raises if the declared error cannot meet ``tol``.
    """
    if tol < 1e-9:
        raise ValueError("error targets below 1e-9 are out of budget")
    P = p_terms if p_terms is not None else 10**6
    K = k_terms if k_terms is not None else 10**6
    s_p, bound_p = harmonic_window_defect_sum(P)
    s_k, bound_k = odd_harmonic_window_defect_sum(K)
    base = constant_bundle(dps)
    with mp.workdps(dps):
        log3 = mp.log(3)
        log2 = mp.log(2)
        ratio = base.L1_chi4 / base.zeta2
        bracket = (
            base.zeta2
            + (log3 / 3)
            * (base.Lprime1_chi4 / base.L1_chi4 + base.gamma
               - 2 * base.zeta_prime_2 / base.zeta2)
            + (log3 / 3) * (2 * base.gamma - log3 / 4 - log2 / 6)
            - _mpf_from_longdouble(s_p)
            - mp.mpf(4) / 3 * _mpf_from_longdouble(s_k)
        )
        value = ratio * bracket
        base_err = (
            base.errors["Lprime1_chi4"] + 3 * base.errors["gamma"]
            + 2 * base.errors["zeta_prime_2"]
        )
        error = float(ratio) * (bound_p + 4.0 / 3.0 * bound_k + 1e-12) + base_err
    if error > tol:
        raise ArithmeticError(
            f"declared error {error:.3g} exceeds the requested target {tol:.3g}; "
            "increase p_terms/k_terms"
        )
    return CSquareResult(float(value), error, P, K)


# ---------------------------------------------------------------------------
# growth models and fitting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AsymptoticModel:
    """A closed-form growth model with its residual normalizer."""

    name: str
    evaluate: Callable[[np.ndarray], np.ndarray]
    normalizer: Callable[[np.ndarray], np.ndarray]
    normalizer_name: str


def _log3() -> float:
    return float(np.log(3.0))


def model_thm3_square() -> AsymptoticModel:
    """Leading-order law (log 3 / 2 pi) x log x, normalized by x log x."""
    slope = _log3() / (2 * np.pi)
    return AsymptoticModel(
        "xlogx-leading",
        lambda x: slope * x * np.log(x),
        lambda x: x * np.log(x),
        "x*log(x)",
    )


def model_thm4_square(c_square: float) -> AsymptoticModel:
    """Two-term law (log3/2pi) x (log x - 1) + c x, normalized by x^(3/4) log x."""
    slope = _log3() / (2 * np.pi)
    return AsymptoticModel(
        "square-two-term",
        lambda x: slope * x * (np.log(x) - 1) + c_square * x,
        lambda x: x ** 0.75 * np.log(x),
        "x^(3/4)*log(x)",
    )


def triangle_slope() -> float:
    """3 sqrt(3) log 3 / (8 pi), the hexagonal x(log x - 1) coefficient."""
    return 3 * np.sqrt(3.0) * _log3() / (8 * np.pi)


def model_triangle_two_term(c_triangle: float) -> AsymptoticModel:
    slope = triangle_slope()
    return AsymptoticModel(
        "triangle-two-term",
        lambda x: slope * x * (np.log(x) - 1) + c_triangle * x,
        lambda x: x ** 0.75 * np.log(x),
        "x^(3/4)*log(x)",
    )


def model_two_reflection(sigma: int) -> AsymptoticModel:
    """Linear law (log 3 / 4 Sigma) x for lattices with two coincidence
    reflections of common index Sigma, normalized by sqrt(x)."""
    slope = _log3() / (4 * sigma)
    return AsymptoticModel(
        f"two-reflection-sigma{sigma}",
        lambda x: slope * x,
        lambda x: np.sqrt(x),
        "sqrt(x)",
    )


def _counts_array(counts: Union[CountTable, np.ndarray, Sequence[float]]) -> np.ndarray:
    if isinstance(counts, CountTable):
        return counts.counts
    return np.asarray(counts)


def default_log_grid(nmax: int, low: Optional[int] = None, points: int = 80) -> np.ndarray:
    """Logarithmic integer grid in [low, nmax] (low defaults to nmax/100)."""
    low = max(2, nmax // 100) if low is None else low
    grid = np.unique(np.round(np.logspace(np.log10(low), np.log10(nmax), points)))
    return grid.astype(np.int64)


@dataclass(frozen=True)
class LaurentFit:
    constant: float
    spread: float
    slope_used: float
    grid_low: int
    grid_high: int


def estimate_laurent_constant(
    counts: Union[CountTable, np.ndarray],
    main_slope: float,
    grid: Optional[np.ndarray] = None,
    windows: int = 4,
) -> LaurentFit:
    """Least-squares Laurent constant from A(x) - slope*x*(log x - 1) ~ c*x.

    The fit runs over a logarithmic grid in [N/100, N]; the spread is the
    largest deviation of per-window refits from the full-grid constant.
    Requires counts to N >= 1e5 so the linear term is actually resolvable.
    """
    arr = _counts_array(counts)
    nmax = len(arr) - 1
    if nmax < 10**5:
        raise ValueError("insufficient N: need counts to at least 1e5")
    if grid is None:
        grid = default_log_grid(nmax)
    cum = np.cumsum(arr)
    x = grid.astype(np.float64)
    r = cum[grid] - main_slope * x * (np.log(x) - 1)
    c_full = float(np.dot(x, r) / np.dot(x, x))
    spread = 0.0
    bounds = np.linspace(0, len(grid), windows + 1).astype(int)
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        if hi - lo < 2:
            continue
        xw, rw = x[lo:hi], r[lo:hi]
        cw = float(np.dot(xw, rw) / np.dot(xw, xw))
        spread = max(spread, abs(cw - c_full))
    return LaurentFit(c_full, spread, main_slope, int(grid[0]), int(grid[-1]))


def fit_two_term(
    counts: Union[CountTable, np.ndarray],
    grid: Optional[np.ndarray] = None,
) -> tuple[float, float]:
    """Unconstrained least squares of A(x) ~ alpha*x*(log x - 1) + beta*x."""
    arr = _counts_array(counts)
    nmax = len(arr) - 1
    if grid is None:
        grid = default_log_grid(nmax)
    cum = np.cumsum(arr)
    x = grid.astype(np.float64)
    design = np.stack([x * (np.log(x) - 1), x], axis=1)
    coef, *_ = np.linalg.lstsq(design, cum[grid].astype(np.float64), rcond=None)
    return float(coef[0]), float(coef[1])


def residual_report(
    counts: CountTable,
    model: AsymptoticModel,
    xs: Optional[Sequence[int]] = None,
) -> SummatoryReport:
    """Exact A(x) against a model, with residuals normalized per the model."""
    if xs is None:
        xs = default_log_grid(counts.nmax)
    return summatory(
        counts,
        xs,
        model=model.evaluate,
        normalizer=model.normalizer,
        model_name=model.name,
        normalizer_name=model.normalizer_name,
    )
