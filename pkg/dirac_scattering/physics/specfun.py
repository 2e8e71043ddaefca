"""
Complex special functions used by the scattering formulas.

Only the parameter domains that occur in the partial-wave analysis are in
contract:

- ``log_gamma`` / ``gamma_ratio``: complex arguments with |z| <= 1e3.
- ``kummer_phi``: Phi(a, b, z) with real b > 0 and z on the negative imaginary
  axis (z = -2i*rho), |z| up to 1e4.
- ``gauss_f_unit``: F(1, a2; b1; w) on (or inside) the unit circle, w != 1.

Kummer regimes
--------------
|z| <= series_limit        Taylor series in double precision
|z| >= asymptotic_limit    two-sided large-|z| expansion (oscillatory axis)
otherwise / on failure     Taylor series in extended precision (mpmath)

The extended regime evaluates in a private mpmath context per call; the global
``mpmath.mp`` precision is never touched.
"""

import cmath
import contextlib
import contextvars
import logging
import math
from typing import Tuple

import mpmath
import numpy as np
from scipy import special

from ..exceptions import ConvergenceError, DomainError, PoleError

logger = logging.getLogger(__name__)

EPSILON = np.finfo(float).eps
KUMMER_TOLERANCE = 1e-11
GAUSS_TOLERANCE = 1e-12

# Test-only perturbation of every Gamma value (see inject_gamma_fault)
_gamma_fault = contextvars.ContextVar('gamma_fault', default=0.0)


@contextlib.contextmanager
def inject_gamma_fault(delta: float):
    """
    Perturb Gamma(z) by the factor exp(i*delta*|z|*sign(Im z)) inside the block.

    The perturbation is odd under conjugation, so it survives in ratios of
    conjugate pairs and shifts every phase shift by O(delta). Used to check
    that the verification suites are sensitive to kernel errors.
    """
    token = _gamma_fault.set(float(delta))
    try:
        yield
    finally:
        _gamma_fault.reset(token)


def _is_pole(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))


def _fault_term(z: np.ndarray):
    delta = _gamma_fault.get()
    if not delta:
        return 0.0
    return 1j * delta * np.abs(z) * np.sign(z.imag)


def log_gamma(z):
    """
    Principal branch of log Gamma(z) for complex z.

    Delegates to scipy's loggamma, which uses the reflection formula for
    Re z < 1/2 and is continuous on the right half-plane.

    Args:
        z: Complex scalar or array, no element a non-positive integer.

    Returns:
        Complex scalar or array of the same shape.
    """
    arr = np.asarray(z, dtype=complex)
    if np.any(_is_pole(arr)):
        raise PoleError(f'log_gamma has a pole at non-positive integers (got {z!r})')
    value = special.loggamma(arr) + _fault_term(arr)
    return value[()] if value.ndim == 0 else value


def gamma_ratio(a, b):
    """Gamma(a)/Gamma(b) through log-gamma differences, without overflowing either factor."""
    return np.exp(log_gamma(a) - log_gamma(b))


def reciprocal_gamma(z):
    """1/Gamma(z), entire in z (zero at the poles of Gamma)."""
    arr = np.asarray(z, dtype=complex)
    value = special.rgamma(arr) * np.exp(-_fault_term(arr))
    return value[()] if value.ndim == 0 else value


def kummer_series_partial(a: complex, b: float, z: complex, n_terms: int) -> complex:
    """First ``n_terms`` terms of the Taylor series of Phi(a, b, z)."""
    term = 1.0 + 0.0j
    total = term
    for n in range(n_terms - 1):
        term *= (a + n) / (b + n) * z / (n + 1)
        total += term
    return total


def _kummer_taylor(a: complex, b: float, z: complex, tol: float,
                   max_terms: int = 10_000) -> Tuple[complex, float]:
    term = 1.0 + 0.0j
    total = term
    abs_sum = 1.0
    n = 0
    while n < max_terms:
        term *= (a + n) / (b + n) * z / (n + 1)
        total += term
        abs_sum += abs(term)
        n += 1
        if term == 0:
            break
        if n > abs(z) and abs(term) <= EPSILON * abs(total):
            break
    if total == 0:
        return total, math.inf
    # rounding grows with the largest partial sums, i.e. with sum |t_n|
    return total, (EPSILON * abs_sum + abs(term)) / abs(total)


def _asymptotic_sum(p: complex, q: complex, w: complex, tol: float,
                    max_terms: int = 500) -> Tuple[complex, float]:
    """Sum (p)_n (q)_n / n! * w^(-n), stopped at tolerance or at the smallest term."""
    term = 1.0 + 0.0j
    total = term
    for n in range(max_terms):
        nxt = term * (p + n) * (q + n) / ((n + 1) * w)
        if nxt == 0:
            return total, 0.0
        if abs(nxt) >= abs(term) and n > 0:
            return total, abs(term)
        term = nxt
        total += term
        if abs(term) <= tol * abs(total):
            return total, abs(term)
    return total, abs(term)


def _gamma_quotient(log_numerator: complex, c: complex) -> complex:
    """exp(log_numerator) / Gamma(c), zero when c is a pole of Gamma."""
    if _is_pole(c):
        return 0.0j
    return cmath.exp(log_numerator - log_gamma(c))


def _kummer_asymptotic(a: complex, b: float, z: complex, tol: float) -> Tuple[complex, float]:
    # upper sign for Im z > 0, lower sign otherwise (covers the negative imaginary axis)
    sign = 1.0 if z.imag > 0 else -1.0
    log_z = cmath.log(z)
    log_gb = log_gamma(b)

    first = _gamma_quotient(log_gb + sign * 1j * math.pi * a - a * log_z, b - a)
    second = _gamma_quotient(log_gb + z + (a - b) * log_z, a)

    sum1, err1 = _asymptotic_sum(a, a - b + 1, -z, tol)
    sum2, err2 = _asymptotic_sum(b - a, 1 - a, z, tol)

    value = first * sum1 + second * sum2
    if value == 0:
        return value, math.inf
    return value, (abs(first) * err1 + abs(second) * err2) / abs(value)


def _kummer_extended(a: complex, b: float, z: complex) -> complex:
    dps = 20 + int(abs(z) / math.log(10))
    ctx = mpmath.MPContext()
    ctx.dps = dps
    try:
        value = ctx.hyp1f1(ctx.mpc(a), ctx.mpf(b), ctx.mpc(z))
    except mpmath.libmp.NoConvergence as exc:
        raise ConvergenceError(f'extended-precision Phi({a}, {b}, {z}) did not converge: {exc}')
    return complex(value)


def kummer_phi(a: complex, b: float, z: complex, tol: float = KUMMER_TOLERANCE,
               series_limit: float = 10.0, asymptotic_limit: float = 30.0,
               extended: bool = True) -> complex:
    """
    Kummer's confluent hypergeometric function Phi(a, b, z) = 1F1(a; b; z).

    Args:
        a: Complex first parameter.
        b: Real second parameter, b > 0.
        z: Complex argument.
        tol: Relative accuracy each regime must certify.
        series_limit: Largest |z| handled by the double-precision Taylor series.
        asymptotic_limit: Smallest |z| handled by the asymptotic expansion.
        extended: Allow the extended-precision fallback.

    Returns:
        Phi(a, b, z) as a Python complex.
    """
    a = complex(a)
    b = float(b)
    z = complex(z)
    if not b > 0:
        raise DomainError(f'kummer_phi requires b > 0, got {b}')
    if z == 0 or a == 0:
        return 1.0 + 0.0j

    radius = abs(z)
    achieved = math.inf
    if radius <= series_limit:
        value, error = _kummer_taylor(a, b, z, tol)
        if error <= tol:
            return value
        achieved = min(achieved, error)
    if radius >= asymptotic_limit:
        value, error = _kummer_asymptotic(a, b, z, tol)
        if error <= tol:
            return value
        achieved = min(achieved, error)
    if not extended:
        raise ConvergenceError(f'Phi({a}, {b}, {z}) not resolved by series or asymptotics', achieved)
    logger.debug('Phi(%s, %s, %s): extended-precision regime', a, b, z)
    return _kummer_extended(a, b, z)


def kummer_phi_derivative(a: complex, b: float, z: complex, **options) -> complex:
    """dPhi/dz through the contiguous relation Phi' = (a/b) Phi(a+1, b+1, z)."""
    a = complex(a)
    if a == 0:
        return 0.0j
    return a / b * kummer_phi(a + 1, b + 1, z, **options)


def kummer_recurrence_check(a: complex, b: float, z: complex, **options) -> float:
    """
    Relative residual of (z d/dz + a) Phi(a, b, z) = a Phi(a+1, b, z).

    The derivative comes from the contiguous relation, not finite differences,
    so the residual measures the accuracy of the three Phi evaluations.
    """
    a = complex(a)
    z = complex(z)
    lhs = z * kummer_phi_derivative(a, b, z, **options) + a * kummer_phi(a, b, z, **options)
    rhs = a * kummer_phi(a + 1, b, z, **options)
    if rhs == 0:
        return abs(lhs)
    return abs(lhs - rhs) / abs(rhs)


def gauss_f_unit_with_error(a2: complex, b1: complex, w: complex, tol: float = GAUSS_TOLERANCE,
                            min_terms: int = 64, max_terms: int = 100_000,
                            warn_terms: int = 20_000) -> Tuple[complex, float]:
    """
    F(1, a2; b1; w) for |w| <= 1, w != 1, with an absolute error estimate.

    The first N terms t_n w^n, t_n = (a2)_n/(b1)_n, are summed directly. The
    tail is the Euler transform

        sum_{n>=N} t_n w^n = w^N t_N/(1-w) * sum_k prod_{i<k} (a2-b1-i)/(b1+N+i) * (w/(1-w))^k

    whose forward differences are exact (no cancellation). N grows like
    1/|1-w|, which is where the forward direction theta -> 0 costs terms.
    """
    a2 = complex(a2)
    b1 = complex(b1)
    w = complex(w)
    if abs(w) > 1.0 + 1e-12:
        raise DomainError(f'gauss_f_unit requires |w| <= 1, got |w| = {abs(w)}')
    if not (b1 - a2).real > 0:
        raise DomainError('gauss_f_unit requires Re(b1 - a2) > 0 for convergence on |w| = 1')
    if w == 0:
        return 1.0 + 0.0j, 0.0

    gap = abs(1.0 - w)
    if gap < 1e-12:
        raise ConvergenceError('F(1, a2; b1; w) diverges at w = 1 (forward direction)')
    n_terms = max(min_terms, int(math.ceil(80.0 / gap)))
    if n_terms > max_terms:
        raise ConvergenceError(
            f'F(1, a2; b1; w) needs {n_terms} terms at |1-w| = {gap:.3e}; '
            f'increase the forward cutoff', achieved_error=None
        )
    if n_terms > warn_terms:
        logger.warning('slow 2F1 convergence near w = 1: %d terms (|1-w| = %.3e)', n_terms, gap)

    n = np.arange(n_terms - 1)
    ratios = (a2 + n) / (b1 + n) * w
    terms = np.concatenate(([1.0 + 0.0j], np.cumprod(ratios)))
    head = terms.sum()
    leading = terms[-1] * (a2 + n_terms - 1) / (b1 + n_terms - 1) * w

    q = w / (1.0 - w)
    factor = 1.0 + 0.0j
    tail_sum = factor
    last = math.inf
    for k in range(4 * n_terms):
        factor *= (a2 - b1 - k) / (b1 + n_terms + k) * q
        if abs(factor) >= last:
            break
        tail_sum += factor
        last = abs(factor)
        if last <= tol * abs(tail_sum):
            break

    scale = leading / (1.0 - w)
    value = head + scale * tail_sum
    error = abs(scale) * last + EPSILON * n_terms * abs(value)
    return value, error


def gauss_f_unit(a2: complex, b1: complex, w: complex, tol: float = GAUSS_TOLERANCE,
                 accept: float = 1e-10, **options) -> complex:
    """
    F(1, a2; b1; w) on the unit circle, accurate to about 1e-9 for |arg w| >= pi/32.

    Raises:
        ConvergenceError: when the achieved relative error exceeds ``accept``.
    """
    value, error = gauss_f_unit_with_error(a2, b1, w, tol=tol, **options)
    if value != 0 and error / abs(value) > accept:
        raise ConvergenceError('F(1, a2; b1; w) tail did not converge', error / abs(value))
    return value
