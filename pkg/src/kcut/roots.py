"""Root finding for strictly increasing functions.

All routines are vectorized: ``func`` maps an array of abscissae to an array
of the same shape, one independent monotone problem per entry.  Entries are
solved simultaneously; a problem that cannot be bracketed is reported through
the returned mask instead of an exception so callers can classify it (for
instance as "not semistable").
"""

import numpy as np

_EPS = np.finfo(float).eps


def bracket_increasing(func, x0, *, step=1.0, lower=-np.inf, upper=np.inf,
                       max_expand=60):
    """Grow a bracket ``lo <= root <= hi`` around ``x0`` for increasing ``func``.

    Returns ``lo, hi, flo, fhi, ok`` where ``ok`` flags entries with
    ``flo <= 0 <= fhi``.
    """
    x0 = np.asarray(x0, dtype=float)
    width = np.full(x0.shape, float(step))
    lo = np.maximum(x0 - width, lower)
    hi = np.minimum(x0 + width, upper)
    flo = np.asarray(func(lo), dtype=float)
    fhi = np.asarray(func(hi), dtype=float)

    for _ in range(max_expand):
        need_lo = ~(flo <= 0) & (lo > lower)
        need_hi = ~(fhi >= 0) & (hi < upper)
        if not (need_lo.any() or need_hi.any()):
            break
        width = np.where(need_lo | need_hi, 2.0 * width, width)
        # a too-high lower end is a valid upper end and vice versa
        new_hi = np.where(need_lo & (flo > 0), lo, hi)
        new_fhi = np.where(need_lo & (flo > 0), flo, fhi)
        new_lo = np.where(need_hi & (fhi < 0), hi, lo)
        new_flo = np.where(need_hi & (fhi < 0), fhi, flo)
        new_lo = np.where(need_lo, np.maximum(lo - width, lower), new_lo)
        new_hi = np.where(need_hi, np.minimum(hi + width, upper), new_hi)
        lo, hi = new_lo, new_hi
        moved = need_lo | need_hi
        if moved.any():
            f_lo_eval = np.asarray(func(lo), dtype=float)
            f_hi_eval = np.asarray(func(hi), dtype=float)
            flo = np.where(need_lo, f_lo_eval, new_flo)
            fhi = np.where(need_hi, f_hi_eval, new_fhi)

    ok = (flo <= 0) & (fhi >= 0)
    return lo, hi, flo, fhi, ok


def solve_increasing(func, lo, hi, *, fprime=None, ftol=0.0, xtol=1e-15,
                     maxiter=200, polish=2):
    """Safeguarded Newton iteration inside a valid bracket.

    Newton steps that leave the current bracket fall back to bisection, so the
    iteration converges for any continuous increasing ``func``.  When
    ``fprime`` is None a secant slope from the bracket end points is used.

    Returns ``x, converged``.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    x = 0.5 * (lo + hi)
    done = np.zeros(x.shape, dtype=bool)
    fx = np.asarray(func(x), dtype=float)
    flo = np.asarray(func(lo), dtype=float)
    fhi = np.asarray(func(hi), dtype=float)

    for _ in range(maxiter):
        lo = np.where(fx < 0, x, lo)
        flo = np.where(fx < 0, fx, flo)
        hi = np.where(fx > 0, x, hi)
        fhi = np.where(fx > 0, fx, fhi)
        done |= (np.abs(fx) <= ftol) | (fx == 0)
        done |= (hi - lo) <= xtol * (1.0 + np.abs(x))
        if done.all():
            break
        if fprime is not None:
            slope = np.asarray(fprime(x), dtype=float)
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                slope = (fhi - flo) / (hi - lo)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_new = x - fx / slope
        inside = np.isfinite(x_new) & (x_new > lo) & (x_new < hi)
        x_new = np.where(inside, x_new, 0.5 * (lo + hi))
        tiny_step = np.abs(x_new - x) <= 4 * _EPS * (1.0 + np.abs(x))
        x = np.where(done, x, x_new)
        fx = np.where(done, fx, np.asarray(func(x), dtype=float))
        done |= tiny_step & inside

    converged = done & np.isfinite(x) & np.isfinite(fx)
    if fprime is not None:
        for _ in range(polish):
            slope = np.asarray(fprime(x), dtype=float)
            with np.errstate(divide="ignore", invalid="ignore"):
                x_try = x - fx / slope
            ok = np.isfinite(x_try) & converged
            x_try = np.where(ok, x_try, x)
            f_try = np.asarray(func(x_try), dtype=float)
            better = ok & np.isfinite(f_try) & (np.abs(f_try) <= np.abs(fx))
            x = np.where(better, x_try, x)
            fx = np.where(better, f_try, fx)
    return x, converged


def find_increasing_root(func, x0=0.0, *, fprime=None, step=1.0,
                         lower=-np.inf, upper=np.inf, ftol=0.0, xtol=1e-15,
                         max_expand=60, maxiter=200):
    """Bracket and solve ``func(x) = 0`` for increasing ``func``.

    Returns ``x, ok`` where ``ok`` is False for entries that could not be
    bracketed or did not converge (``x`` is NaN there).
    """
    lo, hi, _, _, bracketed = bracket_increasing(
        func, x0, step=step, lower=lower, upper=upper, max_expand=max_expand)
    # park unbracketed entries on a harmless interval so the vector solve runs
    safe_lo = np.where(bracketed, lo, 0.0)
    safe_hi = np.where(bracketed, hi, 1.0)

    def guarded(x):
        val = np.asarray(func(x), dtype=float)
        return np.where(bracketed, val, x - 0.5)

    def guarded_prime(x):
        val = np.asarray(fprime(x), dtype=float)
        return np.where(bracketed, val, 1.0)

    x, converged = solve_increasing(
        guarded, safe_lo, safe_hi,
        fprime=guarded_prime if fprime is not None else None,
        ftol=ftol, xtol=xtol, maxiter=maxiter)
    ok = bracketed & converged
    return np.where(ok, x, np.nan), ok
