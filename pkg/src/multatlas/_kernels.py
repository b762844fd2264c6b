"""Compiled inner loops for the quadratic family z -> z**2 + c.

Everything here works on plain complex scalars and numpy arrays so that numba
can compile it in nopython mode. The public modules wrap these with
validation and dataclasses.
"""
import numpy as np
from numba import njit

OVERFLOW_GUARD = 1e150
_SCALE_SWITCH = 1e100
_EPS = 2.220446049250313e-16


@njit(cache=True)
def iterate(z, c, n):
    """Return (f^n(z), (f^n)'(z), escaped)."""
    w = z
    d = 1.0 + 0.0j
    for _ in range(n):
        d = 2.0 * w * d
        w = w * w + c
        if abs(w) > OVERFLOW_GUARD:
            return w, d, True
    return w, d, False


@njit(cache=True)
def newton_ratio(z, c, n):
    """P(z) / P'(z) for P(z) = f^n(z) - z, safe against overflow.

    Once the orbit gets large the iterate and its derivative are tracked
    through their reciprocals and their quotient, which stay representable.
    """
    w = z
    d = 1.0 + 0.0j
    for k in range(n):
        d = 2.0 * w * d
        w = w * w + c
        if abs(w) > _SCALE_SWITCH:
            if d == 0:
                return z - w
            iw = 1.0 / w
            inv_d = 1.0 / d
            q = w * inv_d
            for _ in range(k + 1, n):
                t = c * iw * iw
                q = 0.5 * q * (1.0 + t)
                inv_d = 0.5 * inv_d * iw
                iw = iw * iw / (1.0 + t)
            return q * (1.0 - z * iw) / (1.0 - inv_d)
    den = d - 1.0
    if den == 0:
        return np.inf + 0.0j
    return (w - z) / den


@njit(cache=True)
def _residual(z, c, n):
    w, _, escaped = iterate(z, c, n)
    if escaped:
        return np.inf
    return abs(w - z)


@njit(cache=True)
def polish(z, c, n, tol, max_iters, max_halvings):
    """Damped Newton on f^n(z) - z. Returns (z, last_step, converged)."""
    res = _residual(z, c, n)
    step = np.inf
    for _ in range(max_iters):
        r = newton_ratio(z, c, n)
        if not np.isfinite(r.real) or not np.isfinite(r.imag):
            return z, np.inf, False
        trial = z - r
        trial_res = _residual(trial, c, n)
        halvings = 0
        while trial_res >= res and np.isfinite(res) and halvings < max_halvings:
            r = 0.5 * r
            trial = z - r
            trial_res = _residual(trial, c, n)
            halvings += 1
        z = trial
        res = trial_res
        step = abs(r)
        scale = max(1.0, abs(z))
        if step <= tol * scale or step <= 4.0 * _EPS * scale:
            return z, step, True
    return z, step, False


@njit(cache=True)
def polish_many(zs, c, n, tol, max_iters, max_halvings):
    m = zs.shape[0]
    out = np.empty(m, dtype=np.complex128)
    steps = np.empty(m, dtype=np.float64)
    ok = np.zeros(m, dtype=np.bool_)
    for i in range(m):
        out[i], steps[i], ok[i] = polish(zs[i], c, n, tol, max_iters, max_halvings)
    return out, steps, ok


@njit(cache=True)
def reject_multiple(zs, ok, c, n, eps_parab):
    """Clear ok[i] where (f^n)'(z) is within eps_parab of 1 (multiple root)."""
    for i in range(zs.shape[0]):
        if ok[i]:
            _, d, escaped = iterate(zs[i], c, n)
            if escaped or abs(d - 1.0) <= eps_parab:
                ok[i] = False
    return ok


@njit(cache=True)
def _csqrt(z):
    # principal branch, cut along the negative real axis
    x = z.real
    y = z.imag
    r = np.hypot(x, y)
    if r == 0.0:
        return 0.0j
    t = np.sqrt(0.5 * (r + abs(x)))
    if x >= 0.0:
        return complex(t, y / (2.0 * t))
    return complex(abs(y) / (2.0 * t), t if y >= 0.0 else -t)


@njit(cache=True)
def itinerary_seeds(c, n, cycles, start):
    """Approximate periodic points by running inverse branches backwards.

    Word w picks the sign of the square root at each of the n steps; repeated
    passes contract onto the repelling orbit with that itinerary.
    """
    m = 1 << n
    out = np.empty(m, dtype=np.complex128)
    for word in range(m):
        z = start
        for _ in range(cycles):
            for k in range(n - 1, -1, -1):
                z = _csqrt(z - c)
                if (word >> k) & 1:
                    z = -z
        out[word] = z
    return out


@njit(cache=True)
def continue_seeds(seeds, c_old, c_new, n, cycles):
    """Carry periodic points at c_old to c_new along their own orbits.

    Each backward step picks the square-root sign nearest the old orbit
    point, so a seed follows its own orbit rather than a neighbour's.
    """
    m = seeds.shape[0]
    out = np.empty(m, dtype=np.complex128)
    guide = np.empty(n, dtype=np.complex128)
    for i in range(m):
        p = seeds[i]
        for k in range(n):
            guide[k] = p
            p = p * p + c_old
        w = seeds[i]
        for _ in range(cycles):
            for k in range(n - 1, -1, -1):
                s = _csqrt(w - c_new)
                if abs(s - guide[k]) <= abs(s + guide[k]):
                    w = s
                else:
                    w = -s
        out[i] = w
    return out


@njit(cache=True)
def deflated_aberth(z0, known, c, n, tol, max_iters):
    """Aberth-Ehrlich iteration for the roots of P not already in `known`.

    P(z) = f^n(z) - z; the known roots are divided out implicitly through the
    logarithmic derivative, so only len(z0) approximations are updated.
    """
    z = z0.copy()
    m = z.shape[0]
    nk = known.shape[0]
    done = np.zeros(m, dtype=np.bool_)
    for _ in range(max_iters):
        active = 0
        for i in range(m):
            if done[i]:
                continue
            active += 1
            r = newton_ratio(z[i], c, n)
            if not np.isfinite(r.real) or not np.isfinite(r.imag):
                # on a critical point of P; nudge off it
                z[i] = z[i] * (1.0 + 1e-7) + 1e-7j
                continue
            s = 0.0j
            for j in range(nk):
                s += 1.0 / (z[i] - known[j])
            for j in range(m):
                if j != i:
                    dz = z[i] - z[j]
                    if dz == 0:
                        dz = 1e-300 + 0.0j
                    s += 1.0 / dz
            den = 1.0 - r * s
            if den == 0:
                den = 1e-300 + 0.0j
            corr = r / den
            z[i] -= corr
            scale = max(1.0, abs(z[i]))
            if abs(corr) <= tol * scale or abs(corr) <= 4.0 * _EPS * scale:
                done[i] = True
        if active == 0:
            break
    return z, done


@njit(cache=True)
def first_unique(points, ok, tol):
    """Mask of accepted points that have no earlier accepted point within
    tol * max(1, |z|). Sort-and-sweep on the real part."""
    m = points.shape[0]
    keep = ok.copy()
    order = np.argsort(points.real)
    for a in range(m):
        i = order[a]
        if not ok[i]:
            continue
        zi = points[i]
        thr = tol * max(1.0, abs(zi))
        b = a + 1
        while b < m:
            j = order[b]
            zj = points[j]
            if zj.real - zi.real > thr:
                break
            if ok[j] and abs(zj - zi) <= thr:
                # later index loses
                if j > i:
                    keep[j] = False
                else:
                    keep[i] = False
            b += 1
    return keep


@njit(cache=True)
def escape_time(c, max_iters, radius):
    """Iterate z -> z^2 + c from 0. Returns (escape iteration or -1, |z|)."""
    z = 0.0j
    r2 = radius * radius
    for i in range(1, max_iters + 1):
        z = z * z + c
        m2 = z.real * z.real + z.imag * z.imag
        if m2 > r2:
            return i, np.sqrt(m2)
    return -1, abs(z)


@njit(cache=True)
def escape_grid(cs, max_iters, radius):
    out = np.empty(cs.shape[0], dtype=np.int64)
    for i in range(cs.shape[0]):
        out[i], _ = escape_time(cs[i], max_iters, radius)
    return out


@njit(cache=True)
def critical_orbit(c, k):
    """F_k(c) = f_c^(k-1)(c) and its c-derivative. Returns (w, u, escaped)."""
    w = c
    u = 1.0 + 0.0j
    for _ in range(k - 1):
        u = 2.0 * w * u + 1.0
        w = w * w + c
        if abs(w) > OVERFLOW_GUARD:
            return w, u, True
    return w, u, False


@njit(cache=True)
def _lex_greater(a, b):
    return a.real > b.real or (a.real == b.real and a.imag > b.imag)


@njit(cache=True)
def trace_cycles(pts, nxt, n):
    """Cycles of the successor map ``nxt`` (-1 = unmatched).

    Returns (cycles (k, n), lower-period mask, inconsistent count). Each cycle
    starts at its largest point in (real, imag) order and cycles are sorted
    the same way.
    """
    m = pts.shape[0]
    seen = np.zeros(m, dtype=np.bool_)
    lower = np.zeros(m, dtype=np.bool_)
    path = np.empty(n + 1, dtype=np.int64)
    raw = np.empty((m // n + 1, n), dtype=np.complex128)
    k = 0
    bad = 0
    for start in range(m):
        if seen[start]:
            continue
        L = 0
        path[L] = start
        L += 1
        seen[start] = True
        j = nxt[start]
        while j >= 0 and j != start and not seen[j] and L <= n:
            path[L] = j
            L += 1
            seen[j] = True
            j = nxt[j]
        if j != start:
            bad += L
            continue
        if L == n:
            r = 0
            for t in range(1, n):
                if _lex_greater(pts[path[t]], pts[path[r]]):
                    r = t
            for t in range(n):
                raw[k, t] = pts[path[(r + t) % n]]
            k += 1
        elif n % L == 0:
            for t in range(L):
                lower[path[t]] = True
        else:
            bad += L
    # insertion sort on first points; k is small
    order = np.arange(k)
    for i in range(1, k):
        v = order[i]
        j = i - 1
        while j >= 0 and _lex_greater(raw[order[j], 0], raw[v, 0]):
            order[j + 1] = order[j]
            j -= 1
        order[j + 1] = v
    out = np.empty((k, n), dtype=np.complex128)
    for i in range(k):
        out[i] = raw[order[i]]
    return out, lower, bad


@njit(cache=True, error_model="numpy")
def cycle_point_derivatives(cycles):
    """z_i'(c) at every rotation of every cycle, from the closed cyclic form."""
    k, n = cycles.shape
    out = np.empty((k, n), dtype=np.complex128)
    for j in range(k):
        rho = 1.0 + 0j
        for t in range(n):
            rho *= 2.0 * cycles[j, t]
        den = 1.0 - rho
        for i in range(n):
            acc = 0j
            p = 1.0 + 0j
            for t in range(n - 1, 0, -1):
                p *= 2.0 * cycles[j, (i + t) % n]
                acc += p
            out[j, i] = (1.0 + acc) / den
    return out


@njit(cache=True, error_model="numpy")
def cycle_multipliers(cycles):
    """rho and rho'(c) per cycle; rho' = sum_i 2 z_i' prod_{t != i} 2 z_t."""
    k, n = cycles.shape
    zp = cycle_point_derivatives(cycles)
    rho = np.empty(k, dtype=np.complex128)
    rp = np.empty(k, dtype=np.complex128)
    for j in range(k):
        r = 1.0 + 0j
        for t in range(n):
            r *= 2.0 * cycles[j, t]
        s = 0j
        for i in range(n):
            p = 1.0 + 0j
            for t in range(n):
                if t != i:
                    p *= 2.0 * cycles[j, t]
            s += 2.0 * zp[j, i] * p
        rho[j] = r
        rp[j] = s
    return rho, rp


@njit(cache=True)
def nearest_two(pts, queries):
    """Index of, and distances to, the nearest and second-nearest point."""
    m = pts.shape[0]
    order = np.argsort(pts.real)
    xs = pts.real[order]
    q = queries.shape[0]
    idx = np.empty(q, dtype=np.int64)
    d1 = np.empty(q)
    d2 = np.empty(q)
    for i in range(q):
        w = queries[i]
        b1 = np.inf
        b2 = np.inf
        j1 = -1
        start = np.searchsorted(xs, w.real)
        lo = start - 1
        hi = start
        while lo >= 0 or hi < m:
            gl = w.real - xs[lo] if lo >= 0 else np.inf
            gh = xs[hi] - w.real if hi < m else np.inf
            if gl <= gh:
                if gl > b2:
                    break
                j = order[lo]
                lo -= 1
            else:
                if gh > b2:
                    break
                j = order[hi]
                hi += 1
            d = abs(pts[j] - w)
            if d < b1:
                b2 = b1
                b1 = d
                j1 = j
            elif d < b2:
                b2 = d
        idx[i] = j1
        d1[i] = b1
        d2[i] = b2
    return idx, d1, d2
