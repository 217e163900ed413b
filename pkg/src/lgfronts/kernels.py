"""Time-stepping kernels: one step = implicit diffusion for both fields,
explicit advection and reaction, Heun update of the two fronts.

Two interchangeable implementations are provided:

* a scalar-loop version compiled with numba (default when numba imports),
* a vectorized numpy/scipy version used as a fallback.

Selection happens at import time; setting the environment variable
``LGFRONTS_DISABLE_NUMBA=1`` forces the numpy path.  Both are exposed
unconditionally (``advance_chunk_numba`` may be None) so benchmarks and
cross-checks can call them side by side.

The kernels advance ``n_steps`` steps in one call so the Python-level
overhead is paid per record interval, not per step.  All state lives in
plain float64 arrays:

    scal = [g, h, t, max_z]
    acc  = [floor_hits, wrong_sign_steps, max_u_excess, max_v_excess,
            min_u_core, reaction_mass]

``acc[5]`` accumulates dt * integral of the predator reaction in
physical measure; the caller reads and resets it per record interval to
form the soft discrete Stefan balance.  Scheme outline per step, with
uppercase names matching the status codes returned:

    1. one-sided boundary gradients of z, Stefan speeds, guards
       (NONMONOTONE beyond stencil tolerance, CFL on the advection)
    2. Heun predictor/corrector for (g, h); TRUNCATION guard
    3. z: backward-Euler diffusion (tridiagonal, Dirichlet), explicit
       advection with the effective mesh speeds, explicit reaction with
       u linearly interpolated onto the moving nodes
    4. u: backward-Euler diffusion (prefactored tridiagonal, Neumann),
       explicit reaction with v interpolated back from z; v = 0 outside
       the fronts
    5. positivity and sup-bound checks on both fields (BLOWUP beyond
       tolerance, tiny negatives clamped to zero)
"""

from __future__ import annotations

import os

import numpy as np

# status codes shared by both implementations
STATUS_OK = 0
STATUS_TRUNCATION = 1
STATUS_CFL = 2
STATUS_BLOWUP = 3
STATUS_NONMONOTONE = 4
STATUS_DEGENERATE = 5

#: relative slack allowed above the a priori sup bounds A and B
TOL_BOUND = 1e-6
#: absolute negative excursion treated as roundoff and clamped, relative
#: to the field's sup bound
TOL_NEGATIVE = 1e-12

JIT_OPTIONS = {"cache": True, "nogil": True}


def _numba_disabled_by_env() -> bool:
    flag = os.environ.get("LGFRONTS_DISABLE_NUMBA", "")
    return flag.strip().lower() in {"1", "true", "yes", "on"}


def _advance_chunk_loop(u, z, scal, acc, plo, pdi, pup,
                        n_steps, dt, dx, dy, L,
                        a, b, d, mu, beta, m_sat,
                        u_floor, A_bound, B_bound,
                        cfl_safety, front_margin, c_stencil,
                        iw_lo, iw_hi):
    """Scalar-loop chunk advance; see module docstring for the scheme.

    m_sat < 0 selects the leslie-gower prey reaction, m_sat >= 0 the
    holling-tanner one with saturation constant m_sat.  Returns
    (status, steps_done); on a non-OK status the state reflects the
    last completed step except BLOWUP, which aborts mid-step.
    """
    nx = u.shape[0] - 1
    ny = z.shape[0] - 1

    # prefactor the constant prey system (I - dt D2) once per chunk
    cpu = np.empty(nx + 1)
    dinv = np.empty(nx + 1)
    dinv[0] = 1.0 / pdi[0]
    cpu[0] = pup[0] * dinv[0]
    for i in range(1, nx + 1):
        den = pdi[i] - plo[i] * cpu[i - 1]
        dinv[i] = 1.0 / den
        cpu[i] = pup[i] * dinv[i]

    rhs_u = np.empty(nx + 1)
    rhs_z = np.empty(ny + 1)
    cpz = np.empty(ny + 1)

    g = scal[0]
    h = scal[1]
    t = scal[2]
    maxz = scal[3]
    negz = TOL_NEGATIVE * max(B_bound, 1.0)
    negu = TOL_NEGATIVE * max(A_bound, 1.0)
    inv2dy = 0.5 / dy
    status = STATUS_OK
    steps = 0

    for _ in range(n_steps):
        span = h - g
        if span <= 0.0:
            status = STATUS_DEGENERATE
            break

        # 1. boundary gradients, Stefan speeds, guards
        zym = (-3.0 * z[0] + 4.0 * z[1] - z[2]) * inv2dy
        zyp = (3.0 * z[ny] - 4.0 * z[ny - 1] + z[ny - 2]) * inv2dy
        fac = -2.0 * beta / span
        gd1 = fac * zym
        hd1 = fac * zyp
        eps_st = c_stencil * dy * dy * maxz * 2.0 * beta / span
        if gd1 > eps_st or hd1 < -eps_st:
            status = STATUS_NONMONOTONE
            break
        if gd1 > 0.0 or hd1 < 0.0:
            acc[1] += 1.0
        zeta_max = 2.0 * max(abs(gd1), abs(hd1)) / span
        if dt * zeta_max > cfl_safety * dy:
            status = STATUS_CFL
            break

        # 2. Heun for the fronts: same gradients, corrector geometry
        gp = g + dt * gd1
        hp = h + dt * hd1
        fac2 = -2.0 * beta / (hp - gp)
        gn = g + 0.5 * dt * (gd1 + fac2 * zym)
        hn = h + 0.5 * dt * (hd1 + fac2 * zyp)
        if gn < -L + front_margin or hn > L - front_margin:
            status = STATUS_TRUNCATION
            break
        spann = hn - gn
        gde = (gn - g) / dt
        hde = (hn - h) / dt

        # 3. predator field on the reference interval
        rho = 4.0 / (spann * spann)
        zc0 = (hde + gde) / spann
        zc1 = (hde - gde) / spann
        cz = dt * d * rho / (dy * dy)
        reac_int = 0.0
        for j in range(1, ny):
            y = -1.0 + j * dy
            x = 0.5 * (spann * y + gn + hn)
            q = (x + L) / dx
            i0 = int(q)
            if i0 > nx - 1:
                i0 = nx - 1
            if i0 < 0:
                i0 = 0
            fr = q - i0
            uv = u[i0] * (1.0 - fr) + u[i0 + 1] * fr
            if uv < u_floor:
                uv = u_floor
                acc[0] += 1.0
            zj = z[j]
            reac = mu * zj * (1.0 - zj / uv)
            adv = (zc0 + zc1 * y) * (z[j + 1] - z[j - 1]) * inv2dy
            rhs_z[j] = zj + dt * (adv + reac)
            reac_int += reac
        acc[5] += dt * reac_int * dy * 0.5 * spann

        dg = 1.0 + 2.0 * cz
        off = -cz
        cpz[1] = off / dg
        rhs_z[1] = rhs_z[1] / dg
        for j in range(2, ny):
            den = dg - off * cpz[j - 1]
            cpz[j] = off / den
            rhs_z[j] = (rhs_z[j] - off * rhs_z[j - 1]) / den
        z[ny - 1] = rhs_z[ny - 1]
        for j in range(ny - 2, 0, -1):
            z[j] = rhs_z[j] - cpz[j] * z[j + 1]
        z[0] = 0.0
        z[ny] = 0.0

        mz = 0.0
        bad = False
        for j in range(1, ny):
            w = z[j]
            if w < 0.0:
                if w < -negz:
                    bad = True
                    break
                z[j] = 0.0
                w = 0.0
            if w > mz:
                mz = w
        if bad or mz > B_bound * (1.0 + TOL_BOUND):
            status = STATUS_BLOWUP
            break
        excv = mz / B_bound - 1.0
        if excv > acc[3]:
            acc[3] = excv
        maxz = mz

        # 4. prey field on the fixed physical grid
        for i in range(nx + 1):
            x = -L + i * dx
            vv = 0.0
            if x > gn and x < hn:
                yq = (2.0 * x - gn - hn) / spann
                q = (yq + 1.0) / dy
                j0 = int(q)
                if j0 > ny - 1:
                    j0 = ny - 1
                if j0 < 0:
                    j0 = 0
                fr = q - j0
                vv = z[j0] * (1.0 - fr) + z[j0 + 1] * fr
            ui = u[i]
            if m_sat >= 0.0:
                fu = ui * (a - ui) - b * ui * vv / (m_sat + ui)
            else:
                fu = ui * (a - ui) - b * ui * vv
            rhs_u[i] = ui + dt * fu

        rhs_u[0] = rhs_u[0] * dinv[0]
        for i in range(1, nx + 1):
            rhs_u[i] = (rhs_u[i] - plo[i] * rhs_u[i - 1]) * dinv[i]
        u[nx] = rhs_u[nx]
        for i in range(nx - 1, -1, -1):
            u[i] = rhs_u[i] - cpu[i] * u[i + 1]

        mu_max = 0.0
        bad = False
        for i in range(nx + 1):
            w = u[i]
            if w < 0.0:
                if w < -negu:
                    bad = True
                    break
                u[i] = 0.0
                w = 0.0
            if w > mu_max:
                mu_max = w
        if bad or mu_max > A_bound * (1.0 + TOL_BOUND):
            status = STATUS_BLOWUP
            break
        excu = mu_max / A_bound - 1.0
        if excu > acc[2]:
            acc[2] = excu

        mincore = u[iw_lo]
        for i in range(iw_lo + 1, iw_hi + 1):
            if u[i] < mincore:
                mincore = u[i]
        if mincore < acc[4]:
            acc[4] = mincore

        # 5. commit
        g = gn
        h = hn
        t += dt
        steps += 1

    scal[0] = g
    scal[1] = h
    scal[2] = t
    scal[3] = maxz
    return status, steps


def advance_chunk_numpy(u, z, scal, acc, plo, pdi, pup,
                        n_steps, dt, dx, dy, L,
                        a, b, d, mu, beta, m_sat,
                        u_floor, A_bound, B_bound,
                        cfl_safety, front_margin, c_stencil,
                        iw_lo, iw_hi):
    """Vectorized fallback with the same contract as the loop kernel.

    Tridiagonal systems go through scipy's banded LAPACK driver; both
    matrices are strictly diagonally dominant so no pivoting happens
    and results track the Thomas solves to roundoff.
    """
    from scipy.linalg import solve_banded

    nx = u.shape[0] - 1
    ny = z.shape[0] - 1
    xg = -L + dx * np.arange(nx + 1)
    yg = -1.0 + dy * np.arange(ny + 1)
    y_int = yg[1:-1]

    ab_u = np.zeros((3, nx + 1))
    ab_u[0, 1:] = pup[:-1]
    ab_u[1, :] = pdi
    ab_u[2, :-1] = plo[1:]

    g = float(scal[0])
    h = float(scal[1])
    t = float(scal[2])
    maxz = float(scal[3])
    negz = TOL_NEGATIVE * max(B_bound, 1.0)
    negu = TOL_NEGATIVE * max(A_bound, 1.0)
    inv2dy = 0.5 / dy
    status = STATUS_OK
    steps = 0

    for _ in range(int(n_steps)):
        span = h - g
        if span <= 0.0:
            status = STATUS_DEGENERATE
            break

        zym = (-3.0 * z[0] + 4.0 * z[1] - z[2]) * inv2dy
        zyp = (3.0 * z[ny] - 4.0 * z[ny - 1] + z[ny - 2]) * inv2dy
        fac = -2.0 * beta / span
        gd1 = fac * zym
        hd1 = fac * zyp
        eps_st = c_stencil * dy * dy * maxz * 2.0 * beta / span
        if gd1 > eps_st or hd1 < -eps_st:
            status = STATUS_NONMONOTONE
            break
        if gd1 > 0.0 or hd1 < 0.0:
            acc[1] += 1.0
        zeta_max = 2.0 * max(abs(gd1), abs(hd1)) / span
        if dt * zeta_max > cfl_safety * dy:
            status = STATUS_CFL
            break

        gp = g + dt * gd1
        hp = h + dt * hd1
        fac2 = -2.0 * beta / (hp - gp)
        gn = g + 0.5 * dt * (gd1 + fac2 * zym)
        hn = h + 0.5 * dt * (hd1 + fac2 * zyp)
        if gn < -L + front_margin or hn > L - front_margin:
            status = STATUS_TRUNCATION
            break
        spann = hn - gn
        gde = (gn - g) / dt
        hde = (hn - h) / dt

        rho = 4.0 / (spann * spann)
        zc0 = (hde + gde) / spann
        zc1 = (hde - gde) / spann
        cz = dt * d * rho / (dy * dy)

        x_int = 0.5 * (spann * y_int + gn + hn)
        uv = np.interp(x_int, xg, u)
        acc[0] += float(np.count_nonzero(uv < u_floor))
        uv = np.maximum(uv, u_floor)
        z_int = z[1:-1]
        reac = mu * z_int * (1.0 - z_int / uv)
        adv = (zc0 + zc1 * y_int) * (z[2:] - z[:-2]) * inv2dy
        rhs = z_int + dt * (adv + reac)
        acc[5] += dt * float(reac.sum()) * dy * 0.5 * spann

        ab_z = np.zeros((3, ny - 1))
        ab_z[0, 1:] = -cz
        ab_z[1, :] = 1.0 + 2.0 * cz
        ab_z[2, :-1] = -cz
        z[1:-1] = solve_banded((1, 1), ab_z, rhs,
                               overwrite_ab=True, overwrite_b=True,
                               check_finite=False)
        z[0] = 0.0
        z[ny] = 0.0

        zmin = float(z.min())
        if zmin < 0.0:
            if zmin < -negz:
                status = STATUS_BLOWUP
                break
            np.maximum(z, 0.0, out=z)
        mz = float(z.max())
        if mz > B_bound * (1.0 + TOL_BOUND):
            status = STATUS_BLOWUP
            break
        acc[3] = max(acc[3], mz / B_bound - 1.0)
        maxz = mz

        inside = (xg > gn) & (xg < hn)
        vv = np.zeros(nx + 1)
        yq = (2.0 * xg[inside] - gn - hn) / spann
        vv[inside] = np.interp(yq, yg, z)
        if m_sat >= 0.0:
            fu = u * (a - u) - b * u * vv / (m_sat + u)
        else:
            fu = u * (a - u) - b * u * vv
        rhs_u = u + dt * fu
        u[:] = solve_banded((1, 1), ab_u, rhs_u,
                            overwrite_b=True, check_finite=False)

        umin = float(u.min())
        if umin < 0.0:
            if umin < -negu:
                status = STATUS_BLOWUP
                break
            np.maximum(u, 0.0, out=u)
        mu_max = float(u.max())
        if mu_max > A_bound * (1.0 + TOL_BOUND):
            status = STATUS_BLOWUP
            break
        acc[2] = max(acc[2], mu_max / A_bound - 1.0)
        acc[4] = min(acc[4], float(u[iw_lo:iw_hi + 1].min()))

        g = gn
        h = hn
        t += dt
        steps += 1

    scal[0] = g
    scal[1] = h
    scal[2] = t
    scal[3] = maxz
    return status, steps


advance_chunk_numba = None
if not _numba_disabled_by_env():
    try:
        from numba import njit
    except ImportError:
        njit = None
    if njit is not None:
        advance_chunk_numba = njit(**JIT_OPTIONS)(_advance_chunk_loop)

if advance_chunk_numba is not None:
    BACKEND = "numba"
    advance_chunk = advance_chunk_numba
else:
    BACKEND = "numpy"
    advance_chunk = advance_chunk_numpy


def prey_bands(nx: int, cx: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Tridiagonal bands of the prey system (I - dt D2) with mirrored
    (homogeneous Neumann) endpoint rows; cx = dt / dx^2."""
    plo = np.full(nx + 1, -cx)
    pdi = np.full(nx + 1, 1.0 + 2.0 * cx)
    pup = np.full(nx + 1, -cx)
    plo[0] = 0.0
    pup[nx] = 0.0
    pup[0] = -2.0 * cx
    plo[nx] = -2.0 * cx
    return plo, pdi, pup
