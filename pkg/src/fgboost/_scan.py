"""Split-criterion scans over candidate thresholds.

For one feature, samples are pre-sorted by feature value; a candidate split
is a left-child size ``b`` and its score is the summed split criterion of
the two children.  Evaluating the criterion exactly requires, per candidate,
the child representative geodesics (decoupled means of starts / ends) and,
under the updated-prediction criterion, one transport of every member's
current prediction along the scaled representative, so a naive scan costs
O(candidates * n * point_dim) per feature.  The numba kernels below keep
that complexity but stream it at memory speed; flat backends (Euclidean,
Laplacian without projection effects, Wasserstein under the endpoint-pair
criterion) reduce to prefix-sum algebra instead.

``reference_scan`` re-derives every score through the public space
operations; it is the correctness oracle for the kernels and the fallback
for space types without a fast path.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# ---------------------------------------------------------------------------
# generic reference path (slow, built on the public contract)
# ---------------------------------------------------------------------------


def node_criterion(space, S, E, criterion, shrink):
    """Criterion value of one node holding residual geodesics (S[i] -> E[i]).

    updated-prediction-mse: sum of squared distances between the observed
    ends and each member's start transported along the node's representative
    geodesic scaled by ``shrink``.  residual-dg-mse: sum of squared
    endpoint-pair distances to the representative.
    """
    ms = space.mean_batch(S)
    me = space.mean_batch(E)
    if criterion == "residual-dg-mse":
        ds = space.dist2_batch(S, np.broadcast_to(ms, S.shape))
        de = space.dist2_batch(E, np.broadcast_to(me, E.shape))
        return float(ds.sum() + de.sum())
    scaled_end = space.interpolate(ms, me, shrink)
    moved = space.transport_batch(ms, scaled_end, S)
    return float(space.dist2_batch(E, moved).sum())


def reference_scan(space, S, E, bvals, criterion, shrink):
    """Candidate totals computed through the public operations."""
    out = np.empty(len(bvals))
    for idx, b in enumerate(bvals):
        left = node_criterion(space, S[:b], E[:b], criterion, shrink)
        right = node_criterion(space, S[b:], E[b:], criterion, shrink)
        out[idx] = left + right
    return out


# ---------------------------------------------------------------------------
# flat prefix-sum scans (squared distance = dist_scale * squared vector norm)
# ---------------------------------------------------------------------------


def flat_scan_updated(S, E, bvals, shrink, dist_scale=1.0):
    n = S.shape[0]
    R = E - S
    cum_r = np.cumsum(R, axis=0)
    cum_r2 = np.cumsum(np.einsum("ij,ij->i", R, R))
    tot_r = cum_r[-1]
    tot_r2 = cum_r2[-1]
    idx = np.asarray(bvals) - 1
    factor = shrink * (2.0 - shrink)
    left_sum = cum_r[idx]
    left_sq = np.einsum("ij,ij->i", left_sum, left_sum)
    right_sum = tot_r[None, :] - left_sum
    right_sq = np.einsum("ij,ij->i", right_sum, right_sum)
    nb = np.asarray(bvals, dtype=np.float64)
    left = cum_r2[idx] - factor * left_sq / nb
    right = (tot_r2 - cum_r2[idx]) - factor * right_sq / (n - nb)
    return dist_scale * (left + right)


def flat_scan_pairs(S, E, bvals, dist_scale=1.0):
    n = S.shape[0]
    cum_s = np.cumsum(S, axis=0)
    cum_e = np.cumsum(E, axis=0)
    cum_sq = np.cumsum(np.einsum("ij,ij->i", S, S) + np.einsum("ij,ij->i", E, E))
    idx = np.asarray(bvals) - 1
    nb = np.asarray(bvals, dtype=np.float64)

    def child(sum_s, sum_e, sumsq, count):
        mean_sq = (
            np.einsum("ij,ij->i", sum_s, sum_s) + np.einsum("ij,ij->i", sum_e, sum_e)
        ) / count
        return sumsq - mean_sq

    left = child(cum_s[idx], cum_e[idx], cum_sq[idx], nb)
    right = child(
        cum_s[-1][None, :] - cum_s[idx],
        cum_e[-1][None, :] - cum_e[idx],
        cum_sq[-1] - cum_sq[idx],
        n - nb,
    )
    return dist_scale * (left + right)


# ---------------------------------------------------------------------------
# Wasserstein updated-prediction kernel
# ---------------------------------------------------------------------------
#
# Pooled formulation: all start-grid values of the node are sorted once into
# Xp (with the paired end value Ep and the owner's position POSp in feature
# order).  For each candidate both children's transport maps are piecewise
# linear with knots at the child mean grids, so a single ascending pass
# advances two knot pointers monotonically and accumulates
# t * (t - 2e) per element under the owning child's map; adding the
# (candidate-independent) sum of e^2 afterwards yields the exact criterion.
# Exact knot hits follow the flat-run midpoint rule of pwl_evaluate.


@njit(cache=True)
def _pwl_tied(K, V, x, j, m):
    """Map value at an exact knot hit: midpoint-of-run rule."""
    k1 = j + 1
    if K[0] == x:
        k1 = 0
    k2 = k1
    while k2 < m - 1 and K[k2 + 1] == x:
        k2 += 1
    ss = k1 + k2
    jj = ss // 2
    if ss % 2 == 0:
        return V[jj]
    return 0.5 * (V[jj] + V[jj + 1])


@njit(cache=True)
def wasserstein_updated_kernel(
    Xp, Ep, POSp, cumS, cumE, bvals, shrink, clip_lo, clip_hi, out
):
    n, m = cumS.shape
    nm = Xp.shape[0]
    totS = cumS[n - 1]
    totE = cumE[n - 1]
    AL = np.empty(m)
    BL = np.empty(m)
    sL = np.empty(m - 1)
    AR = np.empty(m)
    BR = np.empty(m)
    sR = np.empty(m - 1)
    e2 = 0.0
    for q in range(nm):
        e2 += Ep[q] * Ep[q]
    for ci in range(bvals.shape[0]):
        b = bvals[ci]
        nr = n - b
        for k in range(m):
            a = cumS[b - 1, k] / b
            AL[k] = a
            BL[k] = a + shrink * (cumE[b - 1, k] / b - a)
            a = (totS[k] - cumS[b - 1, k]) / nr
            AR[k] = a
            BR[k] = a + shrink * ((totE[k] - cumE[b - 1, k]) / nr - a)
        for k in range(m - 1):
            da = AL[k + 1] - AL[k]
            sL[k] = (BL[k + 1] - BL[k]) / da if da > 0.0 else 0.0
            da = AR[k + 1] - AR[k]
            sR[k] = (BR[k + 1] - BR[k]) / da if da > 0.0 else 0.0
        jL = 0
        jR = 0
        acc = 0.0
        # Evaluate both children's maps for every element and blend with a
        # 0/1 weight: the membership pattern is unpredictable, so selecting
        # arithmetically beats branching on it.
        for q in range(nm):
            x = Xp[q]
            while jL < m - 2 and AL[jL + 1] < x:
                jL += 1
            while jR < m - 2 and AR[jR + 1] < x:
                jR += 1
            if x < AL[0]:
                tL = BL[0]
            elif x > AL[m - 1]:
                tL = BL[m - 1]
            elif AL[jL + 1] == x or AL[0] == x:
                tL = _pwl_tied(AL, BL, x, jL, m)
            else:
                tL = BL[jL] + (x - AL[jL]) * sL[jL]
            if x < AR[0]:
                tR = BR[0]
            elif x > AR[m - 1]:
                tR = BR[m - 1]
            elif AR[jR + 1] == x or AR[0] == x:
                tR = _pwl_tied(AR, BR, x, jR, m)
            else:
                tR = BR[jR] + (x - AR[jR]) * sR[jR]
            w = 1.0 if POSp[q] < b else 0.0
            t = w * tL + (1.0 - w) * tR
            if t < clip_lo:
                t = clip_lo
            elif t > clip_hi:
                t = clip_hi
            acc += t * (t - 2.0 * Ep[q])
        out[ci] = (acc + e2) / m


# ---------------------------------------------------------------------------
# Laplacian updated-prediction kernel (translation + cone projection)
# ---------------------------------------------------------------------------


@njit(cache=True)
def _laplacian_member(S, E, i, delta, l, wlo):
    acc = 0.0
    for r in range(l):
        rowsum = 0.0
        base = r * l
        for c in range(l):
            if c == r:
                continue
            t = S[i, base + c] + delta[base + c]
            if t > 0.0:
                t = 0.0
            elif t < wlo:
                t = wlo
            rowsum += t
            d = E[i, base + c] - t
            acc += d * d
        d = E[i, base + r] + rowsum
        acc += d * d
    return acc


@njit(cache=True)
def laplacian_updated_kernel(S, E, cumS, cumE, bvals, shrink, l, wlo, out):
    n, D = S.shape
    totS = cumS[n - 1]
    totE = cumE[n - 1]
    deltaL = np.empty(D)
    deltaR = np.empty(D)
    for ci in range(bvals.shape[0]):
        b = bvals[ci]
        nr = n - b
        for k in range(D):
            deltaL[k] = shrink * (cumE[b - 1, k] - cumS[b - 1, k]) / b
            deltaR[k] = shrink * ((totE[k] - cumE[b - 1, k]) - (totS[k] - cumS[b - 1, k])) / nr
        acc = 0.0
        for i in range(b):
            acc += _laplacian_member(S, E, i, deltaL, l, wlo)
        for i in range(b, n):
            acc += _laplacian_member(S, E, i, deltaR, l, wlo)
        out[ci] = acc


# ---------------------------------------------------------------------------
# sphere kernels (Karcher means per candidate, warm-started along the scan)
# ---------------------------------------------------------------------------


@njit(cache=True)
def _sph_angle(x, y, d):
    dot = 0.0
    for k in range(d):
        dot += x[k] * y[k]
    if dot >= 0.0:
        c = 0.0
        for k in range(d):
            dk = x[k] - y[k]
            c += dk * dk
        h = 0.5 * np.sqrt(c)
        if h > 1.0:
            h = 1.0
        return 2.0 * np.arcsin(h)
    c = 0.0
    for k in range(d):
        dk = x[k] + y[k]
        c += dk * dk
    h = 0.5 * np.sqrt(c)
    if h > 1.0:
        h = 1.0
    return np.pi - 2.0 * np.arcsin(h)


@njit(cache=True)
def _sph_karcher(P, i0, i1, x, tol, maxit, degtol):
    """In-place Karcher mean of rows P[i0:i1] starting from x. Returns 0 on
    convergence, 1 otherwise."""
    d = P.shape[1]
    grad = np.empty(d)
    count = i1 - i0
    for _ in range(maxit):
        for k in range(d):
            grad[k] = 0.0
        for i in range(i0, i1):
            dot = 0.0
            for k in range(d):
                dot += P[i, k] * x[k]
            theta = _sph_angle(x, P[i], d)
            rej2 = 0.0
            for k in range(d):
                rk = P[i, k] - dot * x[k]
                rej2 += rk * rk
            nrm = np.sqrt(rej2)
            if nrm > degtol:
                scale = theta / nrm
                for k in range(d):
                    grad[k] += scale * (P[i, k] - dot * x[k])
        g2 = 0.0
        for k in range(d):
            grad[k] /= count
            g2 += grad[k] * grad[k]
        gn = np.sqrt(g2)
        if gn < tol:
            return 0
        cg = np.cos(gn)
        sg = np.sin(gn)
        n2 = 0.0
        for k in range(d):
            x[k] = cg * x[k] + sg * grad[k] / gn
            n2 += x[k] * x[k]
        nx = np.sqrt(n2)
        for k in range(d):
            x[k] /= nx
    return 1


@njit(cache=True)
def _sph_extrinsic(cum, tot, b, left, x, degtol):
    d = x.shape[0]
    n2 = 0.0
    for k in range(d):
        v = cum[b - 1, k] if left else tot[k] - cum[b - 1, k]
        x[k] = v
        n2 += v * v
    nrm = np.sqrt(n2)
    if nrm > degtol:
        for k in range(d):
            x[k] /= nrm
    else:
        x[0] = 1.0
        for k in range(1, d):
            x[k] = 0.0


@njit(cache=True)
def _sph_transport_crit(S, E, i0, i1, start, end, d, degtol):
    """Sum over rows of squared angle between E[i] and the transport of S[i]
    along the geodesic start -> end."""
    dot_se = 0.0
    for k in range(d):
        dot_se += start[k] * end[k]
    theta = _sph_angle(start, end, d)
    vse = np.empty(d)
    for k in range(d):
        vse[k] = end[k] - dot_se * start[k]
    moved = np.empty(d)
    acc = 0.0
    ct = np.cos(theta)
    st = np.sin(theta)
    for i in range(i0, i1):
        if theta < degtol:
            for k in range(d):
                moved[k] = S[i, k]
        else:
            dv = 0.0
            for k in range(d):
                dv += S[i, k] * vse[k]
            v2 = 0.0
            for k in range(d):
                vk = vse[k] - dv * S[i, k]
                moved[k] = vk
                v2 += vk * vk
            nv = np.sqrt(v2)
            if nv < degtol:
                for k in range(d):
                    moved[k] = S[i, k]
            else:
                n2 = 0.0
                for k in range(d):
                    moved[k] = ct * S[i, k] + st * moved[k] / nv
                    n2 += moved[k] * moved[k]
                nm = np.sqrt(n2)
                for k in range(d):
                    moved[k] /= nm
        ang = _sph_angle(moved, E[i], d)
        acc += ang * ang
    return acc


@njit(cache=True)
def sphere_scan_kernel(
    S, E, cumS, cumE, bvals, shrink, pairs_mode, tol, maxit, degtol, out
):
    """Scan for both sphere criteria. Returns 1 if any Karcher mean failed."""
    n, d = S.shape
    totS = cumS[n - 1]
    totE = cumE[n - 1]
    xLs = np.empty(d)
    xLe = np.empty(d)
    xRs = np.empty(d)
    xRe = np.empty(d)
    scaled = np.empty(d)
    fail = 0
    for ci in range(bvals.shape[0]):
        b = bvals[ci]
        if ci == 0:
            _sph_extrinsic(cumS, totS, b, True, xLs, degtol)
            _sph_extrinsic(cumE, totE, b, True, xLe, degtol)
            _sph_extrinsic(cumS, totS, b, False, xRs, degtol)
            _sph_extrinsic(cumE, totE, b, False, xRe, degtol)
        fail |= _sph_karcher(S, 0, b, xLs, tol, maxit, degtol)
        fail |= _sph_karcher(E, 0, b, xLe, tol, maxit, degtol)
        fail |= _sph_karcher(S, b, n, xRs, tol, maxit, degtol)
        fail |= _sph_karcher(E, b, n, xRe, tol, maxit, degtol)
        if pairs_mode:
            acc = 0.0
            for i in range(b):
                a1 = _sph_angle(S[i], xLs, d)
                a2 = _sph_angle(E[i], xLe, d)
                acc += a1 * a1 + a2 * a2
            for i in range(b, n):
                a1 = _sph_angle(S[i], xRs, d)
                a2 = _sph_angle(E[i], xRe, d)
                acc += a1 * a1 + a2 * a2
            out[ci] = acc
        else:
            acc = _slerp_crit(S, E, 0, b, xLs, xLe, shrink, scaled, d, degtol)
            acc += _slerp_crit(S, E, b, n, xRs, xRe, shrink, scaled, d, degtol)
            out[ci] = acc
    return fail


@njit(cache=True)
def _slerp_crit(S, E, i0, i1, ms, me, shrink, scaled, d, degtol):
    if shrink == 1.0:
        return _sph_transport_crit(S, E, i0, i1, ms, me, d, degtol)
    theta = _sph_angle(ms, me, d)
    if shrink == 0.0 or theta < degtol:
        for k in range(d):
            scaled[k] = ms[k]
    else:
        dot = 0.0
        for k in range(d):
            dot += ms[k] * me[k]
        r2 = 0.0
        for k in range(d):
            rk = me[k] - dot * ms[k]
            scaled[k] = rk
            r2 += rk * rk
        nr = np.sqrt(r2)
        ca = np.cos(shrink * theta)
        sa = np.sin(shrink * theta)
        n2 = 0.0
        for k in range(d):
            scaled[k] = ca * ms[k] + sa * scaled[k] / nr
            n2 += scaled[k] * scaled[k]
        nn = np.sqrt(n2)
        for k in range(d):
            scaled[k] /= nn
    return _sph_transport_crit(S, E, i0, i1, ms, scaled, d, degtol)
