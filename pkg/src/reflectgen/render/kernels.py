"""Numba-compiled ray kernels shared by both renderers.

All loops are parallel over pixels with per-pixel outputs only, so the
result is bit-identical regardless of thread count or schedule. The
path tracer draws its random numbers from counter-based splitmix64
streams keyed by (frame seed, pixel index, sample index), which makes
every sample reproducible in isolation.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit, prange

U64 = np.uint64
_GAMMA = U64(0x9E3779B97F4A7C15)
_M1 = U64(0xBF58476D1CE4E5B9)
_M2 = U64(0x94D049BB133111EB)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53

EPS_RAY = 1e-4
AMBIENT = 0.05  # constant ambient factor of the local renderer


@njit(cache=True)
def _mix_out(state):
    z = state
    z = (z ^ (z >> U64(30))) * _M1
    z = (z ^ (z >> U64(27))) * _M2
    return z ^ (z >> U64(31))


@njit(cache=True)
def seed_stream(a, b, c):
    """splitmix64 stream state for the ordered triple (a, b, c)."""
    state = U64(0)
    for v in (U64(a), U64(b), U64(c)):
        state = state ^ v
        state = state + _GAMMA
        state = state ^ _mix_out(state)
    return state


@njit(cache=True)
def next_rand(state):
    """Advance the stream; returns (new_state, uniform float64 in [0,1))."""
    state = state + _GAMMA
    out = _mix_out(state)
    return state, (out >> U64(11)) * _INV53


# ---------------------------------------------------------------------------
# BVH traversal

@njit(cache=True, fastmath=True, error_model="numpy")
def _slab_entry(node, ox, oy, oz, inv_x, inv_y, inv_z, node_lo, node_hi, t_cap):
    """Ray entry distance into a node's box, or 1e30 when missed."""
    t0 = (node_lo[node, 0] - ox) * inv_x
    t1 = (node_hi[node, 0] - ox) * inv_x
    tmin = min(t0, t1)
    tmax = max(t0, t1)
    t0 = (node_lo[node, 1] - oy) * inv_y
    t1 = (node_hi[node, 1] - oy) * inv_y
    tmin = max(tmin, min(t0, t1))
    tmax = min(tmax, max(t0, t1))
    t0 = (node_lo[node, 2] - oz) * inv_z
    t1 = (node_hi[node, 2] - oz) * inv_z
    tmin = max(tmin, min(t0, t1))
    tmax = min(tmax, max(t0, t1))
    if tmax < max(tmin, 0.0) or tmin > t_cap:
        return 1e30
    return max(tmin, 0.0)


@njit(cache=True, fastmath=True, error_model="numpy")
def _closest_hit(ox, oy, oz, dx, dy, dz,
                 node_lo, node_hi, node_left, node_right, node_count,
                 v0, e1, e2, stack, tstack):
    """Nearest triangle along the ray; returns (t, tri_index, u, v)."""
    best_t = 1e30
    best_tri = -1
    best_u = 0.0
    best_v = 0.0
    if node_lo.shape[0] == 0:
        return best_t, best_tri, best_u, best_v
    inv_x = 1.0 / dx if dx != 0.0 else 1e30
    inv_y = 1.0 / dy if dy != 0.0 else 1e30
    inv_z = 1.0 / dz if dz != 0.0 else 1e30
    stack[0] = 0
    tstack[0] = 0.0
    sp = 1
    while sp > 0:
        sp -= 1
        if tstack[sp] >= best_t:
            continue
        node = stack[sp]
        count = node_count[node]
        if count == 0:
            # descend into the nearer child first, skip missed subtrees
            left = node_left[node]
            right = node_right[node]
            t_left = _slab_entry(left, ox, oy, oz, inv_x, inv_y, inv_z,
                                 node_lo, node_hi, best_t)
            t_right = _slab_entry(right, ox, oy, oz, inv_x, inv_y, inv_z,
                                  node_lo, node_hi, best_t)
            if t_left > t_right:
                left, right = right, left
                t_left, t_right = t_right, t_left
            if t_right < 1e30:
                stack[sp] = right
                tstack[sp] = t_right
                sp += 1
            if t_left < 1e30:
                stack[sp] = left
                tstack[sp] = t_left
                sp += 1
            continue
        start = node_left[node]
        for i in range(start, start + count):
            # Moeller-Trumbore, two-sided
            e1x = e1[i, 0]; e1y = e1[i, 1]; e1z = e1[i, 2]
            e2x = e2[i, 0]; e2y = e2[i, 1]; e2z = e2[i, 2]
            px = dy * e2z - dz * e2y
            py = dz * e2x - dx * e2z
            pz = dx * e2y - dy * e2x
            det = e1x * px + e1y * py + e1z * pz
            if abs(det) < 1e-12:
                continue
            inv_det = 1.0 / det
            tx = ox - v0[i, 0]; ty = oy - v0[i, 1]; tz = oz - v0[i, 2]
            u = (tx * px + ty * py + tz * pz) * inv_det
            if u < 0.0 or u > 1.0:
                continue
            qx = ty * e1z - tz * e1y
            qy = tz * e1x - tx * e1z
            qz = tx * e1y - ty * e1x
            v = (dx * qx + dy * qy + dz * qz) * inv_det
            if v < 0.0 or u + v > 1.0:
                continue
            t = (e2x * qx + e2y * qy + e2z * qz) * inv_det
            if EPS_RAY < t < best_t:
                best_t = t
                best_tri = i
                best_u = u
                best_v = v
    return best_t, best_tri, best_u, best_v


@njit(cache=True, fastmath=True, error_model="numpy")
def _occluded(ox, oy, oz, dx, dy, dz, t_max,
              node_lo, node_hi, node_left, node_right, node_count,
              v0, e1, e2, stack):
    """True when any triangle blocks the segment (EPS_RAY, t_max)."""
    if node_lo.shape[0] == 0:
        return False
    inv_x = 1.0 / dx if dx != 0.0 else 1e30
    inv_y = 1.0 / dy if dy != 0.0 else 1e30
    inv_z = 1.0 / dz if dz != 0.0 else 1e30
    stack[0] = 0
    sp = 1
    while sp > 0:
        sp -= 1
        node = stack[sp]
        t0 = (node_lo[node, 0] - ox) * inv_x
        t1 = (node_hi[node, 0] - ox) * inv_x
        tmin = min(t0, t1)
        tmax = max(t0, t1)
        t0 = (node_lo[node, 1] - oy) * inv_y
        t1 = (node_hi[node, 1] - oy) * inv_y
        tmin = max(tmin, min(t0, t1))
        tmax = min(tmax, max(t0, t1))
        t0 = (node_lo[node, 2] - oz) * inv_z
        t1 = (node_hi[node, 2] - oz) * inv_z
        tmin = max(tmin, min(t0, t1))
        tmax = min(tmax, max(t0, t1))
        if tmax < max(tmin, 0.0) or tmin > t_max:
            continue
        count = node_count[node]
        if count == 0:
            stack[sp] = node_left[node]
            sp += 1
            stack[sp] = node_right[node]
            sp += 1
            continue
        start = node_left[node]
        for i in range(start, start + count):
            e1x = e1[i, 0]; e1y = e1[i, 1]; e1z = e1[i, 2]
            e2x = e2[i, 0]; e2y = e2[i, 1]; e2z = e2[i, 2]
            px = dy * e2z - dz * e2y
            py = dz * e2x - dx * e2z
            pz = dx * e2y - dy * e2x
            det = e1x * px + e1y * py + e1z * pz
            if abs(det) < 1e-12:
                continue
            inv_det = 1.0 / det
            tx = ox - v0[i, 0]; ty = oy - v0[i, 1]; tz = oz - v0[i, 2]
            u = (tx * px + ty * py + tz * pz) * inv_det
            if u < 0.0 or u > 1.0:
                continue
            qx = ty * e1z - tz * e1y
            qy = tz * e1x - tx * e1z
            qz = tx * e1y - ty * e1x
            v = (dx * qx + dy * qy + dz * qz) * inv_det
            if v < 0.0 or u + v > 1.0:
                continue
            t = (e2x * qx + e2y * qy + e2z * qz) * inv_det
            if EPS_RAY < t < t_max:
                return True
    return False


# ---------------------------------------------------------------------------
# shared shading helpers

@njit(cache=True, fastmath=True, error_model="numpy")
def _tex_sample(tex_id, u, v, tex_data, tex_off, tex_w, tex_h):
    """Nearest-texel lookup; uv wraps."""
    w = tex_w[tex_id]
    h = tex_h[tex_id]
    uu = u - math.floor(u)
    vv = v - math.floor(v)
    x = int(uu * w)
    if x >= w:
        x = w - 1
    y = int((1.0 - vv) * h)
    if y >= h:
        y = h - 1
    base = tex_off[tex_id] + (y * w + x) * 3
    return tex_data[base], tex_data[base + 1], tex_data[base + 2]


@njit(cache=True, fastmath=True, error_model="numpy")
def _env_sample(dx, dy, dz, right, up, forward, env):
    """Environment color for a world direction via sphere mapping.

    The direction is first expressed in camera space, where +z faces
    the viewer.
    """
    cx = dx * right[0] + dy * right[1] + dz * right[2]
    cy = dx * up[0] + dy * up[1] + dz * up[2]
    cz = -(dx * forward[0] + dy * forward[1] + dz * forward[2])
    m = 2.0 * math.sqrt(cx * cx + cy * cy + (cz + 1.0) * (cz + 1.0))
    if m < 1e-12:
        u = 0.5
        v = 0.5
    else:
        u = cx / m + 0.5
        v = cy / m + 0.5
    h = env.shape[0]
    w = env.shape[1]
    x = int(u * w)
    if x >= w:
        x = w - 1
    y = int((1.0 - v) * h)
    if y >= h:
        y = h - 1
    return env[y, x, 0], env[y, x, 1], env[y, x, 2]


@njit(cache=True, fastmath=True, error_model="numpy")
def _interp_hit(tri, u, v, bu, bv, n0, n1, n2, uv0, uv1, uv2, dx, dy, dz):
    """Interpolated shading normal (flipped toward the ray) and uv."""
    w0 = 1.0 - bu - bv
    nx = n0[tri, 0] * w0 + n1[tri, 0] * bu + n2[tri, 0] * bv
    ny = n0[tri, 1] * w0 + n1[tri, 1] * bu + n2[tri, 1] * bv
    nz = n0[tri, 2] * w0 + n1[tri, 2] * bu + n2[tri, 2] * bv
    ln = math.sqrt(nx * nx + ny * ny + nz * nz)
    if ln < 1e-12:
        nx, ny, nz = 0.0, 1.0, 0.0
    else:
        nx /= ln
        ny /= ln
        nz /= ln
    if nx * dx + ny * dy + nz * dz > 0.0:  # two-sided shading
        nx = -nx
        ny = -ny
        nz = -nz
    tu = uv0[tri, 0] * w0 + uv1[tri, 0] * bu + uv2[tri, 0] * bv
    tv = uv0[tri, 1] * w0 + uv1[tri, 1] * bu + uv2[tri, 1] * bv
    return nx, ny, nz, tu, tv


# material table columns (shared by both renderers)
M_DIFF = 0      # 0..2 diffuse / base color
M_SPEC = 3      # 3..5 specular color (local)
M_SHINE = 6
M_REFL = 7
M_METAL = 8
M_SPECSCALAR = 9
M_ROUGH = 10
M_TEX = 11
MAT_COLS = 12


@njit(cache=True, parallel=True, fastmath=True, error_model="numpy")
def render_local_kernel(width, height, cam_pos, right, up, forward, tan_x, tan_y,
                        node_lo, node_hi, node_left, node_right, node_count,
                        v0, e1, e2, n0, n1, n2, uv0, uv1, uv2,
                        tri_mat, tri_inst,
                        mats, tex_data, tex_off, tex_w, tex_h,
                        lights, env, has_env, bg_mode, bg_color,
                        out_color, out_id):
    """Blinn-Phong ray caster: one primary ray per pixel, no shadows."""
    npix = width * height
    for pix in prange(npix):
        stack = np.empty(64, dtype=np.int32)
        tstack = np.empty(64, dtype=np.float64)
        x = pix % width
        y = pix // width
        sx = (2.0 * (x + 0.5) / width - 1.0) * tan_x
        sy = (1.0 - 2.0 * (y + 0.5) / height) * tan_y
        dx = sx * right[0] + sy * up[0] + forward[0]
        dy = sx * right[1] + sy * up[1] + forward[1]
        dz = sx * right[2] + sy * up[2] + forward[2]
        ln = math.sqrt(dx * dx + dy * dy + dz * dz)
        dx /= ln
        dy /= ln
        dz /= ln
        t, tri, bu, bv = _closest_hit(
            cam_pos[0], cam_pos[1], cam_pos[2], dx, dy, dz,
            node_lo, node_hi, node_left, node_right, node_count, v0, e1, e2, stack, tstack)
        if tri < 0:
            if bg_mode == 1:
                cr, cg, cb = bg_color[0], bg_color[1], bg_color[2]
            elif bg_mode == 2 and has_env:
                cr, cg, cb = _env_sample(-dx, -dy, -dz, right, up, forward, env)
            else:
                cr, cg, cb = 0.0, 0.0, 0.0
            out_color[y, x, 0] = cr
            out_color[y, x, 1] = cg
            out_color[y, x, 2] = cb
            out_id[y, x] = 0
            continue
        pxp = cam_pos[0] + t * dx
        pyp = cam_pos[1] + t * dy
        pzp = cam_pos[2] + t * dz
        nx, ny, nz, tu, tv = _interp_hit(tri, 0.0, 0.0, bu, bv,
                                         n0, n1, n2, uv0, uv1, uv2, dx, dy, dz)
        m = tri_mat[tri]
        dr = mats[m, M_DIFF]
        dg = mats[m, M_DIFF + 1]
        db = mats[m, M_DIFF + 2]
        tex_id = int(mats[m, M_TEX])
        if tex_id >= 0:
            tr, tg, tb = _tex_sample(tex_id, tu, tv, tex_data, tex_off, tex_w, tex_h)
            dr *= tr
            dg *= tg
            db *= tb
        sr = mats[m, M_SPEC]
        sg = mats[m, M_SPEC + 1]
        sb = mats[m, M_SPEC + 2]
        shin = mats[m, M_SHINE]
        refl = mats[m, M_REFL]
        cr = AMBIENT * dr
        cg = AMBIENT * dg
        cb = AMBIENT * db
        vx = -dx
        vy = -dy
        vz = -dz
        for li in range(lights.shape[0]):
            lx = lights[li, 1] - pxp
            ly = lights[li, 2] - pyp
            lz = lights[li, 3] - pzp
            ll = math.sqrt(lx * lx + ly * ly + lz * lz)
            if ll < 1e-9:
                continue
            lx /= ll
            ly /= ll
            lz /= ll
            ndotl = nx * lx + ny * ly + nz * lz
            if ndotl <= 0.0:
                continue
            intensity = lights[li, 4]
            hx = lx + vx
            hy = ly + vy
            hz = lz + vz
            hl = math.sqrt(hx * hx + hy * hy + hz * hz)
            specular = 0.0
            if hl > 1e-9:
                ndoth = (nx * hx + ny * hy + nz * hz) / hl
                if ndoth > 0.0:
                    specular = ndoth ** shin
            cr += intensity * (dr * ndotl + sr * specular)
            cg += intensity * (dg * ndotl + sg * specular)
            cb += intensity * (db * ndotl + sb * specular)
        if has_env:
            rdx = dx - 2.0 * (dx * nx + dy * ny + dz * nz) * nx
            rdy = dy - 2.0 * (dx * nx + dy * ny + dz * nz) * ny
            rdz = dz - 2.0 * (dx * nx + dy * ny + dz * nz) * nz
            er, eg, eb = _env_sample(rdx, rdy, rdz, right, up, forward, env)
            cr = cr * (1.0 - refl) + er * refl
            cg = cg * (1.0 - refl) + eg * refl
            cb = cb * (1.0 - refl) + eb * refl
        out_color[y, x, 0] = min(max(cr, 0.0), 1.0)
        out_color[y, x, 1] = min(max(cg, 0.0), 1.0)
        out_color[y, x, 2] = min(max(cb, 0.0), 1.0)
        out_id[y, x] = tri_inst[tri]


@njit(cache=True, parallel=True, fastmath=True, error_model="numpy")
def render_id_kernel(width, height, cam_pos, right, up, forward, tan_x, tan_y,
                     node_lo, node_hi, node_left, node_right, node_count,
                     v0, e1, e2, tri_inst, out_id):
    """Primary-visibility instance ids only (annotation denominators)."""
    npix = width * height
    for pix in prange(npix):
        stack = np.empty(64, dtype=np.int32)
        tstack = np.empty(64, dtype=np.float64)
        x = pix % width
        y = pix // width
        sx = (2.0 * (x + 0.5) / width - 1.0) * tan_x
        sy = (1.0 - 2.0 * (y + 0.5) / height) * tan_y
        dx = sx * right[0] + sy * up[0] + forward[0]
        dy = sx * right[1] + sy * up[1] + forward[1]
        dz = sx * right[2] + sy * up[2] + forward[2]
        ln = math.sqrt(dx * dx + dy * dy + dz * dz)
        t, tri, bu, bv = _closest_hit(
            cam_pos[0], cam_pos[1], cam_pos[2], dx / ln, dy / ln, dz / ln,
            node_lo, node_hi, node_left, node_right, node_count, v0, e1, e2, stack, tstack)
        out_id[y, x] = tri_inst[tri] if tri >= 0 else 0


# ---------------------------------------------------------------------------
# path tracer

@njit(cache=True, fastmath=True, error_model="numpy")
def _sample_hemisphere_cosine(nx, ny, nz, u1, u2):
    # orthonormal basis about the normal
    if abs(ny) < 0.9:
        ax, ay, az = 0.0, 1.0, 0.0
    else:
        ax, ay, az = 1.0, 0.0, 0.0
    tx = ay * nz - az * ny
    ty = az * nx - ax * nz
    tz = ax * ny - ay * nx
    tl = math.sqrt(tx * tx + ty * ty + tz * tz)
    tx /= tl
    ty /= tl
    tz /= tl
    bx = ny * tz - nz * ty
    by = nz * tx - nx * tz
    bz = nx * ty - ny * tx
    r = math.sqrt(u1)
    phi = 2.0 * math.pi * u2
    lx = r * math.cos(phi)
    ly = r * math.sin(phi)
    lz = math.sqrt(max(1.0 - u1, 0.0))
    return (lx * tx + ly * bx + lz * nx,
            lx * ty + ly * by + lz * ny,
            lx * tz + ly * bz + lz * nz)


@njit(cache=True, fastmath=True, error_model="numpy")
def _sample_power_lobe(axx, axy, axz, exponent, u1, u2):
    cos_t = u1 ** (1.0 / (exponent + 1.0))
    sin_t = math.sqrt(max(1.0 - cos_t * cos_t, 0.0))
    phi = 2.0 * math.pi * u2
    if abs(axy) < 0.9:
        ax, ay, az = 0.0, 1.0, 0.0
    else:
        ax, ay, az = 1.0, 0.0, 0.0
    tx = ay * axz - az * axy
    ty = az * axx - ax * axz
    tz = ax * axy - ay * axx
    tl = math.sqrt(tx * tx + ty * ty + tz * tz)
    tx /= tl
    ty /= tl
    tz /= tl
    bx = axy * tz - axz * ty
    by = axz * tx - axx * tz
    bz = axx * ty - axy * tx
    ca = math.cos(phi)
    sa = math.sin(phi)
    return (sin_t * ca * tx + sin_t * sa * bx + cos_t * axx,
            sin_t * ca * ty + sin_t * sa * by + cos_t * axy,
            sin_t * ca * tz + sin_t * sa * bz + cos_t * axz)


@njit(cache=True, fastmath=True, error_model="numpy")
def _phong_exponent(rough):
    r = max(rough, 1e-3)
    return 2.0 / (r * r) - 2.0


@njit(cache=True, fastmath=True, error_model="numpy")
def path_radiance(ox, oy, oz, dx, dy, dz, state,
                  node_lo, node_hi, node_left, node_right, node_count,
                  v0, e1, e2, n0, n1, n2, uv0, uv1, uv2, tri_mat,
                  mats, tex_data, tex_off, tex_w, tex_h,
                  lights, env, has_env, bg_color,
                  right, up, forward,
                  max_depth, rr_start, clamp_value, light_power, stack, tstack):
    """One path-traced radiance sample with next-event estimation.

    Point/spot lights are delta sources reached only through the light
    sampling step; the environment is reached only by escaping rays, so
    the estimator is unbiased before the firefly clamp.
    """
    tr = 1.0
    tg = 1.0
    tb = 1.0
    rr_ = 0.0
    rg_ = 0.0
    rb_ = 0.0
    nl = lights.shape[0]
    for depth in range(max_depth):
        t, tri, bu, bv = _closest_hit(ox, oy, oz, dx, dy, dz,
                                      node_lo, node_hi, node_left, node_right,
                                      node_count, v0, e1, e2, stack, tstack)
        if tri < 0:
            if has_env:
                er, eg, eb = _env_sample(-dx, -dy, -dz, right, up, forward, env)
            else:
                er, eg, eb = bg_color[0], bg_color[1], bg_color[2]
            rr_ += tr * er
            rg_ += tg * eg
            rb_ += tb * eb
            break
        px = ox + t * dx
        py = oy + t * dy
        pz = oz + t * dz
        nx, ny, nz, tu, tv = _interp_hit(tri, 0.0, 0.0, bu, bv,
                                         n0, n1, n2, uv0, uv1, uv2, dx, dy, dz)
        m = tri_mat[tri]
        br = mats[m, M_DIFF]
        bg = mats[m, M_DIFF + 1]
        bb = mats[m, M_DIFF + 2]
        tex_id = int(mats[m, M_TEX])
        if tex_id >= 0:
            txr, txg, txb = _tex_sample(tex_id, tu, tv, tex_data, tex_off, tex_w, tex_h)
            br *= txr
            bg *= txg
            bb *= txb
        metal = mats[m, M_METAL]
        spec_s = mats[m, M_SPECSCALAR]
        refl = mats[m, M_REFL]
        rough = mats[m, M_ROUGH]
        # lobe colors of the metalness/specular workflow
        scr = spec_s * (1.0 - metal) + br * metal
        scg = spec_s * (1.0 - metal) + bg * metal
        scb = spec_s * (1.0 - metal) + bb * metal
        dcr = br * (1.0 - metal)
        dcg = bg * (1.0 - metal)
        dcb = bb * (1.0 - metal)
        # mirror direction of the incoming ray
        idn = dx * nx + dy * ny + dz * nz
        mx = dx - 2.0 * idn * nx
        my = dy - 2.0 * idn * ny
        mz = dz - 2.0 * idn * nz

        # next-event estimation toward one uniformly chosen light
        if nl > 0:
            state, ul = next_rand(state)
            li = int(ul * nl)
            if li >= nl:
                li = nl - 1
            wx = lights[li, 1] - px
            wy = lights[li, 2] - py
            wz = lights[li, 3] - pz
            dist = math.sqrt(wx * wx + wy * wy + wz * wz)
            if dist > 1e-6:
                wx /= dist
                wy /= dist
                wz /= dist
                cos_i = nx * wx + ny * wy + nz * wz
                inside_cone = True
                if lights[li, 0] == 1.0:  # spot: receiver must lie in the cone
                    cd = (-wx) * lights[li, 5] + (-wy) * lights[li, 6] + (-wz) * lights[li, 7]
                    inside_cone = cd >= lights[li, 8]
                if cos_i > 0.0 and inside_cone and lights[li, 4] > 0.0:
                    if not _occluded(px + nx * EPS_RAY, py + ny * EPS_RAY,
                                     pz + nz * EPS_RAY, wx, wy, wz, dist - 2.0 * EPS_RAY,
                                     node_lo, node_hi, node_left, node_right,
                                     node_count, v0, e1, e2, stack):
                        # bsdf: (1-refl) diffuse lobe + refl power-cosine lobe
                        diff_w = (1.0 - refl) / math.pi
                        fr = dcr * diff_w
                        fg = dcg * diff_w
                        fb = dcb * diff_w
                        if refl > 0.0 and rough > 1e-6:
                            ex = _phong_exponent(rough)
                            cm = wx * mx + wy * my + wz * mz
                            if cm > 0.0:
                                lobe = refl * (ex + 2.0) / (2.0 * math.pi) * cm ** ex
                                fr += scr * lobe
                                fg += scg * lobe
                                fb += scb * lobe
                        scale = (lights[li, 4] * light_power / (dist * dist)
                                 * cos_i * nl)
                        rr_ += tr * fr * scale
                        rg_ += tg * fg * scale
                        rb_ += tb * fb * scale

        # scatter
        state, ue = next_rand(state)
        if ue < refl:
            if rough <= 1e-6:
                sxd, syd, szd = mx, my, mz
            else:
                state, u1 = next_rand(state)
                state, u2 = next_rand(state)
                sxd, syd, szd = _sample_power_lobe(mx, my, mz, _phong_exponent(rough), u1, u2)
                if sxd * nx + syd * ny + szd * nz <= 0.0:
                    break  # scattered below the horizon: absorbed
            tr *= scr
            tg *= scg
            tb *= scb
        else:
            state, u1 = next_rand(state)
            state, u2 = next_rand(state)
            sxd, syd, szd = _sample_hemisphere_cosine(nx, ny, nz, u1, u2)
            tr *= dcr
            tg *= dcg
            tb *= dcb
        tmax = max(tr, max(tg, tb))
        if tmax < 1e-6:
            break
        if depth + 1 >= rr_start:
            q = min(tmax, 0.95)
            state, urr = next_rand(state)
            if urr >= q:
                break
            tr /= q
            tg /= q
            tb /= q
        ox = px + nx * EPS_RAY
        oy = py + ny * EPS_RAY
        oz = pz + nz * EPS_RAY
        dx, dy, dz = sxd, syd, szd
    if rr_ > clamp_value:
        rr_ = clamp_value
    if rg_ > clamp_value:
        rg_ = clamp_value
    if rb_ > clamp_value:
        rb_ = clamp_value
    return rr_, rg_, rb_


@njit(cache=True, parallel=True, fastmath=True, error_model="numpy")
def render_pbr_kernel(width, height, cam_pos, right, up, forward, tan_x, tan_y,
                      node_lo, node_hi, node_left, node_right, node_count,
                      v0, e1, e2, n0, n1, n2, uv0, uv1, uv2,
                      tri_mat, tri_inst,
                      mats, tex_data, tex_off, tex_w, tex_h,
                      lights, env, has_env, bg_color,
                      frame_seed, spp, max_depth, rr_start, clamp_value,
                      light_power, out_color, out_id):
    """Path-traced frame; per-pixel rng keyed by (frame seed, pixel, sample)."""
    npix = width * height
    for pix in prange(npix):
        stack = np.empty(64, dtype=np.int32)
        tstack = np.empty(64, dtype=np.float64)
        x = pix % width
        y = pix // width
        # instance ids come from the deterministic pixel-center ray
        sx = (2.0 * (x + 0.5) / width - 1.0) * tan_x
        sy = (1.0 - 2.0 * (y + 0.5) / height) * tan_y
        dx = sx * right[0] + sy * up[0] + forward[0]
        dy = sx * right[1] + sy * up[1] + forward[1]
        dz = sx * right[2] + sy * up[2] + forward[2]
        ln = math.sqrt(dx * dx + dy * dy + dz * dz)
        t, tri, bu, bv = _closest_hit(
            cam_pos[0], cam_pos[1], cam_pos[2], dx / ln, dy / ln, dz / ln,
            node_lo, node_hi, node_left, node_right, node_count, v0, e1, e2, stack, tstack)
        out_id[y, x] = tri_inst[tri] if tri >= 0 else 0

        ar = 0.0
        ag = 0.0
        ab = 0.0
        for s in range(spp):
            state = seed_stream(frame_seed, pix, s)
            state, jx = next_rand(state)
            state, jy = next_rand(state)
            sx = (2.0 * (x + jx) / width - 1.0) * tan_x
            sy = (1.0 - 2.0 * (y + jy) / height) * tan_y
            dx = sx * right[0] + sy * up[0] + forward[0]
            dy = sx * right[1] + sy * up[1] + forward[1]
            dz = sx * right[2] + sy * up[2] + forward[2]
            ln = math.sqrt(dx * dx + dy * dy + dz * dz)
            cr, cg, cb = path_radiance(
                cam_pos[0], cam_pos[1], cam_pos[2], dx / ln, dy / ln, dz / ln,
                state,
                node_lo, node_hi, node_left, node_right, node_count,
                v0, e1, e2, n0, n1, n2, uv0, uv1, uv2, tri_mat,
                mats, tex_data, tex_off, tex_w, tex_h,
                lights, env, has_env, bg_color,
                right, up, forward,
                max_depth, rr_start, clamp_value, light_power, stack, tstack)
            ar += cr
            ag += cg
            ab += cb
        out_color[y, x, 0] = ar / spp
        out_color[y, x, 1] = ag / spp
        out_color[y, x, 2] = ab / spp
