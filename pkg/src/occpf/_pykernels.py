"""Pure-Python per-step kernels.

Mirrors ``_ckernels.pyx`` operation for operation so that both backends
produce the same floating-point results. Keep the two files in sync.
"""
from math import atan2, cos, exp, sin

BACKEND = "python"


def obstacle_field(dx, dy, sx, sy, eps, literal):
    """Clamped obstacle potential and its gradient at offset (dx, dy) = ego - obstacle."""
    if literal:
        q = sy * dx * dx + sx * dy * dy
        qx = 2.0 * sy * dx
        qy = 2.0 * sx * dy
    else:
        q = dx * dx / (2.0 * sx * sx) + dy * dy / (2.0 * sy * sy)
        qx = dx / (sx * sx)
        qy = dy / (sy * sy)
    e = exp(-q)
    if e < eps:
        return 0.0, 0.0, 0.0
    k = e / (1.0 - eps)
    return (e - eps) / (1.0 - eps), -k * qx, -k * qy


def edge_term(d, xi, f_cap):
    """Potential of one road edge at clearance ``d`` and its derivative w.r.t. ``d``.

    Beyond the clearance where the slope magnitude reaches ``f_cap`` the
    potential continues linearly with slope ``-f_cap``.
    """
    d_cap = (xi / f_cap) ** (1.0 / 3.0)
    if d > d_cap:
        return 0.5 * xi / (d * d), -xi / (d * d * d)
    return 0.5 * xi / (d_cap * d_cap) + f_cap * (d_cap - d), -f_cap


def net_force(x, y, goal_x, lam, y_lo, y_hi, half_w, xi, f_cap,
              dividers, a_ld, sigma_lane, sources, eps, literal):
    """Negative gradient of the composite field.

    ``sources`` is a sequence of ``(x, y, sigma_x, sigma_y, alpha1, alpha2)``.
    """
    fx = -lam * (x - goal_x)
    fy = 0.0
    g = edge_term(y - y_lo - half_w, xi, f_cap)[1]
    fy -= g
    g = edge_term(y_hi - y - half_w, xi, f_cap)[1]
    fy += g
    s2 = sigma_lane * sigma_lane
    for yd in dividers:
        dd = y - yd
        fy += a_ld * dd / s2 * exp(-dd * dd / (2.0 * s2))
    for ox, oy, sx, sy, a1, a2 in sources:
        _, gx, gy = obstacle_field(x - ox, y - oy, sx, sy, eps, literal)
        fx -= a1 * gx
        fy -= a2 * gy
    return fx, fy


def _bicycle_deriv(yaw, beta, r, v, steer, accel, m, iz, lf, lr, cf, cr, frozen):
    dx = v * cos(yaw + beta)
    dy = v * sin(yaw + beta)
    if frozen:
        return dx, dy, r, 0.0, 0.0, accel
    dbeta = (-(cf + cr) / (m * v) * beta
             + ((cr * lr - cf * lf) / (m * v * v) - 1.0) * r
             + cf / (m * v) * steer)
    dr = ((cr * lr - cf * lf) / iz * beta
          - (cf * lf * lf + cr * lr * lr) / (iz * v) * r
          + cf * lf / iz * steer)
    return dx, dy, r, dbeta, dr, accel


def bicycle_step(x, y, yaw, beta, r, v, steer, accel, dt,
                 m, iz, lf, lr, cf, cr, v_floor):
    """One classical RK4 step of the linear-tire bicycle with held inputs.

    Returns ``(x, y, yaw, beta, r, v)``. Below ``v_floor`` the lateral
    states are held and the motion is kinematic.
    """
    frozen = v < v_floor
    h = 0.5 * dt
    k1 = _bicycle_deriv(yaw, beta, r, v, steer, accel, m, iz, lf, lr, cf, cr, frozen)
    k2 = _bicycle_deriv(yaw + h * k1[2], beta + h * k1[3], r + h * k1[4], v + h * k1[5],
                        steer, accel, m, iz, lf, lr, cf, cr, frozen)
    k3 = _bicycle_deriv(yaw + h * k2[2], beta + h * k2[3], r + h * k2[4], v + h * k2[5],
                        steer, accel, m, iz, lf, lr, cf, cr, frozen)
    k4 = _bicycle_deriv(yaw + dt * k3[2], beta + dt * k3[3], r + dt * k3[4], v + dt * k3[5],
                        steer, accel, m, iz, lf, lr, cf, cr, frozen)
    c = dt / 6.0
    x = x + c * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
    y = y + c * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
    yaw = yaw + c * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
    beta = beta + c * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])
    r = r + c * (k1[4] + 2.0 * k2[4] + 2.0 * k3[4] + k4[4])
    v = v + c * (k1[5] + 2.0 * k2[5] + 2.0 * k3[5] + k4[5])
    if v < 0.0:
        v = 0.0
    return x, y, yaw, beta, r, v


def silhouette(ex, ey, occ):
    """Indices of the two occluder corners with extreme bearing from (ex, ey).

    ``occ`` is a flat sequence ``(x0, y0, x1, y1, x2, y2, x3, y3)``. Bearings are
    measured relative to the direction of the corner centroid, so the angular
    range never straddles the atan2 branch cut.
    """
    cx = 0.25 * (occ[0] + occ[2] + occ[4] + occ[6]) - ex
    cy = 0.25 * (occ[1] + occ[3] + occ[5] + occ[7]) - ey
    i_lo = i_hi = 0
    a_lo = a_hi = 0.0
    for i in range(4):
        px = occ[2 * i] - ex
        py = occ[2 * i + 1] - ey
        a = atan2(cx * py - cy * px, cx * px + cy * py)
        if i == 0 or a < a_lo:
            a_lo = a
            i_lo = i
        if i == 0 or a > a_hi:
            a_hi = a
            i_hi = i
    return i_lo, i_hi


def in_shadow(ex, ey, occ, i_lo, i_hi, px, py):
    """True if (px, py) lies in the closed shadow wedge behind the occluder."""
    lx = occ[2 * i_lo] - ex
    ly = occ[2 * i_lo + 1] - ey
    hx = occ[2 * i_hi] - ex
    hy = occ[2 * i_hi + 1] - ey
    qx = px - ex
    qy = py - ey
    # counter-clockwise of the low boundary, clockwise of the high boundary
    if lx * qy - ly * qx < 0.0:
        return False
    if hx * qy - hy * qx > 0.0:
        return False
    # beyond the chord joining the silhouette corners (ego is on the other side)
    chx = hx - lx
    chy = hy - ly
    side_p = chx * (qy - ly) - chy * (qx - lx)
    side_e = chx * (-ly) - chy * (-lx)
    return side_p * side_e <= 0.0


def hidden_by(ex, ey, occ, target):
    """True if all four target corners are in the shadow of this one occluder."""
    i_lo, i_hi = silhouette(ex, ey, occ)
    for i in range(4):
        if not in_shadow(ex, ey, occ, i_lo, i_hi, target[2 * i], target[2 * i + 1]):
            return False
    return True
