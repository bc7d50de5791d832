# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-step kernels. Operation order matches ``_pykernels.py``."""
from libc.math cimport atan2, cos, exp, pow, sin

BACKEND = "compiled"


cdef inline void _obstacle_field(double dx, double dy, double sx, double sy,
                                 double eps, bint literal,
                                 double* u, double* gx, double* gy) noexcept nogil:
    cdef double q, qx, qy, e, k
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
        u[0] = 0.0
        gx[0] = 0.0
        gy[0] = 0.0
        return
    k = e / (1.0 - eps)
    u[0] = (e - eps) / (1.0 - eps)
    gx[0] = -k * qx
    gy[0] = -k * qy


cdef inline void _edge_term(double d, double xi, double f_cap,
                            double* u, double* g) noexcept nogil:
    cdef double d_cap = pow(xi / f_cap, 1.0 / 3.0)
    if d > d_cap:
        u[0] = 0.5 * xi / (d * d)
        g[0] = -xi / (d * d * d)
    else:
        u[0] = 0.5 * xi / (d_cap * d_cap) + f_cap * (d_cap - d)
        g[0] = -f_cap


def obstacle_field(double dx, double dy, double sx, double sy, double eps, bint literal):
    cdef double u, gx, gy
    _obstacle_field(dx, dy, sx, sy, eps, literal, &u, &gx, &gy)
    return u, gx, gy


def edge_term(double d, double xi, double f_cap):
    cdef double u, g
    _edge_term(d, xi, f_cap, &u, &g)
    return u, g


def net_force(double x, double y, double goal_x, double lam, double y_lo, double y_hi,
              double half_w, double xi, double f_cap, dividers, double a_ld,
              double sigma_lane, sources, double eps, bint literal):
    cdef double fx = -lam * (x - goal_x)
    cdef double fy = 0.0
    cdef double u, g, gx, gy, dd, yd, s2
    cdef double ox, oy, sx, sy, a1, a2
    _edge_term(y - y_lo - half_w, xi, f_cap, &u, &g)
    fy -= g
    _edge_term(y_hi - y - half_w, xi, f_cap, &u, &g)
    fy += g
    s2 = sigma_lane * sigma_lane
    for yd in dividers:
        dd = y - yd
        fy += a_ld * dd / s2 * exp(-dd * dd / (2.0 * s2))
    for ox, oy, sx, sy, a1, a2 in sources:
        _obstacle_field(x - ox, y - oy, sx, sy, eps, literal, &u, &gx, &gy)
        fx -= a1 * gx
        fy -= a2 * gy
    return fx, fy


cdef inline void _bicycle_deriv(double yaw, double beta, double r, double v,
                                double steer, double accel, double m, double iz,
                                double lf, double lr, double cf, double cr, bint frozen,
                                double* out) noexcept nogil:
    out[0] = v * cos(yaw + beta)
    out[1] = v * sin(yaw + beta)
    out[2] = r
    out[5] = accel
    if frozen:
        out[3] = 0.0
        out[4] = 0.0
        return
    out[3] = (-(cf + cr) / (m * v) * beta
              + ((cr * lr - cf * lf) / (m * v * v) - 1.0) * r
              + cf / (m * v) * steer)
    out[4] = ((cr * lr - cf * lf) / iz * beta
              - (cf * lf * lf + cr * lr * lr) / (iz * v) * r
              + cf * lf / iz * steer)


def bicycle_step(double x, double y, double yaw, double beta, double r, double v,
                 double steer, double accel, double dt, double m, double iz,
                 double lf, double lr, double cf, double cr, double v_floor):
    cdef double k1[6]
    cdef double k2[6]
    cdef double k3[6]
    cdef double k4[6]
    cdef bint frozen = v < v_floor
    cdef double h = 0.5 * dt
    cdef double c
    _bicycle_deriv(yaw, beta, r, v, steer, accel, m, iz, lf, lr, cf, cr, frozen, k1)
    _bicycle_deriv(yaw + h * k1[2], beta + h * k1[3], r + h * k1[4], v + h * k1[5],
                   steer, accel, m, iz, lf, lr, cf, cr, frozen, k2)
    _bicycle_deriv(yaw + h * k2[2], beta + h * k2[3], r + h * k2[4], v + h * k2[5],
                   steer, accel, m, iz, lf, lr, cf, cr, frozen, k3)
    _bicycle_deriv(yaw + dt * k3[2], beta + dt * k3[3], r + dt * k3[4], v + dt * k3[5],
                   steer, accel, m, iz, lf, lr, cf, cr, frozen, k4)
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


cdef inline void _silhouette(double ex, double ey, double* o, int* i_lo, int* i_hi) noexcept nogil:
    cdef double cx = 0.25 * (o[0] + o[2] + o[4] + o[6]) - ex
    cdef double cy = 0.25 * (o[1] + o[3] + o[5] + o[7]) - ey
    cdef double a, a_lo = 0.0, a_hi = 0.0, px, py
    cdef int i
    i_lo[0] = 0
    i_hi[0] = 0
    for i in range(4):
        px = o[2 * i] - ex
        py = o[2 * i + 1] - ey
        a = atan2(cx * py - cy * px, cx * px + cy * py)
        if i == 0 or a < a_lo:
            a_lo = a
            i_lo[0] = i
        if i == 0 or a > a_hi:
            a_hi = a
            i_hi[0] = i


cdef inline bint _in_shadow(double ex, double ey, double* o, int i_lo, int i_hi,
                            double px, double py) noexcept nogil:
    cdef double lx = o[2 * i_lo] - ex
    cdef double ly = o[2 * i_lo + 1] - ey
    cdef double hx = o[2 * i_hi] - ex
    cdef double hy = o[2 * i_hi + 1] - ey
    cdef double qx = px - ex
    cdef double qy = py - ey
    cdef double chx, chy, side_p, side_e
    if lx * qy - ly * qx < 0.0:
        return False
    if hx * qy - hy * qx > 0.0:
        return False
    chx = hx - lx
    chy = hy - ly
    side_p = chx * (qy - ly) - chy * (qx - lx)
    side_e = chx * (-ly) - chy * (-lx)
    return side_p * side_e <= 0.0


cdef void _load8(seq, double* buf) except *:
    cdef int i
    for i in range(8):
        buf[i] = seq[i]


def silhouette(double ex, double ey, occ):
    cdef double o[8]
    cdef int i_lo, i_hi
    _load8(occ, o)
    _silhouette(ex, ey, o, &i_lo, &i_hi)
    return i_lo, i_hi


def in_shadow(double ex, double ey, occ, int i_lo, int i_hi, double px, double py):
    cdef double o[8]
    _load8(occ, o)
    return _in_shadow(ex, ey, o, i_lo, i_hi, px, py)


def hidden_by(double ex, double ey, occ, target):
    cdef double o[8]
    cdef double t[8]
    cdef int i_lo, i_hi, i
    _load8(occ, o)
    _load8(target, t)
    _silhouette(ex, ey, o, &i_lo, &i_hi)
    for i in range(4):
        if not _in_shadow(ex, ey, o, i_lo, i_hi, t[2 * i], t[2 * i + 1]):
            return False
    return True
