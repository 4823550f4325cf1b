"""Fused scalar inner loop for episode stepping.

The modular functions in forces.py / dynamics.py are the readable reference
implementation of the physics; this module is the same math flattened into
plain-float Python for speed (numpy's per-call overhead on 3-vectors is two
orders of magnitude above the arithmetic itself, and episodes take ~50k
substeps).  tests/test_engine_parity.py asserts both paths agree to 1e-9 on
random states -- keep them in sync when touching either side.
"""

from __future__ import annotations

import math
from bisect import bisect_right

from .dynamics import GIMBAL_MARGIN, build_mass_matrix
from .errors import GimbalLockError, IntegrationBlowupError
from .forces import EPS_FLOW

_TWO_PI = 2.0 * math.pi
_SIN_GIMBAL = math.sin(GIMBAL_MARGIN)
CAPSIZE_ROLL = math.radians(80.0)


def _wrap(a):
    return math.pi - (math.pi - a) % _TWO_PI


class _FoilTable:
    """Coefficient interpolation on plain lists (mirrors CoefficientTable.lookup)."""

    __slots__ = ("alpha", "cl", "cd", "n")

    def __init__(self, table):
        self.alpha = [float(a) for a in table.alpha]
        self.cl = [float(c) for c in table.cl]
        self.cd = [float(c) for c in table.cd]
        self.n = len(self.alpha)

    def lookup(self, alpha):
        a = _wrap(alpha)
        mag = -a if a < 0.0 else a
        i = bisect_right(self.alpha, mag)
        if i >= self.n:
            cl, cd = self.cl[-1], self.cd[-1]
        elif i == 0:
            cl, cd = self.cl[0], self.cd[0]
        else:
            a0, a1 = self.alpha[i - 1], self.alpha[i]
            f = (mag - a0) / (a1 - a0)
            cl = self.cl[i - 1] + f * (self.cl[i] - self.cl[i - 1])
            cd = self.cd[i - 1] + f * (self.cd[i] - self.cd[i - 1])
        if a < 0.0:
            cl = -cl
        return cl, cd


class Engine:
    """One episode's physics state, advanced a control period at a time."""

    def __init__(self, params, air_density, water_density):
        self.params = params
        self.rho_air = float(air_density)
        self.rho_water = float(water_density)

        m = build_mass_matrix(params)
        import numpy as np

        self.minv = [[float(x) for x in row] for row in np.linalg.inv(m)]
        self.m_lin = [float(m[i, i]) for i in range(3)]  # top-left is diagonal
        self.m_rot = [[float(m[3 + i, 3 + j]) for j in range(3)] for i in range(3)]
        def diag_or_none(rows):
            if all(rows[i][j] == 0.0 for i in range(len(rows)) for j in range(len(rows)) if i != j):
                return [rows[i][i] for i in range(len(rows))]
            return None

        self.minv_diag = diag_or_none(self.minv)
        self.m_rot_diag = diag_or_none(self.m_rot)
        self.dl = [float(x) for x in params.linear_damping]
        self.dq = [float(x) for x in params.quadratic_damping]

        def foil(f):
            cx, cy = float(f.chord_direction[0]), float(f.chord_direction[1])
            return (
                float(f.area),
                math.atan2(cy, cx),
                tuple(float(x) for x in f.center_of_effort),
                _FoilTable(f.coefficients),
            )

        self.sail = foil(params.sail)
        self.keel = foil(params.keel)
        self.rudder = foil(params.rudder)
        self.sail_limits = tuple(float(x) for x in params.sail.deflection_limits)
        self.quadrants = [
            (float(q.center[0]), float(q.center[1]), float(q.center[2]), float(q.volume))
            for q in params.hull_quadrants
        ]
        self.draft = float(params.draft_ref)
        self.wave_damping = float(params.wave_damping)
        self.mass = float(params.mass)
        self.g = float(params.gravity)
        top = params.propeller.max_level
        self.thrust_table = [float(params.propeller.levels[l]) for l in range(-top, top + 1)]
        self.prop_offset = top
        px, py, pz = (float(x) for x in params.propeller.position)
        self.prop_pos = (px, py, pz)

        # episode state (set by load_state / set_waves)
        self.pos = [0.0, 0.0, 0.0]
        self.att = [0.0, 0.0, 0.0]
        self.nu = [0.0] * 6
        self.t = 0.0
        self.waves = ([], [], [], [], [])  # amp, kx, ky, omega, phase
        self.wind = (0.0, 0.0, 0.0)

    # -- wiring ------------------------------------------------------------

    def set_waves(self, field):
        self.waves = (
            [float(a) for a in field._amp],
            [float(k) for k in field._kx],
            [float(k) for k in field._ky],
            [float(w) for w in field._omega],
            [float(p) for p in field._phase],
        )

    def load_state(self, state):
        self.pos = [float(x) for x in state.position]
        self.att = [float(x) for x in state.attitude]
        self.nu = [float(x) for x in state.nu]
        self.t = float(state.sim_time)

    def export_state(self):
        from .vessel import VesselState

        return VesselState(position=list(self.pos), attitude=list(self.att), nu=list(self.nu), sim_time=self.t)

    # -- diagnostics -------------------------------------------------------

    def force_breakdown(self, actuators):
        """Per-component generalized forces at the current state.

        Same quantities as the one-at-a-time functions in forces.py (sail,
        keel, rudder, buoyancy, damping, propeller, gravity), kept scalar so
        per-step diagnostics stay out of the numpy path; pinned to the
        modular implementation by tests/test_engine_parity.py.
        """
        cos, sin, atan2, hypot = math.cos, math.sin, math.atan2, math.hypot
        a0, a1, a2 = self.att
        cr, sr = cos(a0), sin(a0)
        cp, sp = cos(a1), sin(a1)
        cy, sy = cos(a2), sin(a2)
        r00, r01, r02 = cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr
        r10, r11, r12 = sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr
        r20, r21, r22 = -sp, cp * sr, cp * cr
        u, v, w, p, q_, r = self.nu
        wx, wy, wz = self.wind

        def foil_vec(area, chord0, ce, table, fx, fy, defl, rho):
            speed = hypot(fx, fy)
            if speed <= EPS_FLOW:
                return [0.0] * 6
            cl, cd = table.lookup(_wrap(chord0 + defl - atan2(fy, fx)))
            qd = 0.5 * rho * speed * speed * area
            ux, uy = fx / speed, fy / speed
            f0 = qd * (cd * ux + cl * uy)
            f1 = qd * (cd * uy - cl * ux)
            cx_, cy_, cz_ = ce
            return [f0, f1, 0.0, -cz_ * f1, cz_ * f0, cx_ * f1 - cy_ * f0]

        sail_area, sail_chord0, sail_ce, sail_table = self.sail
        blo, bhi = self.sail_limits
        boom = actuators.boom_angle
        limit = blo if boom < blo else bhi if boom > bhi else boom
        fx = r00 * wx + r10 * wy + r20 * wz - u
        fy = r01 * wx + r11 * wy + r21 * wz - v
        sail_out = [0.0] * 6
        if hypot(fx, fy) > EPS_FLOW:
            weathervane = _wrap(atan2(fy, fx) - sail_chord0)
            if abs(weathervane) >= limit:
                defl = limit if weathervane >= 0.0 else -limit
                sail_out = foil_vec(
                    sail_area, sail_chord0, sail_ce, sail_table, fx, fy, defl, self.rho_air
                )

        keel_area, keel_chord0, (kx_, ky_, kz_), keel_table = self.keel
        keel_out = foil_vec(
            keel_area,
            keel_chord0,
            (kx_, ky_, kz_),
            keel_table,
            -(u + q_ * kz_ - r * ky_),
            -(v + r * kx_ - p * kz_),
            0.0,
            self.rho_water,
        )
        rud_area, rud_chord0, (rx_, ry_, rz_), rud_table = self.rudder
        rudder_out = foil_vec(
            rud_area,
            rud_chord0,
            (rx_, ry_, rz_),
            rud_table,
            -(u + q_ * rz_ - r * ry_),
            -(v + r * rx_ - p * rz_),
            actuators.rudder_angle,
            self.rho_water,
        )

        buoy = [0.0] * 6
        p0, p1, p2 = self.pos
        t = self.t
        rho_g = self.rho_water * self.g
        wave_rows = list(zip(*self.waves))
        for qx, qy, qz, qvol in self.quadrants:
            wxq = p0 + r00 * qx + r01 * qy + r02 * qz
            wyq = p1 + r10 * qx + r11 * qy + r12 * qz
            wzq = p2 + r20 * qx + r21 * qy + r22 * qz
            eta = 0.0
            eta_rate = 0.0
            for wa, wk1, wk2, wo, wp0 in wave_rows:
                arg = wk1 * wxq + wk2 * wyq - wo * t + wp0
                eta += wa * cos(arg)
                eta_rate += wa * wo * sin(arg)
            frac = (eta + wzq) / self.draft
            if frac <= 0.0:
                continue
            if frac > 1.0:
                frac = 1.0
            lift = rho_g * qvol * frac
            if self.wave_damping > 0.0:
                bx = u + q_ * qz - r * qy
                by = v + r * qx - p * qz
                bz = w + p * qy - q_ * qx
                vert_up = -(r20 * bx + r21 * by + r22 * bz)
                lift -= self.wave_damping * frac * (vert_up - eta_rate)
            f0, f1, f2 = -lift * r20, -lift * r21, -lift * r22
            buoy[0] += f0
            buoy[1] += f1
            buoy[2] += f2
            buoy[3] += qy * f2 - qz * f1
            buoy[4] += qz * f0 - qx * f2
            buoy[5] += qx * f1 - qy * f0

        damping = [
            -(dl + dq * abs(n)) * n for dl, dq, n in zip(self.dl, self.dq, self.nu)
        ]
        thrust = self.thrust_table[actuators.propeller_level + self.prop_offset]
        px_, py_, pz_ = self.prop_pos
        mg = self.mass * self.g
        return {
            "sail": sail_out,
            "keel": keel_out,
            "rudder": rudder_out,
            "buoyancy": buoy,
            "damping": damping,
            "propeller": [thrust, 0.0, 0.0, 0.0, pz_ * thrust, -py_ * thrust],
            "gravity": [mg * r20, mg * r21, mg * r22, 0.0, 0.0, 0.0],
        }

    # -- physics -----------------------------------------------------------

    def advance(self, substeps, dt, actuators, wind_mean, gust, gust_decay, gust_diffusion, normals):
        """Run `substeps` physics steps of length dt.

        `gust` is the mutable [gx, gy] gust state; `normals` supplies
        2*substeps standard normals for the wind process.  Returns
        "ok" | "capsize"; raises IntegrationBlowupError on divergence.
        """
        pos, att, nu = self.pos, self.att, self.nu
        p0, p1, p2 = pos
        a0, a1, a2 = att
        u, v, w, p, q_, r = nu
        rudder = actuators.rudder_angle
        boom = actuators.boom_angle
        thrust = self.thrust_table[actuators.propeller_level + self.prop_offset]
        mwx, mwy, mwz = wind_mean
        sail_area, sail_chord0, (sx_, sy_, sz_), sail_table = self.sail
        keel_area, keel_chord0, (kx_, ky_, kz_), keel_table = self.keel
        rud_area, rud_chord0, (rx_, ry_, rz_), rud_table = self.rudder
        blo, bhi = self.sail_limits
        limit = blo if boom < blo else bhi if boom > bhi else boom
        dl0, dl1, dl2, dl3, dl4, dl5 = self.dl
        dq0, dq1, dq2, dq3, dq4, dq5 = self.dq
        m0, m1, m2 = self.m_lin
        mr = self.m_rot
        mr_diag = self.m_rot_diag
        minv_diag = self.minv_diag
        minv = self.minv
        rho_air, rho_water = self.rho_air, self.rho_water
        rho_g = rho_water * self.g
        mg = self.mass * self.g
        draft = self.draft
        wave_damp = self.wave_damping
        quadrants = self.quadrants
        px_, py_, pz_ = self.prop_pos
        t = self.t
        wamp, wkx, wky, wom, wph = self.waves
        wave_rows = list(zip(wamp, wkx, wky, wom, wph))
        cos, sin, atan2, hypot = math.cos, math.sin, math.atan2, math.hypot
        pi = math.pi
        nidx = 0
        wx = mwx + gust[0]
        wy = mwy + gust[1]
        wz = mwz

        for _ in range(substeps):
            # true wind (mean-reverting gust, exact OU discretization)
            if gust_diffusion > 0.0:
                gust[0] = gust[0] * gust_decay + gust_diffusion * normals[nidx]
                gust[1] = gust[1] * gust_decay + gust_diffusion * normals[nidx + 1]
                nidx += 2
                wx, wy = mwx + gust[0], mwy + gust[1]

            cr, sr = cos(a0), sin(a0)
            cp, sp = cos(a1), sin(a1)
            cy, sy = cos(a2), sin(a2)
            if -_SIN_GIMBAL < cp < _SIN_GIMBAL:
                self.t = t
                pos[0], pos[1], pos[2] = p0, p1, p2
                att[0], att[1], att[2] = a0, a1, a2
                nu[0], nu[1], nu[2], nu[3], nu[4], nu[5] = u, v, w, p, q_, r
                self.wind = (wx, wy, wz)
                raise GimbalLockError(f"pitch {a1:.4f} rad too close to +/-pi/2")
            r00, r01, r02 = cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr
            r10, r11, r12 = sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr
            r20, r21, r22 = -sp, cp * sr, cp * cr

            t0 = t1 = t2 = t3 = t4 = t5 = 0.0

            # sail (boom as one-sided sheet constraint)
            fx = r00 * wx + r10 * wy + r20 * wz - u
            fy = r01 * wx + r11 * wy + r21 * wz - v
            speed = hypot(fx, fy)
            if speed > EPS_FLOW:
                weathervane = _wrap(atan2(fy, fx) - sail_chord0)
                if abs(weathervane) >= limit:
                    defl = limit if weathervane >= 0.0 else -limit
                    cl, cd = sail_table.lookup(_wrap(sail_chord0 + defl - atan2(fy, fx)))
                    qd = 0.5 * rho_air * speed * speed * sail_area
                    ux, uy = fx / speed, fy / speed
                    f0 = qd * (cd * ux + cl * uy)
                    f1 = qd * (cd * uy - cl * ux)
                    t0 += f0
                    t1 += f1
                    t3 -= sz_ * f1
                    t4 += sz_ * f0
                    t5 += sx_ * f1 - sy_ * f0

            # keel and rudder see still water: flow = -(v + omega x r)
            fx = -(u + q_ * kz_ - r * ky_)
            fy = -(v + r * kx_ - p * kz_)
            speed = hypot(fx, fy)
            if speed > EPS_FLOW:
                cl, cd = keel_table.lookup(_wrap(keel_chord0 - atan2(fy, fx)))
                qd = 0.5 * rho_water * speed * speed * keel_area
                ux, uy = fx / speed, fy / speed
                f0 = qd * (cd * ux + cl * uy)
                f1 = qd * (cd * uy - cl * ux)
                t0 += f0
                t1 += f1
                t3 -= kz_ * f1
                t4 += kz_ * f0
                t5 += kx_ * f1 - ky_ * f0

            fx = -(u + q_ * rz_ - r * ry_)
            fy = -(v + r * rx_ - p * rz_)
            speed = hypot(fx, fy)
            if speed > EPS_FLOW:
                cl, cd = rud_table.lookup(_wrap(rud_chord0 + rudder - atan2(fy, fx)))
                qd = 0.5 * rho_water * speed * speed * rud_area
                ux, uy = fx / speed, fy / speed
                f0 = qd * (cd * ux + cl * uy)
                f1 = qd * (cd * uy - cl * ux)
                t0 += f0
                t1 += f1
                t3 -= rz_ * f1
                t4 += rz_ * f0
                t5 += rx_ * f1 - ry_ * f0

            # four-quadrant buoyancy + vertical wave damping; wave elevation
            # inlined (same sum as WaveField.elevation_and_rate)
            for qx, qy, qz, qvol in quadrants:
                wxq = p0 + r00 * qx + r01 * qy + r02 * qz
                wyq = p1 + r10 * qx + r11 * qy + r12 * qz
                wzq = p2 + r20 * qx + r21 * qy + r22 * qz
                eta = 0.0
                eta_rate = 0.0
                for wa, wk1, wk2, wo, wp0 in wave_rows:
                    arg = wk1 * wxq + wk2 * wyq - wo * t + wp0
                    eta += wa * cos(arg)
                    eta_rate += wa * wo * sin(arg)
                frac = (eta + wzq) / draft
                if frac <= 0.0:
                    continue
                if frac > 1.0:
                    frac = 1.0
                lift = rho_g * qvol * frac
                if wave_damp > 0.0:
                    bx = u + q_ * qz - r * qy
                    by = v + r * qx - p * qz
                    bz = w + p * qy - q_ * qx
                    vert_up = -(r20 * bx + r21 * by + r22 * bz)
                    lift -= wave_damp * frac * (vert_up - eta_rate)
                f0, f1, f2 = -lift * r20, -lift * r21, -lift * r22
                t0 += f0
                t1 += f1
                t2 += f2
                t3 += qy * f2 - qz * f1
                t4 += qz * f0 - qx * f2
                t5 += qx * f1 - qy * f0

            # propeller thrust along +x at its application point, and weight
            t0 += thrust + mg * r20
            t1 += mg * r21
            t2 += mg * r22
            t4 += pz_ * thrust
            t5 -= py_ * thrust

            # Coriolis (skew-symmetric block form) and diagonal damping
            ca0, ca1, ca2 = m0 * u, m1 * v, m2 * w
            if mr_diag is not None:
                b0, b1, b2 = mr_diag[0] * p, mr_diag[1] * q_, mr_diag[2] * r
            else:
                b0 = mr[0][0] * p + mr[0][1] * q_ + mr[0][2] * r
                b1 = mr[1][0] * p + mr[1][1] * q_ + mr[1][2] * r
                b2 = mr[2][0] * p + mr[2][1] * q_ + mr[2][2] * r
            rhs0 = t0 - (ca1 * r - ca2 * q_) - (dl0 + dq0 * abs(u)) * u
            rhs1 = t1 - (ca2 * p - ca0 * r) - (dl1 + dq1 * abs(v)) * v
            rhs2 = t2 - (ca0 * q_ - ca1 * p) - (dl2 + dq2 * abs(w)) * w
            rhs3 = t3 - (ca1 * w - ca2 * v) - (b1 * r - b2 * q_) - (dl3 + dq3 * abs(p)) * p
            rhs4 = t4 - (ca2 * u - ca0 * w) - (b2 * p - b0 * r) - (dl4 + dq4 * abs(q_)) * q_
            rhs5 = t5 - (ca0 * v - ca1 * u) - (b0 * q_ - b1 * p) - (dl5 + dq5 * abs(r)) * r

            if minv_diag is not None:
                u += dt * minv_diag[0] * rhs0
                v += dt * minv_diag[1] * rhs1
                w += dt * minv_diag[2] * rhs2
                p += dt * minv_diag[3] * rhs3
                q_ += dt * minv_diag[4] * rhs4
                r += dt * minv_diag[5] * rhs5
            else:
                for i in range(6):
                    row = minv[i]
                    acc = (
                        row[0] * rhs0
                        + row[1] * rhs1
                        + row[2] * rhs2
                        + row[3] * rhs3
                        + row[4] * rhs4
                        + row[5] * rhs5
                    )
                    if i == 0:
                        u += dt * acc
                    elif i == 1:
                        v += dt * acc
                    elif i == 2:
                        w += dt * acc
                    elif i == 3:
                        p += dt * acc
                    elif i == 4:
                        q_ += dt * acc
                    else:
                        r += dt * acc

            # semi-implicit: pose moves with the updated velocity
            p0 += dt * (r00 * u + r01 * v + r02 * w)
            p1 += dt * (r10 * u + r11 * v + r12 * w)
            p2 += dt * (r20 * u + r21 * v + r22 * w)
            tp = sp / cp
            a = a0 + dt * (p + sr * tp * q_ + cr * tp * r)
            a0 = a if -pi < a <= pi else _wrap(a)
            a = a1 + dt * (cr * q_ - sr * r)
            a1 = a if -pi < a <= pi else _wrap(a)
            a = a2 + dt * ((sr * q_ + cr * r) / cp)
            a2 = a if -pi < a <= pi else _wrap(a)
            t += dt

            if a0 > CAPSIZE_ROLL or a0 < -CAPSIZE_ROLL:
                self.t = t
                pos[0], pos[1], pos[2] = p0, p1, p2
                att[0], att[1], att[2] = a0, a1, a2
                nu[0], nu[1], nu[2], nu[3], nu[4], nu[5] = u, v, w, p, q_, r
                self.wind = (wx, wy, wz)
                return "capsize"

        self.t = t
        pos[0], pos[1], pos[2] = p0, p1, p2
        att[0], att[1], att[2] = a0, a1, a2
        nu[0], nu[1], nu[2], nu[3], nu[4], nu[5] = u, v, w, p, q_, r
        self.wind = (wx, wy, wz)
        if not math.isfinite(p0 + p1 + p2 + a0 + a1 + a2 + u + v + w + p + q_ + r):
            raise IntegrationBlowupError(f"non-finite state at t={t:.3f}", state=(pos, att, nu))
        return "ok"
