// Copyright 2026 The geophase Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "geophase/engine.hpp"

namespace geophase {

using Vec3 = Eigen::Vector3d;

/// v = 2 (Tr rho I_x, Tr rho I_y, Tr rho I_z) of the pair; the lower index r is |0> (north pole).
inline Vec3 bloch_vector(const ComplexMatrix &rho, const SubspacePair &pair) {
    const std::size_t r = pair.r(), s = pair.s();
    const Complex rs = rho(r, s);
    return {2.0 * rs.real(), -2.0 * rs.imag(), (rho(r, r) - rho(s, s)).real()};
}

struct BlochTrajectory {
    SubspacePair pair;
    std::vector<double> times;
    std::vector<Vec3> points;

    bool closed(double tol = 1e-6) const { return !points.empty() && (points.front() - points.back()).norm() <= tol; }
};

namespace detail {

inline void sample(BlochTrajectory &traj, const DensityState &state) {
    traj.times.push_back(state.time_s);
    traj.points.push_back(bloch_vector(state.rho, traj.pair));
}

inline void sampled_delay(BlochTrajectory &traj, DensityState &state, const LevelScheme &scheme, double duration, int steps) {
    if (duration <= 0.0) return;
    for (int k = 0; k < steps; ++k) {
        state = free_evolve(state, scheme, duration / steps);
        sample(traj, state);
    }
}

}  // namespace detail

/// Bloch-sphere path of one level pair through a sequence. Instantaneous pulses
/// are split into `steps_per_event` partial rotations so the path stays continuous.
inline BlochTrajectory record_trajectory(const DensityState &initial, const PulseSequence &seq, const LevelScheme &scheme,
                                         const SubspacePair &pair, int steps_per_event = 64, const RunOptions &opts = {}) {
    if (steps_per_event < 8) throw InputError("trajectory needs at least 8 steps per event");
    if (pair.dim() != scheme.dim) throw InputError("pair dimension does not match the system");
    validate_sequence(seq, scheme);
    BlochTrajectory traj{pair, {}, {}};
    DensityState state = initial;
    detail::sample(traj, state);
    const int n = steps_per_event;
    for (const auto &event : seq) {
        if (const auto *h = std::get_if<HardPulse>(&event)) {
            const ComplexMatrix u = hard_pulse_unitary(scheme, h->channel, h->angle / n, h->phase);
            for (int k = 0; k < n; ++k) {
                state = conjugate(state, u);
                detail::sample(traj, state);
            }
        } else if (const auto *d = std::get_if<Delay>(&event)) {
            detail::sampled_delay(traj, state, scheme, d->duration, n);
        } else if (const auto *s = std::get_if<SelectivePulse>(&event)) {
            const auto &tr = scheme.transition(s->transition);
            if (s->model == PulseModel::Gaussian || (opts.force_shaped && s->duration > 0.0)) {
                const DensityState start = state;
                const int every = std::max(1, opts.slices / n);
                int count = 0;
                shaped_pulse_propagator(scheme, tr, s->angle, referenced_phase(tr, s->phase, start.time_s), s->duration,
                                        opts.slices, [&](double t, const ComplexMatrix &u, const ComplexMatrix &) {
                                            if (++count % every) return;
                                            DensityState now = conjugate(start, u);
                                            now.time_s = start.time_s + t;
                                            detail::sample(traj, now);
                                        });
                state = apply_selective_pulse_shaped(start, scheme, s->transition, s->angle, s->phase, s->duration, opts.slices);
                if (count % every) detail::sample(traj, state);
            } else {
                detail::sampled_delay(traj, state, scheme, 0.5 * s->duration, n);
                const ComplexMatrix u = selective_pulse_unitary(scheme, tr, s->angle / n,
                                                                referenced_phase(tr, s->phase, state.time_s), s->include_degenerate);
                for (int k = 0; k < n; ++k) {
                    state = conjugate(state, u);
                    detail::sample(traj, state);
                }
                detail::sampled_delay(traj, state, scheme, 0.5 * s->duration, n);
            }
        } else if (std::holds_alternative<GradientCrusher>(event)) {
            state = apply_gradient_crusher(state);
            detail::sample(traj, state);
        }
    }
    return traj;
}

namespace detail {

inline Vec3 slerp(const Vec3 &a, const Vec3 &b, double t) {
    const double omega = std::acos(std::clamp(a.dot(b), -1.0, 1.0));
    if (omega < 1e-12) return a;
    const double so = std::sin(omega);
    if (so < 1e-9) {
        // antipodal endpoints: any great circle works, pick one through a perpendicular
        Vec3 perp = a.unitOrthogonal();
        return (std::cos(kPi * t) * a + std::sin(kPi * t) * perp).normalized();
    }
    return ((std::sin((1.0 - t) * omega) / so) * a + (std::sin(t * omega) / so) * b).normalized();
}

/// Signed solid angle of the spherical triangle (r, a, b).
inline double triangle_solid_angle(const Vec3 &r, const Vec3 &a, const Vec3 &b) {
    const double num = r.dot(a.cross(b));
    const double den = 1.0 + r.dot(a) + r.dot(b) + a.dot(b);
    return 2.0 * std::atan2(num, den);
}

}  // namespace detail

/// Signed area enclosed by a closed path of unit vectors, positive for
/// counter-clockwise circulation seen from outside the sphere.
inline double solid_angle(const BlochTrajectory &traj, double max_edge = 0.02) {
    if (traj.points.size() < 2 || !traj.closed()) throw InputError("solid angle needs a closed loop");
    for (const auto &p : traj.points)
        if (std::abs(p.norm() - 1.0) > 1e-6) throw InputError("trajectory leaves the unit sphere");
    std::vector<Vec3> loop;
    for (std::size_t i = 0; i + 1 < traj.points.size(); ++i) {
        const Vec3 a = traj.points[i].normalized(), b = traj.points[i + 1].normalized();
        const double angle = std::acos(std::clamp(a.dot(b), -1.0, 1.0));
        const int pieces = std::max(1, static_cast<int>(std::ceil(angle / max_edge)));
        for (int k = 0; k < pieces; ++k) loop.push_back(detail::slerp(a, b, static_cast<double>(k) / pieces));
    }
    if (loop.size() < 3) return 0.0;
    Vec3 centroid = Vec3::Zero(), normal = Vec3::Zero();
    for (std::size_t i = 0; i < loop.size(); ++i) {
        centroid += loop[i];
        normal += loop[i].cross(loop[(i + 1) % loop.size()]);
    }
    centroid /= static_cast<double>(loop.size());
    Vec3 ref = Vec3::UnitZ();
    if (centroid.norm() > 0.1)
        ref = centroid.normalized();
    else if (normal.norm() > 1e-9)
        ref = normal.normalized();
    double omega = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) omega += detail::triangle_solid_angle(ref, loop[i], loop[(i + 1) % loop.size()]);
    return omega;
}

inline BlochTrajectory reversed(const BlochTrajectory &traj) {
    BlochTrajectory out = traj;
    std::reverse(out.points.begin(), out.points.end());
    std::reverse(out.times.begin(), out.times.end());
    return out;
}

struct PhaseDecomposition {
    double total = 0.0;
    double dynamical = 0.0;
    double geometric = 0.0;
};

/// Aharonov-Anandan split of the relative phase acquired by the pair state of rho0
/// (which must be pure within the pair) against its orthogonal partner. Phases are
/// half the relative phase, so a gate diag(e^{i phi}, e^{-i phi}) reports phi.
inline PhaseDecomposition phase_decompose(const DensityState &initial, const PulseSequence &seq, const LevelScheme &scheme,
                                          const SubspacePair &pair, const RunOptions &opts = {}, double cyclic_tol = 1e-3) {
    const Vec3 v = bloch_vector(initial.rho, pair);
    if (std::abs(v.norm() - 1.0) > 1e-6) throw InputError("initial pair state is not pure");
    validate_sequence(seq, scheme);
    const double theta = std::acos(std::clamp(v.z(), -1.0, 1.0));
    const double az = std::atan2(v.y(), v.x());
    ComplexVector psi = ComplexVector::Zero(scheme.dim), perp = ComplexVector::Zero(scheme.dim);
    psi(pair.r()) = std::cos(theta / 2.0);
    psi(pair.s()) = std::exp(Complex(0.0, az)) * std::sin(theta / 2.0);
    perp(pair.r()) = -std::exp(Complex(0.0, -az)) * std::sin(theta / 2.0);
    perp(pair.s()) = std::cos(theta / 2.0);

    const ComplexMatrix h = scheme.hamiltonian();
    ComplexVector a = psi, b = perp;
    double ea = 0.0, eb = 0.0;  // integrated energies
    double t = initial.time_s;
    auto delay = [&](double d) {
        ea += (a.adjoint() * h * a)(0).real() * d;
        eb += (b.adjoint() * h * b)(0).real() * d;
        const ComplexMatrix u = free_propagator(scheme, d);
        a = u * a;
        b = u * b;
        t += d;
    };
    for (const auto &event : seq) {
        if (std::holds_alternative<GradientCrusher>(event)) throw InputError("phase decomposition needs a unitary sequence");
        if (const auto *d = std::get_if<Delay>(&event)) {
            delay(d->duration);
        } else if (const auto *s = std::get_if<SelectivePulse>(&event)) {
            const auto &tr = scheme.transition(s->transition);
            if (s->model == PulseModel::Gaussian || (opts.force_shaped && s->duration > 0.0)) {
                const ComplexVector a0 = a, b0 = b;
                double last = 0.0;
                const ComplexMatrix u = shaped_pulse_propagator(
                    scheme, tr, s->angle, referenced_phase(tr, s->phase, t), s->duration, opts.slices,
                    [&](double now, const ComplexMatrix &uu, const ComplexMatrix &hh) {
                        const ComplexVector x = uu * a0, y = uu * b0;
                        ea += (x.adjoint() * hh * x)(0).real() * (now - last);
                        eb += (y.adjoint() * hh * y)(0).real() * (now - last);
                        last = now;
                    });
                a = u * a0;
                b = u * b0;
                t += s->duration;
            } else {
                delay(0.5 * s->duration);
                const ComplexMatrix u = selective_pulse_unitary(scheme, tr, s->angle, referenced_phase(tr, s->phase, t),
                                                                s->include_degenerate);
                a = u * a;
                b = u * b;
                delay(0.5 * s->duration);
            }
        } else if (const auto *hp = std::get_if<HardPulse>(&event)) {
            const ComplexMatrix u = hard_pulse_unitary(scheme, hp->channel, hp->angle, hp->phase);
            a = u * a;
            b = u * b;
        }
    }
    const Complex oa = psi.adjoint() * a, ob = perp.adjoint() * b;
    if (std::norm(oa) < 1.0 - cyclic_tol) throw InputError("evolution is not cyclic for the initial state");
    PhaseDecomposition out;
    out.total = wrap_phase(0.5 * wrap_phase(std::arg(oa) - std::arg(ob)));
    out.dynamical = wrap_phase(-0.5 * (ea - eb));
    out.geometric = wrap_phase(out.total - out.dynamical);
    return out;
}

inline std::string trajectory_csv(const BlochTrajectory &traj) {
    std::ostringstream out;
    out << std::setprecision(12) << "time,x,y,z\n";
    for (std::size_t i = 0; i < traj.points.size(); ++i)
        out << traj.times[i] << ',' << traj.points[i].x() << ',' << traj.points[i].y() << ',' << traj.points[i].z() << '\n';
    return out.str();
}

inline void export_trajectory_csv(const BlochTrajectory &traj, const std::string &path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << trajectory_csv(traj);
}

}  // namespace geophase
