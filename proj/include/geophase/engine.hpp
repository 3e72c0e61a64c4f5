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

// Pulse-sequence execution on density matrices held in the eigenbasis of the
// internal Hamiltonian.
//
// Time reference: the state carries a sequence clock. A selective pulse with
// phase phi applied at time t is an RF field whose phase in the frame of the
// Hamiltonian is phi + 2*pi*f*t (f = transition frequency), i.e. phi is the
// phase in the frame rotating with the addressed transition. Hard pulses are
// on resonance in their channel frame and are not time referenced.

#include <cmath>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "geophase/algebra.hpp"
#include "geophase/system.hpp"

namespace geophase {

enum class PulseModel { Ideal, Gaussian };

struct HardPulse {
    std::string channel;
    double angle = 0.0;
    double phase = 0.0;
};

struct SelectivePulse {
    std::string transition;
    double angle = 0.0;
    double phase = 0.0;
    double duration = 0.0;  // ideal model: split into two delays around an instantaneous pulse
    PulseModel model = PulseModel::Ideal;
    bool include_degenerate = true;  // ideal model: also drive lines degenerate with the target
};

struct Delay {
    double duration = 0.0;
};

struct GradientCrusher {};

struct AcquireMarker {
    std::string channel;
};

using PulseEvent = std::variant<HardPulse, SelectivePulse, Delay, GradientCrusher, AcquireMarker>;
using PulseSequence = std::vector<PulseEvent>;

struct RunOptions {
    bool force_shaped = false;  // run every selective pulse with a Gaussian envelope
    int slices = 1024;
};

inline constexpr int kMinSlices = 64;

inline double event_duration(const PulseEvent &event) {
    if (const auto *d = std::get_if<Delay>(&event)) return d->duration;
    if (const auto *s = std::get_if<SelectivePulse>(&event)) return s->duration;
    return 0.0;
}

inline double sequence_duration(const PulseSequence &seq) {
    double t = 0.0;
    for (const auto &e : seq) t += event_duration(e);
    return t;
}

/// Throws SequenceError naming the first malformed event.
inline void validate_sequence(const PulseSequence &seq, const LevelScheme &scheme) {
    for (std::size_t i = 0; i < seq.size(); ++i) {
        const auto &event = seq[i];
        try {
            if (const auto *h = std::get_if<HardPulse>(&event)) {
                if (!std::isfinite(h->angle) || !std::isfinite(h->phase)) throw InputError("non-finite pulse parameter");
                (void)scheme.ops(h->channel);
            } else if (const auto *s = std::get_if<SelectivePulse>(&event)) {
                if (!std::isfinite(s->angle) || !std::isfinite(s->phase)) throw InputError("non-finite pulse parameter");
                if (!std::isfinite(s->duration) || s->duration < 0.0) throw InputError("negative pulse duration");
                if (s->model == PulseModel::Gaussian && s->duration <= 0.0)
                    throw InputError("shaped pulse needs a positive duration");
                (void)scheme.transition(s->transition);
            } else if (const auto *d = std::get_if<Delay>(&event)) {
                if (!std::isfinite(d->duration) || d->duration < 0.0) throw InputError("negative delay");
            } else if (const auto *a = std::get_if<AcquireMarker>(&event)) {
                (void)scheme.ops(a->channel);
            }
        } catch (const SequenceError &) {
            throw;
        } catch (const InputError &e) {
            throw SequenceError(i, e.what());
        }
    }
}

/// exp(-i H t) for the (diagonal) eigenbasis Hamiltonian.
inline ComplexMatrix free_propagator(const LevelScheme &scheme, double t) {
    ComplexMatrix u = ComplexMatrix::Zero(scheme.dim, scheme.dim);
    for (std::size_t i = 0; i < scheme.dim; ++i) u(i, i) = std::exp(Complex(0.0, -scheme.energies(i) * t));
    return u;
}

inline ComplexMatrix hard_pulse_unitary(const LevelScheme &scheme, const std::string &channel, double angle, double phase) {
    const auto &ops = scheme.ops(channel);
    const ComplexMatrix g = std::cos(phase) * ops.fx() + std::sin(phase) * ops.fy();
    return exp_hermitian(g, angle);
}

/// Generator of an instantaneous pulse on `t` with phase `phase` in the frame of that
/// transition. Scaled so the target pair sees exactly subspace_rotation; degenerate
/// lines rotate by the ratio of their transition moments.
inline ComplexMatrix selective_generator(const LevelScheme &scheme, const Transition &t, double phase, bool include_degenerate) {
    const auto &cat = scheme.catalog(t.channel);
    const double norm = std::abs(t.moment);
    const Complex u = t.moment / norm;
    ComplexMatrix g = ComplexMatrix::Zero(scheme.dim, scheme.dim);
    auto add = [&](const Transition &line) {
        const Complex c = std::exp(Complex(0.0, -phase)) * std::conj(u) * line.moment / (2.0 * norm);
        g(line.upper, line.lower) += c;
        g(line.lower, line.upper) += std::conj(c);
    };
    if (include_degenerate) {
        for (const auto *line : cat.degenerate_with(t)) add(*line);
    } else {
        add(t);
    }
    return g;
}

inline ComplexMatrix selective_pulse_unitary(const LevelScheme &scheme, const Transition &t, double angle, double phase,
                                             bool include_degenerate = true) {
    return exp_hermitian(selective_generator(scheme, t, phase, include_degenerate), angle);
}

/// Phase of the RF in the Hamiltonian frame for a pulse centred at time `t`.
inline double referenced_phase(const Transition &tr, double phase, double t) {
    return phase + kTwoPi * tr.frequency_hz * t;
}

/// Called after every slice with the elapsed time inside the pulse, the propagator
/// accumulated so far and the instantaneous total Hamiltonian (both in the frame of H).
using SliceObserver = std::function<void(double, const ComplexMatrix &, const ComplexMatrix &)>;

/// Gaussian-shaped selective pulse starting at the frame phase `phase` (already time
/// referenced to the pulse start). Propagated in the interaction frame of H with all
/// lines of the channel driven; returns the full propagator over the pulse.
inline ComplexMatrix shaped_pulse_propagator(const LevelScheme &scheme, const Transition &t, double angle, double phase,
                                             double duration, int slices = 1024, const SliceObserver &observer = {}) {
    if (slices < kMinSlices) throw InputError("shaped pulse needs at least 64 slices");
    if (!(duration > 0.0) || !std::isfinite(duration)) throw InputError("shaped pulse needs a positive duration");
    const double sigma = duration / 6.0;
    const double dt = duration / slices;
    std::vector<double> env(static_cast<std::size_t>(slices));
    double area = 0.0;
    for (int j = 0; j < slices; ++j) {
        const double s = (j + 0.5) * dt - 0.5 * duration;
        env[j] = std::abs(s) <= 3.0 * sigma ? std::exp(-s * s / (2.0 * sigma * sigma)) : 0.0;
        area += env[j] * dt;
    }
    const double norm = std::abs(t.moment);
    const double amp = angle / (norm * area);
    const Complex u = t.moment / norm;
    const Complex rot = std::exp(Complex(0.0, -phase)) * std::conj(u);
    const double omega = kTwoPi * t.frequency_hz;
    const auto &fplus = scheme.ops(t.channel).fplus;
    struct Line {
        std::size_t a, b;
        Complex m;
        double detuning;
    };
    std::vector<Line> lines;
    for (std::size_t a = 0; a < scheme.dim; ++a)
        for (std::size_t b = 0; b < scheme.dim; ++b)
            if (a != b && std::abs(fplus(a, b)) > 1e-12)
                lines.push_back({a, b, fplus(a, b), scheme.energies(a) - scheme.energies(b) - omega});

    ComplexMatrix acc = ComplexMatrix::Identity(scheme.dim, scheme.dim);
    ComplexMatrix h = ComplexMatrix::Zero(scheme.dim, scheme.dim);
    for (int j = 0; j < slices; ++j) {
        const double s = (j + 0.5) * dt;
        h.setZero();
        for (const auto &l : lines) {
            const Complex c = 0.5 * amp * env[j] * l.m * rot * std::exp(Complex(0.0, l.detuning * s));
            h(l.a, l.b) += c;
            h(l.b, l.a) += std::conj(c);
        }
        acc = exp_hermitian(h, dt) * acc;
        if (observer) {
            const double end = (j + 1) * dt;
            const ComplexMatrix f = free_propagator(scheme, end);
            ComplexMatrix total = scheme.hamiltonian() + f * h * f.adjoint();
            observer(end, f * acc, total);
        }
    }
    return free_propagator(scheme, duration) * acc;
}

inline DensityState conjugate(const DensityState &state, const ComplexMatrix &u) {
    DensityState out = state;
    out.rho = u * state.rho * u.adjoint();
    return out;
}

inline DensityState apply_hard_pulse(const DensityState &state, const LevelScheme &scheme, const std::string &channel,
                                     double angle, double phase) {
    return conjugate(state, hard_pulse_unitary(scheme, channel, angle, phase));
}

/// Instantaneous selective rotation at the state's current time.
inline DensityState apply_selective_pulse_ideal(const DensityState &state, const LevelScheme &scheme,
                                                const std::string &transition, double angle, double phase,
                                                bool include_degenerate = true) {
    const auto &t = scheme.transition(transition);
    return conjugate(state, selective_pulse_unitary(scheme, t, angle, referenced_phase(t, phase, state.time_s),
                                                    include_degenerate));
}

inline DensityState apply_selective_pulse_shaped(const DensityState &state, const LevelScheme &scheme,
                                                 const std::string &transition, double angle, double phase,
                                                 double duration, int slices = 1024) {
    const auto &t = scheme.transition(transition);
    DensityState out = conjugate(state, shaped_pulse_propagator(scheme, t, angle, referenced_phase(t, phase, state.time_s),
                                                                duration, slices));
    out.time_s += duration;
    return out;
}

inline DensityState free_evolve(const DensityState &state, const LevelScheme &scheme, double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw InputError("free evolution time must be non-negative");
    DensityState out = state;
    for (std::size_t i = 0; i < scheme.dim; ++i)
        for (std::size_t j = 0; j < scheme.dim; ++j)
            out.rho(i, j) *= std::exp(Complex(0.0, -(scheme.energies(i) - scheme.energies(j)) * t));
    out.time_s += t;
    return out;
}

/// Idealized crusher: removes every coherence in the eigenbasis.
inline DensityState apply_gradient_crusher(const DensityState &state) {
    DensityState out = state;
    const ComplexVector d = state.rho.diagonal();
    out.rho.setZero();
    out.rho.diagonal() = d;
    return out;
}

inline PulseSequence spin_echo_block(const std::string &channel, double tau, double phase = kPi / 2.0) {
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw InputError("echo delay must be non-negative");
    return {Delay{tau}, HardPulse{channel, kPi, phase}, Delay{tau}};
}

/// k full periods of a splitting `delta_hz`.
inline double refocusing_delay(double delta_hz, int k) {
    if (!(delta_hz > 0.0) || !std::isfinite(delta_hz)) throw InputError("splitting must be positive");
    if (k < 1) throw InputError("period count must be at least 1");
    return k / delta_hz;
}

/// Unitary of one event starting at time `t`. Crushers and markers have none.
inline ComplexMatrix event_propagator(const PulseEvent &event, const LevelScheme &scheme, double t,
                                      const RunOptions &opts = {}) {
    const std::size_t n = scheme.dim;
    if (const auto *h = std::get_if<HardPulse>(&event)) return hard_pulse_unitary(scheme, h->channel, h->angle, h->phase);
    if (const auto *d = std::get_if<Delay>(&event)) return free_propagator(scheme, d->duration);
    if (const auto *s = std::get_if<SelectivePulse>(&event)) {
        const auto &tr = scheme.transition(s->transition);
        if (s->model == PulseModel::Gaussian || (opts.force_shaped && s->duration > 0.0))
            return shaped_pulse_propagator(scheme, tr, s->angle, referenced_phase(tr, s->phase, t), s->duration, opts.slices);
        const double half = 0.5 * s->duration;
        const ComplexMatrix half_free = free_propagator(scheme, half);
        return half_free *
               selective_pulse_unitary(scheme, tr, s->angle, referenced_phase(tr, s->phase, t + half), s->include_degenerate) *
               half_free;
    }
    if (std::holds_alternative<GradientCrusher>(event)) throw InputError("gradient crusher is not unitary");
    return ComplexMatrix::Identity(n, n);
}

inline DensityState run_sequence(const DensityState &initial, const PulseSequence &seq, const LevelScheme &scheme,
                                 const RunOptions &opts = {}) {
    validate_sequence(seq, scheme);
    DensityState state = initial;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        const auto &event = seq[i];
        if (std::holds_alternative<GradientCrusher>(event)) {
            state = apply_gradient_crusher(state);
        } else if (!std::holds_alternative<AcquireMarker>(event)) {
            try {
                state = conjugate(state, event_propagator(event, scheme, state.time_s, opts));
            } catch (const InputError &e) {
                throw SequenceError(i, e.what());
            }
            state.time_s += event_duration(event);
        }
    }
    return state;
}

/// Total propagator of a crusher-free sequence started at time `t0`.
inline ComplexMatrix sequence_propagator(const PulseSequence &seq, const LevelScheme &scheme, const RunOptions &opts = {},
                                         double t0 = 0.0) {
    validate_sequence(seq, scheme);
    ComplexMatrix u = ComplexMatrix::Identity(scheme.dim, scheme.dim);
    double t = t0;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (std::holds_alternative<GradientCrusher>(seq[i]))
            throw SequenceError(i, "gradient crusher has no propagator");
        u = event_propagator(seq[i], scheme, t, opts) * u;
        t += event_duration(seq[i]);
    }
    return u;
}

inline PulseSequence concat(PulseSequence a, const PulseSequence &b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace geophase
