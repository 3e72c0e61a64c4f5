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

#include <gtest/gtest.h>

#include <random>

#include "geophase/engine.hpp"
#include "geophase/molecules.hpp"

using namespace geophase;

namespace {

const LevelScheme &ch3cn() {
    static const LevelScheme s = build_scheme(ch3cn_spec());
    return s;
}
const LevelScheme &ch3i() {
    static const LevelScheme s = build_scheme(ch3i_spec());
    return s;
}
const LevelScheme &ch2fcn() {
    static const LevelScheme s = build_scheme(ch2fcn_spec());
    return s;
}

double block_fidelity(const ComplexMatrix &a, const ComplexMatrix &b) {
    return std::abs((a.adjoint() * b).trace()) / static_cast<double>(a.rows());
}

DensityState random_state(std::size_t dim, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g;
    ComplexMatrix m(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) m(i, j) = Complex(g(rng), g(rng));
    return {0.5 * (m + m.adjoint()), 0.0};
}

}  // namespace

TEST(HardPulse, RotatesMagnetization) {
    const auto &s = ch3i();
    const auto &h = s.ops("H");
    const ComplexMatrix u = hard_pulse_unitary(s, "H", kPi / 2.0, kPi / 2.0);
    EXPECT_TRUE(is_unitary(u));
    EXPECT_LE(max_abs(u * h.fz * u.adjoint() - h.fx()), 1e-12);
    const ComplexMatrix v = hard_pulse_unitary(s, "H", kPi / 2.0, 0.0);
    EXPECT_LE(max_abs(v * h.fz * v.adjoint() + h.fy()), 1e-12);
    // the other channel is untouched
    EXPECT_LE(max_abs(u * s.ops("C").fz * u.adjoint() - s.ops("C").fz), 1e-12);
    EXPECT_THROW(hard_pulse_unitary(s, "N", kPi, 0.0), InputError);
}

TEST(SelectivePulse, IsolatedLineMatchesSubspaceRotation) {
    const auto &s = ch3cn();
    const auto &t = s.transition("1");
    for (double angle : {kPi / 3.0, kPi, kTwoPi})
        for (double phase : {0.0, 1.0, kPi / 2.0}) {
            const ComplexMatrix u = selective_pulse_unitary(s, t, angle, phase, false);
            EXPECT_LE(max_abs(u - subspace_rotation(s.dim, t.pair(s.dim), angle, phase)), 1e-12);
        }
}

TEST(SelectivePulse, IdentityOutsideTargetPair) {
    for (const LevelScheme *s : {&ch3i(), &ch3cn(), &ch2fcn()})
        for (const auto &[channel, cat] : s->catalogs)
            for (const auto &t : cat.transitions) {
                const ComplexMatrix u = selective_pulse_unitary(*s, t, 1.234, 0.7, false);
                for (std::size_t i = 0; i < s->dim; ++i)
                    for (std::size_t j = 0; j < s->dim; ++j) {
                        if ((i == t.upper || i == t.lower) && (j == t.upper || j == t.lower)) continue;
                        EXPECT_NEAR(std::abs(u(i, j) - Complex(i == j ? 1.0 : 0.0, 0.0)), 0.0, 1e-12) << t.label;
                    }
            }
}

TEST(SelectivePulse, DegeneratePartnersScaleWithMoment) {
    const auto &s = ch3cn();
    const auto &t = s.transition("2");
    const ComplexMatrix g = selective_generator(s, t, 0.3, true);
    EXPECT_TRUE(is_hermitian(g));
    const auto &cat = s.catalog("H");
    ASSERT_EQ(cat.degenerate_with(t).size(), 3u);
    for (const auto *line : cat.degenerate_with(t))
        EXPECT_NEAR(std::abs(g(line->upper, line->lower)), 0.5 * std::abs(line->moment) / std::abs(t.moment), 1e-12) << line->label;
    const ComplexMatrix lone = selective_generator(s, t, 0.3, false);
    EXPECT_EQ(std::abs(lone(cat.find("4")->upper, cat.find("4")->lower)), 0.0);
}

TEST(SelectivePulse, FullTurnIsPhaseFlipOnPair) {
    const auto &s = ch3i();
    const auto &t = s.transition("h2");
    const ComplexMatrix u = selective_pulse_unitary(s, t, kTwoPi, kPi / 2.0);
    ComplexMatrix expected = ComplexMatrix::Identity(s.dim, s.dim);
    expected(t.upper, t.upper) = -1.0;
    expected(t.lower, t.lower) = -1.0;
    EXPECT_LE(max_abs(u - expected), 1e-12);
    // same as the pulse pair y, y + pi - phi with phi = pi
    const ComplexMatrix pair =
        selective_pulse_unitary(s, t, kPi, kPi / 2.0 + kPi - kPi) * selective_pulse_unitary(s, t, kPi, kPi / 2.0);
    EXPECT_LE(max_abs(pair - expected), 1e-12);
}

TEST(SelectivePulse, PhaseIsReferencedToSequenceClock) {
    const auto &s = ch3i();
    const auto &t = s.transition("C2");
    for (double delay : {0.0, 1.37e-4, 2.9e-3}) {
        const PulseSequence seq{Delay{delay}, SelectivePulse{"C2", kPi / 2.0, 0.4, 0.0}};
        const ComplexMatrix u = sequence_propagator(seq, s);
        EXPECT_LE(max_abs(u - free_propagator(s, delay) * selective_pulse_unitary(s, t, kPi / 2.0, 0.4)), 1e-10) << delay;
    }
    EXPECT_NEAR(referenced_phase(t, 0.4, 1e-3), 0.4 + kTwoPi * t.frequency_hz * 1e-3, 1e-12);
}

TEST(SelectivePulse, IdealDurationSplitsIntoDelays) {
    const auto &s = ch3cn();
    const PulseSequence a{SelectivePulse{"1", kPi, 0.2, 2e-3}};
    const PulseSequence b{Delay{1e-3}, SelectivePulse{"1", kPi, 0.2, 0.0}, Delay{1e-3}};
    EXPECT_LE(max_abs(sequence_propagator(a, s) - sequence_propagator(b, s)), 1e-10);
    EXPECT_DOUBLE_EQ(sequence_duration(a), 2e-3);
}

TEST(SelectivePulse, PulsePairGateOnCoherences) {
    // pi_y then pi_(y + pi - phi) on (2,3) of a 4-level system
    const auto &s = ch3cn();
    const auto &t = s.transition("2");
    ASSERT_EQ(t.upper, 1u);
    ASSERT_EQ(t.lower, 2u);
    const double phi = 0.9;
    const ComplexMatrix u =
        selective_pulse_unitary(s, t, kPi, kPi / 2.0 + kPi - phi, false) * selective_pulse_unitary(s, t, kPi, kPi / 2.0, false);
    auto x = [&](std::size_t r, std::size_t q) { return single_transition_op(s.dim, SubspacePair(r, q, s.dim), Axis::X); };
    auto y = [&](std::size_t r, std::size_t q) { return single_transition_op(s.dim, SubspacePair(r, q, s.dim), Axis::Y); };
    EXPECT_LE(max_abs(u * x(1, 2) * u.adjoint() - (std::cos(2 * phi) * x(1, 2) - std::sin(2 * phi) * y(1, 2))), 1e-12);
    EXPECT_LE(max_abs(u * x(0, 1) * u.adjoint() - (std::cos(phi) * x(0, 1) + std::sin(phi) * y(0, 1))), 1e-12);
    EXPECT_LE(max_abs(u * x(2, 3) * u.adjoint() - (std::cos(phi) * x(2, 3) + std::sin(phi) * y(2, 3))), 1e-12);
}

TEST(RunSequence, PreservesHermiticityTraceAndSpectrum) {
    const auto &s = ch3i();
    const DensityState init = random_state(s.dim, 7);
    const PulseSequence seq{HardPulse{"H", kPi / 2.0, 0.0}, Delay{3e-4}, SelectivePulse{"h1", kPi, 1.0, 1e-3},
                            HardPulse{"C", kPi / 3.0, 0.4}, Delay{1.1e-3}, SelectivePulse{"C3", kPi / 2.0, 0.0, 0.0}};
    const DensityState out = run_sequence(init, seq, s);
    EXPECT_TRUE(is_hermitian(out.rho, 1e-10));
    EXPECT_NEAR(std::abs(out.rho.trace() - init.rho.trace()), 0.0, 1e-10);
    EXPECT_NEAR((out.rho * out.rho).trace().real(), (init.rho * init.rho).trace().real(), 1e-9);
    EXPECT_NEAR(out.time_s, sequence_duration(seq), 1e-15);
    const ComplexMatrix u = sequence_propagator(seq, s);
    EXPECT_TRUE(is_unitary(u, 1e-10));
    EXPECT_LE(max_abs(out.rho - u * init.rho * u.adjoint()), 1e-10);
}

TEST(RunSequence, ErrorsNameTheEvent) {
    const auto &s = ch3cn();
    const DensityState init = equilibrium_state(s);
    try {
        run_sequence(init, {Delay{1e-3}, SelectivePulse{"h9", kPi, 0.0, 0.0}}, s);
        FAIL();
    } catch (const SequenceError &e) {
        EXPECT_EQ(e.index(), 1u);
    }
    EXPECT_THROW(run_sequence(init, {Delay{-1.0}}, s), SequenceError);
    EXPECT_THROW(run_sequence(init, {HardPulse{"C", kPi, 0.0}}, s), SequenceError);
    EXPECT_THROW(sequence_propagator({GradientCrusher{}}, s), SequenceError);
}

TEST(FreeEvolution, PhasesCoherencesByTransitionFrequency) {
    const auto &s = ch3cn();
    DensityState init{ComplexMatrix::Zero(s.dim, s.dim), 0.0};
    const auto &t = s.transition("1");
    init.rho(t.upper, t.lower) = 1.0;
    init.rho(t.lower, t.upper) = 1.0;
    const double time = 5.229e-3;
    const DensityState out = free_evolve(init, s, time);
    EXPECT_NEAR(std::arg(out.rho(t.upper, t.lower) * std::exp(Complex(0.0, kTwoPi * t.frequency_hz * time))), 0.0, 1e-9);
    EXPECT_NEAR(out.time_s, time, 1e-15);
    const DensityState via_prop = conjugate(init, free_propagator(s, time));
    EXPECT_LE(max_abs(out.rho - via_prop.rho), 1e-12);
    EXPECT_THROW(free_evolve(init, s, -1e-3), InputError);
    // diagonal (populations) are stationary
    const DensityState eq = equilibrium_state(s);
    EXPECT_LE(max_abs(free_evolve(eq, s, time).rho - eq.rho), 1e-15);
}

TEST(SpinEcho, RefocusesHeteronuclearCoupling) {
    const auto &s = ch3i();
    auto uncoupled = ch3i_spec();
    uncoupled.hetero.clear();
    const ComplexMatrix h_rest = s.basis.adjoint() * build_hamiltonian(uncoupled) * s.basis;
    for (double tau : {1e-4, 7.3e-4, 2.1e-3}) {
        const ComplexMatrix echo = sequence_propagator(spin_echo_block("C", tau), s);
        const ComplexMatrix expected = hard_pulse_unitary(s, "C", kPi, kPi / 2.0) * exp_hermitian(h_rest, 2.0 * tau);
        EXPECT_LE(max_abs(echo - expected), 1e-9) << tau;
    }
    EXPECT_EQ(spin_echo_block("H", 1e-3).size(), 3u);
    EXPECT_THROW(spin_echo_block("H", -1.0), InputError);
}

TEST(SpinEcho, RefocusingDelay) {
    EXPECT_DOUBLE_EQ(refocusing_delay(3553.0, 1), 1.0 / 3553.0);
    EXPECT_DOUBLE_EQ(refocusing_delay(473.0, 3), 3.0 / 473.0);
    EXPECT_THROW(refocusing_delay(0.0, 1), InputError);
    EXPECT_THROW(refocusing_delay(100.0, 0), InputError);
    // a full period of a splitting returns the coherence to its starting phase
    const auto &s = ch2fcn();
    const auto &f1 = s.transition("F1");
    const auto &f3 = s.transition("F3");
    const double delta = f1.frequency_hz - f3.frequency_hz;
    const ComplexMatrix u = free_propagator(s, refocusing_delay(delta, 1));
    const Complex a = u(f1.upper, f1.upper) * std::conj(u(f1.lower, f1.lower));
    const Complex b = u(f3.upper, f3.upper) * std::conj(u(f3.lower, f3.lower));
    EXPECT_NEAR(std::abs(a - b), 0.0, 1e-9);
}

TEST(Crusher, KeepsPopulationsOnlyAndIsIdempotent) {
    const DensityState init = random_state(8, 3);
    const DensityState once = apply_gradient_crusher(init);
    const DensityState twice = apply_gradient_crusher(once);
    EXPECT_EQ(once.rho, twice.rho);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) EXPECT_EQ(once.rho(i, j), i == j ? init.rho(i, j) : Complex(0.0, 0.0));
    const DensityState viaseq = run_sequence(init, {GradientCrusher{}}, ch3cn());
    EXPECT_EQ(viaseq.rho, once.rho);
}

TEST(ShapedPulse, ApproachesIdealWithDuration) {
    const auto &s = ch3cn();
    double last = 0.0;
    for (double duration : {5e-4, 1e-3, 2e-3, 4e-3}) {
        const SelectivePulse ideal{"1", kPi, kPi / 2.0, duration};
        SelectivePulse shaped = ideal;
        shaped.model = PulseModel::Gaussian;
        const ComplexMatrix a = event_propagator(ideal, s, 0.0), b = event_propagator(shaped, s, 0.0);
        EXPECT_TRUE(is_unitary(b, 1e-9));
        const double f = block_fidelity(s.symmetric_block(a), s.symmetric_block(b));
        EXPECT_GT(f, last) << duration;
        last = f;
    }
    EXPECT_GT(last, 0.999);
}

TEST(ShapedPulse, OffTargetTransferBelowOnePercent) {
    const auto &s = ch3i();
    const auto &t = s.transition("h1");
    const ComplexMatrix u = shaped_pulse_propagator(s, t, kPi, kPi / 2.0, 2e-3, 512);
    for (std::size_t i = 0; i < s.dim; ++i) {
        if (i == t.upper || i == t.lower) continue;
        EXPECT_LE(1.0 - std::norm(u(i, i)), 0.01) << i;
    }
    EXPECT_GE(std::norm(u(t.upper, t.lower)), 0.99);
}

TEST(ShapedPulse, ObserverSeesEverySlice) {
    const auto &s = ch3cn();
    const auto &t = s.transition("1");
    int calls = 0;
    double last_time = 0.0;
    ComplexMatrix last_u;
    const ComplexMatrix u = shaped_pulse_propagator(s, t, kPi, 0.0, 1e-3, 64, [&](double time, const ComplexMatrix &uu, const ComplexMatrix &h) {
        ++calls;
        EXPECT_GT(time, last_time);
        EXPECT_TRUE(is_hermitian(h, 1e-6));
        last_time = time;
        last_u = uu;
    });
    EXPECT_EQ(calls, 64);
    EXPECT_NEAR(last_time, 1e-3, 1e-15);
    EXPECT_LE(max_abs(last_u - u), 1e-12);
}

TEST(ShapedPulse, RejectsBadParameters) {
    const auto &s = ch3cn();
    const auto &t = s.transition("1");
    EXPECT_THROW(shaped_pulse_propagator(s, t, kPi, 0.0, 1e-3, 63), InputError);
    EXPECT_THROW(shaped_pulse_propagator(s, t, kPi, 0.0, 0.0, 128), InputError);
    EXPECT_THROW(run_sequence(equilibrium_state(s), {SelectivePulse{"1", kPi, 0.0, 0.0, PulseModel::Gaussian}}, s), SequenceError);
}

TEST(ShapedPulse, ForceShapedOption) {
    const auto &s = ch3cn();
    const PulseSequence seq{SelectivePulse{"1", kPi, 0.0, 1e-3}};
    RunOptions opts;
    opts.force_shaped = true;
    opts.slices = 256;
    const ComplexMatrix forced = sequence_propagator(seq, s, opts);
    SelectivePulse g{"1", kPi, 0.0, 1e-3, PulseModel::Gaussian};
    EXPECT_LE(max_abs(forced - shaped_pulse_propagator(s, s.transition("1"), kPi, 0.0, 1e-3, 256)), 1e-12);
    EXPECT_LE(max_abs(forced - sequence_propagator({g}, s, opts)), 1e-12);
    EXPECT_GT(max_abs(forced - sequence_propagator(seq, s)), 1e-6);
}
