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

#include <array>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "geophase/engine.hpp"
#include "geophase/molecules.hpp"
#include "geophase/spectrum.hpp"

namespace geophase {

// ---------------------------------------------------------------------------
// Preparation sequences

struct SossOptions {
    double ch2fcn_f2_angle = 2.0 * kPi / 3.0;  // equalizes the three fluorine lines
};

inline SelectivePulse sel(const std::string &label, double angle, double phase = kPi / 2.0) {
    return SelectivePulse{label, angle, phase, 0.0, PulseModel::Ideal, true};
}

/// Selection of symmetric states for one of the bundled templates.
inline PulseSequence soss_sequence(const std::string &template_name, const SossOptions &opts = {}) {
    if (template_name == "ch3i")
        return {sel("h3", kPi), sel("h4", kPi), GradientCrusher{}, sel("h3", kPi), sel("h4", kPi)};
    if (template_name == "ch3cn") return {sel("2", kPi), GradientCrusher{}, sel("2", kPi)};
    if (template_name == "ch2fcn")
        return {HardPulse{"F", kPi / 2.0, kPi / 2.0}, GradientCrusher{}, sel("H2", kPi), sel("H3", kPi),
                sel("F2", opts.ch2fcn_f2_angle), GradientCrusher{}};
    throw InputError("no SOSS sequence for template '" + template_name + "'");
}

/// |00> pseudopure state of the CH3CN symmetric manifold.
inline PulseSequence pps_sequence(const std::string &template_name = "ch3cn") {
    if (template_name != "ch3cn") throw InputError("pseudopure preparation is defined for ch3cn only");
    return {sel("3", kPi), sel("2", kPi / 2.0), GradientCrusher{}};
}

// ---------------------------------------------------------------------------
// Geometric phase gates

/// Controlled phase gate diag(.., e^{i phi} at r, .., e^{-i phi} at s, ..) on a transition (r < s).
struct DGate {
    std::string transition;
    double phi = 0.0;
};

inline ComplexMatrix d_gate_unitary(const LevelScheme &scheme, const DGate &g) {
    const auto &t = scheme.transition(g.transition);
    const std::size_t n = scheme.symmetric_count;
    const std::size_t r = std::min(t.upper, t.lower), s = std::max(t.upper, t.lower);
    if (s >= n) throw InputError("transition " + g.transition + " is outside the symmetric manifold");
    ComplexMatrix d = ComplexMatrix::Identity(n, n);
    d(r, r) = std::exp(Complex(0.0, g.phi));
    d(s, s) = std::exp(Complex(0.0, -g.phi));
    return d;
}

/// Table-style 6x6 gate on the CH2FCN symmetric manifold.
inline ComplexMatrix d_gate_unitary(const DGate &g) {
    static const LevelScheme scheme = build_scheme(ch2fcn_spec());
    return d_gate_unitary(scheme, g);
}

inline ComplexMatrix d_gate_product(const LevelScheme &scheme, const std::vector<DGate> &gates) {
    ComplexMatrix u = ComplexMatrix::Identity(scheme.symmetric_count, scheme.symmetric_count);
    for (const auto &g : gates) u = d_gate_unitary(scheme, g) * u;
    return u;
}

struct GateOptions {
    std::string echo_channel = "auto";  // "auto": template default, "": no echo
    double pulse_duration = 0.0;        // per selective pulse
    PulseModel model = PulseModel::Ideal;
    bool merge_pi = false;  // phi = pi as a single (2 pi)_y pulse
    bool whole_periods = true;  // round each pulse to whole periods of its own line
};

inline std::string default_echo_channel(const SpinSystemSpec &spec) {
    if (spec.template_name == "ch3i") return "H";
    if (spec.template_name == "ch2fcn") return "F";
    if (spec.template_name == "ch3cn") return "";
    for (const auto &c : spec.channels)
        if (c.species != spec.group.channel) return c.species;
    return "";
}

/// Selective pulse length at which the dominant splitting completes whole periods.
inline double default_pulse_duration(const SpinSystemSpec &spec) {
    if (spec.template_name == "ch3i") return refocusing_delay(3553.0, 20);
    if (spec.template_name == "ch3cn") return refocusing_delay(4968.0, 26);
    if (spec.template_name == "ch2fcn") return refocusing_delay(473.0, 6);
    throw InputError("no default selective pulse length for this system");
}

/// Level energies (Hz) on the symmetric manifold averaged over the two halves of an
/// echo on `echo_channel`; the plain energies when no echo is used.
inline std::vector<double> residual_energies(const LevelScheme &scheme, const std::string &echo_channel) {
    std::vector<double> e(scheme.symmetric_count);
    ComplexMatrix p;
    if (!echo_channel.empty()) p = hard_pulse_unitary(scheme, echo_channel, kPi, kPi / 2.0);
    for (std::size_t i = 0; i < scheme.symmetric_count; ++i) {
        if (echo_channel.empty()) {
            e[i] = scheme.levels[i].energy_hz;
            continue;
        }
        Eigen::Index j = 0;
        const double w = p.col(static_cast<Eigen::Index>(i)).cwiseAbs().maxCoeff(&j);
        if (std::abs(w - 1.0) > 1e-9 || static_cast<std::size_t>(j) >= scheme.symmetric_count)
            throw InputError("echo on " + echo_channel + " does not permute the symmetric levels");
        e[i] = 0.5 * (scheme.levels[i].energy_hz + scheme.levels[j].energy_hz);
    }
    return e;
}

/// Smallest nonzero difference of the residual energies; every difference must be an
/// integer multiple of it. Zero when all residual energies coincide.
inline double residual_frequency(const std::vector<double> &e) {
    double scale = 1.0;
    for (double x : e) scale = std::max(scale, std::abs(x));
    const double tol = 1e-9 * scale;
    double f0 = 0.0;
    for (double a : e)
        for (double b : e) {
            const double d = std::abs(a - b);
            if (d > tol && (f0 == 0.0 || d < f0)) f0 = d;
        }
    if (f0 == 0.0) return 0.0;
    for (double a : e)
        for (double b : e) {
            const double q = std::abs(a - b) / f0;
            if (std::abs(q - std::round(q)) > 1e-6)
                throw InputError("residual splittings are incommensurate; no common refocusing period");
        }
    return f0;
}

inline PulseSequence gate_pulses(const DGate &g, const GateOptions &opts) {
    const double phi = wrap_phase(g.phi);
    if (std::abs(phi) < 1e-12) return {};
    auto pulse = [&](double angle, double phase) {
        return SelectivePulse{g.transition, angle, phase, opts.pulse_duration, opts.model, true};
    };
    if (opts.merge_pi && std::abs(std::abs(phi) - kPi) < 1e-12) return {pulse(kTwoPi, kPi / 2.0)};
    // y then y + pi - phi leaves e^{+i phi} on the lower-index level
    return {pulse(kPi, kPi / 2.0), pulse(kPi, kPi / 2.0 + kPi - phi)};
}

struct GateLayout {
    PulseSequence sequence;
    std::string echo_channel;
    double tau = 0.0;    // echo half-period (0 without echo)
    double total = 0.0;  // sequence length
    ComplexMatrix target;  // on the symmetric manifold
};

/// Gate pulses with the refocusing that removes the internal Hamiltonian from the
/// symmetric manifold. With an echo channel: [tau, pi_y, 2 tau, pi_-y, gates, pad], the
/// gates occupying the last tau; 4 tau is a multiple of 2/f0 of the residual splitting.
/// Without: [gates, pad] lasting a multiple of 2/f0 of the bare splittings.
inline GateLayout geometric_gate_layout(const LevelScheme &scheme, const std::vector<DGate> &gates, GateOptions opts = {}) {
    GateLayout out;
    out.echo_channel = opts.echo_channel == "auto" ? default_echo_channel(scheme.spec) : opts.echo_channel;
    if (!out.echo_channel.empty()) (void)scheme.ops(out.echo_channel);
    out.target = d_gate_product(scheme, gates);
    PulseSequence pulses;
    for (const auto &g : gates) {
        GateOptions local = opts;
        const double f = std::abs(scheme.transition(g.transition).frequency_hz);
        if (opts.whole_periods && opts.pulse_duration > 0.0 && f > 0.0)
            local.pulse_duration = std::max(1.0, std::round(opts.pulse_duration * f)) / f;
        pulses = concat(std::move(pulses), gate_pulses(g, local));
    }
    const double gate_time = sequence_duration(pulses);
    const double f0 = residual_frequency(residual_energies(scheme, out.echo_channel));
    if (out.echo_channel.empty()) {
        double total = gate_time;
        if (f0 > 0.0) {
            const double unit = 2.0 / f0;
            total = std::max(1.0, std::ceil(gate_time / unit - 1e-9)) * unit;
        }
        out.sequence = pulses;
        if (total - gate_time > 0.0) out.sequence.push_back(Delay{total - gate_time});
        out.total = total;
        return out;
    }
    double tau = gate_time;
    if (f0 > 0.0) {
        const double unit = 0.5 / f0;
        tau = std::max(1.0, std::ceil(gate_time / unit - 1e-9)) * unit;
    }
    out.tau = tau;
    out.sequence = {Delay{tau}, HardPulse{out.echo_channel, kPi, kPi / 2.0}, Delay{2.0 * tau},
                    HardPulse{out.echo_channel, kPi, -kPi / 2.0}};
    out.sequence = concat(std::move(out.sequence), pulses);
    if (tau - gate_time > 0.0) out.sequence.push_back(Delay{tau - gate_time});
    out.total = 4.0 * tau;
    return out;
}

inline GateLayout geometric_phase_gate(const LevelScheme &scheme, const std::string &transition, double phi,
                                       const GateOptions &opts = {}) {
    return geometric_gate_layout(scheme, {DGate{transition, phi}}, opts);
}

// ---------------------------------------------------------------------------
// Deutsch-Jozsa (Collins) on the CH3CN symmetric manifold

struct DJFunction {
    int id = 1;
    std::array<int, 4> values{};  // f(00), f(01), f(10), f(11)
    bool constant() const { return values[0] == values[1] && values[1] == values[2] && values[2] == values[3]; }
    bool balanced() const { return std::accumulate(values.begin(), values.end(), 0) == 2; }
    std::string name() const { return "f" + std::to_string(id); }
};

inline DJFunction dj_function(int id) {
    static const std::array<std::array<int, 4>, 8> table{{{0, 0, 0, 0},
                                                          {1, 1, 1, 1},
                                                          {0, 1, 1, 0},
                                                          {1, 0, 0, 1},
                                                          {0, 0, 1, 1},
                                                          {1, 1, 0, 0},
                                                          {0, 1, 0, 1},
                                                          {1, 0, 1, 0}}};
    if (id < 1 || id > 8) throw InputError("DJ function index must be 1..8");
    return DJFunction{id, table[static_cast<std::size_t>(id - 1)]};
}

inline DJFunction dj_function(const std::string &name) {
    if (name.size() == 2 && (name[0] == 'f' || name[0] == 'F') && name[1] >= '1' && name[1] <= '8')
        return dj_function(name[1] - '0');
    throw InputError("unknown DJ function '" + name + "' (expected f1..f8)");
}

inline ComplexMatrix u_fi(const DJFunction &f) {
    ComplexMatrix u = ComplexMatrix::Zero(4, 4);
    for (int i = 0; i < 4; ++i) u(i, i) = f.values[static_cast<std::size_t>(i)] ? -1.0 : 1.0;
    return u;
}

/// Oracle as phase gates: (2 pi)_y on transition 2 flips 01 and 10, on 3 flips 10 and 11.
/// Even-numbered functions reuse their odd partner (same operator up to sign).
inline std::vector<DGate> dj_gates(const DJFunction &f) {
    const int base = f.id % 2 == 0 ? f.id - 1 : f.id;
    switch (base) {
        case 3: return {{"2", kPi}};
        case 5: return {{"3", kPi}};
        case 7: return {{"2", kPi}, {"3", kPi}};
        default: return {};
    }
}

struct RunModel {
    PulseModel model = PulseModel::Ideal;
    int slices = 1024;
    double linewidth_hz = 10.0;
};

inline GateOptions dj_gate_options(const SpinSystemSpec &spec, const RunModel &m) {
    GateOptions g;
    g.echo_channel = "";
    g.merge_pi = true;
    g.model = m.model;
    g.pulse_duration = default_pulse_duration(spec);
    return g;
}

/// Oracle pulse block of the DJ experiment.
inline GateLayout dj_gate(const LevelScheme &scheme, const DJFunction &f, const RunModel &m = {}) {
    return geometric_gate_layout(scheme, dj_gates(f), dj_gate_options(scheme.spec, m));
}

/// Normalizes a pseudopure block: subtract the smallest eigenvalue and rescale to unit trace.
inline ComplexMatrix pseudo_pure_part(const ComplexMatrix &block) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(0.5 * (block + block.adjoint()));
    ComplexMatrix shifted = block - eig.eigenvalues().minCoeff() * ComplexMatrix::Identity(block.rows(), block.cols());
    const double tr = shifted.trace().real();
    if (tr <= 1e-12) throw InputError("state has no pseudopure component");
    return shifted / tr;
}

inline double state_fidelity(const ComplexMatrix &rho, const ComplexVector &psi) {
    return (psi.adjoint() * rho * psi)(0).real() / psi.squaredNorm();
}

/// Final manifold state expected after U_f acting on the (pi/2)_y image of |00>.
inline ComplexVector dj_expected_state(const DJFunction &f) {
    const double r3 = std::sqrt(3.0);
    ComplexVector psi(4);
    psi << 1.0, r3, r3, 1.0;
    psi /= 2.0 * std::sqrt(2.0);
    return u_fi(f) * psi;
}

struct DJResult {
    DJFunction function;
    Spectrum spectrum;
    std::vector<std::string> labels;      // symmetric transitions, descending frequency
    std::vector<Complex> coherences;      // detected amplitude divided by the transition moment
    std::vector<Complex> amplitudes;      // detected amplitude per symmetric transition
    bool constant = false;
    double fidelity = 0.0;  // against the expected manifold state
    ComplexMatrix manifold_state;
};

inline DJResult dj_run(const DJFunction &f, const RunModel &m = {}) {
    static const LevelScheme scheme = build_scheme(ch3cn_spec());
    DJResult out;
    out.function = f;
    PulseSequence seq = concat(soss_sequence("ch3cn"), pps_sequence());
    seq.push_back(HardPulse{"H", kPi / 2.0, kPi / 2.0});
    seq = concat(std::move(seq), dj_gate(scheme, f, m).sequence);
    RunOptions ro;
    ro.slices = m.slices;
    const DensityState final_state = run_sequence(equilibrium_state(scheme), seq, scheme, ro);
    SpectrumOptions so;
    so.linewidth_hz = m.linewidth_hz;
    out.spectrum = synthesize_spectrum(final_state, scheme, "H", so);
    for (const auto *t : scheme.catalog("H").symmetric()) {
        const Complex amp = t->moment * final_state.rho(t->lower, t->upper);
        out.labels.push_back(t->label);
        out.amplitudes.push_back(amp);
        out.coherences.push_back(amp / std::abs(t->moment));
    }
    out.constant = out.spectrum.inverted_count() == 0;
    out.manifold_state = scheme.symmetric_block(final_state.rho);
    out.fidelity = state_fidelity(pseudo_pure_part(out.manifold_state), dj_expected_state(f));
    return out;
}

// ---------------------------------------------------------------------------
// Qubit-qutrit parity on the CH2FCN symmetric manifold

using ParityString = std::array<int, 6>;

inline ParityString parse_parity_string(const std::string &text) {
    if (text.size() != 6) throw InputError("parity string must have 6 bits");
    ParityString x{};
    for (std::size_t i = 0; i < 6; ++i) {
        if (text[i] != '0' && text[i] != '1') throw InputError("parity string must contain only 0 and 1");
        x[i] = text[i] - '0';
    }
    return x;
}

inline std::string to_string(const ParityString &x) {
    std::string s;
    for (int b : x) s += static_cast<char>('0' + b);
    return s;
}

inline int popcount(const ParityString &x) { return std::accumulate(x.begin(), x.end(), 0); }

inline ComplexMatrix parity_target(const ParityString &x) {
    ComplexMatrix d = ComplexMatrix::Zero(6, 6);
    for (int i = 0; i < 6; ++i) d(i, i) = x[static_cast<std::size_t>(i)] ? -1.0 : 1.0;
    return d;
}

struct OracleRow {
    std::string name;
    ParityString x;
    std::vector<DGate> gates;
};

/// Published oracle decompositions, one row per representative string.
inline const std::vector<OracleRow> &oracle_table() {
    static const std::vector<OracleRow> rows{
        {"I", {0, 0, 0, 0, 0, 0}, {}},
        {"O1^2",
         {0, 1, 0, 0, 0, 0},
         {{"H2", -2.0 * kPi / 3.0}, {"H3", kPi / 6.0}, {"H4", -kPi / 2.0}, {"F1", kPi / 6.0}, {"F3", kPi / 3.0}}},
        {"O1^4",
         {0, 0, 0, 1, 0, 0},
         {{"H2", kPi / 3.0}, {"H3", kPi / 6.0}, {"H4", -kPi / 2.0}, {"F1", kPi / 6.0}, {"F3", kPi / 3.0}}},
        {"O1^6",
         {0, 0, 0, 0, 0, 1},
         {{"H2", kPi / 3.0}, {"H3", kPi / 6.0}, {"H4", kPi / 2.0}, {"F1", kPi / 6.0}, {"F3", kPi / 3.0}}},
        {"O2^(4,6)", {0, 0, 0, 1, 0, 1}, {{"H4", kPi}}},
        {"O2^(2,6)", {0, 1, 0, 0, 0, 1}, {{"H2", kPi}, {"H4", kPi}}},
        {"O2^(2,4)", {0, 1, 0, 1, 0, 0}, {{"H2", kPi}}},
        {"O3^(2,4,6)", {0, 1, 0, 1, 0, 1}, {{"H3", kPi / 2.0}, {"H4", -kPi / 2.0}, {"F1", kPi / 2.0}, {"F3", kPi}}},
    };
    return rows;
}

/// Phase gates on the spanning tree F1, H2, H4, F3, H3 (levels 1-2-4-6-5-3) that
/// produce diag((-1)^x) up to a global phase. Gates with zero angle are omitted.
inline std::vector<DGate> synthesize_oracle(const ParityString &x) {
    std::array<double, 6> th{};
    const double shift = kPi * popcount(x) / 6.0;  // makes the phases sum to zero
    for (std::size_t i = 0; i < 6; ++i) th[i] = kPi * x[i] - shift;
    const double f1 = th[0];
    const double h2 = th[1] + f1;
    const double h4 = th[3] + h2;
    const double f3 = -th[5] - h4;
    const double h3 = f3 - th[4];
    std::vector<DGate> out;
    for (const auto &g : std::vector<DGate>{{"H2", h2}, {"H3", h3}, {"H4", h4}, {"F1", f1}, {"F3", f3}}) {
        const double phi = wrap_phase(g.phi);
        if (std::abs(phi) > 1e-12) out.push_back({g.transition, phi});
    }
    return out;
}

struct ParityOracle {
    ParityString x{};
    std::string name;  // table row name, or "synthesized"
    std::vector<DGate> gates;
    ComplexMatrix unitary;  // product of the phase gates, 6x6
    ComplexMatrix target;   // diag((-1)^x)
    bool matches = false;   // unitary equals target up to global phase (1e-8)
};

inline ParityOracle parity_oracle(const ParityString &x) {
    ParityOracle o;
    o.x = x;
    ParityString complement{};
    for (std::size_t i = 0; i < 6; ++i) complement[i] = 1 - x[i];
    o.name = "synthesized";
    o.gates = synthesize_oracle(x);
    for (const auto &row : oracle_table()) {
        if (row.x == x || row.x == complement) {
            o.name = row.name;
            o.gates = row.gates;
            break;
        }
    }
    static const LevelScheme scheme = build_scheme(ch2fcn_spec());
    o.unitary = d_gate_product(scheme, o.gates);
    o.target = parity_target(x);
    o.matches = equal_up_to_global_phase(o.unitary, o.target, 1e-8);
    return o;
}

inline GateOptions parity_gate_options(const SpinSystemSpec &spec, const RunModel &m) {
    GateOptions g;
    g.model = m.model;
    g.pulse_duration = m.model == PulseModel::Gaussian ? default_pulse_duration(spec) : 0.0;
    return g;
}

struct ParityResult {
    ParityOracle oracle;
    GateLayout layout;
    Spectrum spectrum;
    std::vector<int> signs;  // per fluorine line, ascending frequency: +1, -1 or 0
    int inverted = 0;
    bool odd = false;
};

inline ParityResult parity_run(const ParityString &x, const RunModel &m = {}) {
    static const LevelScheme scheme = build_scheme(ch2fcn_spec());
    ParityResult out;
    out.oracle = parity_oracle(x);
    out.layout = geometric_gate_layout(scheme, out.oracle.gates, parity_gate_options(scheme.spec, m));
    PulseSequence seq = soss_sequence("ch2fcn");
    seq.push_back(HardPulse{"F", kPi / 2.0, kPi / 2.0});
    seq = concat(std::move(seq), out.layout.sequence);
    RunOptions ro;
    ro.slices = m.slices;
    const DensityState final_state = run_sequence(equilibrium_state(scheme), seq, scheme, ro);
    SpectrumOptions so;
    so.linewidth_hz = m.linewidth_hz;
    out.spectrum = synthesize_spectrum(final_state, scheme, "F", so);
    const double big = out.spectrum.max_magnitude();
    for (const auto &s : out.spectrum.sticks) out.signs.push_back(s.absorptive() > 0.1 * big ? 1 : (s.absorptive() < -0.1 * big ? -1 : 0));
    out.inverted = out.spectrum.inverted_count();
    out.odd = out.inverted % 2 == 1;
    return out;
}

}  // namespace geophase
