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

// Spin Hamiltonians for one group of magnetically equivalent spin-1/2 nuclei
// plus single heteronuclei, the total-spin (symmetry manifold) eigenbasis, and
// the single-quantum transition catalog of each channel.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geophase/algebra.hpp"

namespace geophase {

struct Channel {
    std::string species;       // "H", "C", "F", ...
    double offset_hz = 0.0;    // chemical shift in the channel's rotating frame
    std::string label_prefix;  // transition label prefix ("h", "C", "" for plain numbers)
    std::optional<double> gamma;  // overrides the built-in relative gyromagnetic ratio
};

struct EquivalentGroup {
    std::string channel;
    int count = 0;           // number of equivalent spin-1/2 nuclei
    double d_homo_hz = 0.0;  // residual homonuclear dipolar coupling
};

/// Secular heteronuclear coupling 2*pi*(J + 2D) I_z S_z. The bundled systems
/// only know the combined constant and put it in j_hz with d_hz = 0.
struct HeteroCoupling {
    std::string a;
    std::string b;
    double j_hz = 0.0;
    double d_hz = 0.0;
    double effective_hz() const { return j_hz + 2.0 * d_hz; }
};

struct SpinSystemSpec {
    std::string name;
    std::string template_name;  // "ch3i", "ch3cn", "ch2fcn" or empty
    std::vector<Channel> channels;
    EquivalentGroup group;
    std::vector<HeteroCoupling> hetero;

    std::optional<std::size_t> channel_index(const std::string &species) const {
        for (std::size_t i = 0; i < channels.size(); ++i)
            if (channels[i].species == species) return i;
        return std::nullopt;
    }

    /// Spins per channel: the group channel holds `group.count`, every other channel one.
    int spins_in(std::size_t channel) const { return channels[channel].species == group.channel ? group.count : 1; }

    int total_spins() const {
        int n = 0;
        for (std::size_t c = 0; c < channels.size(); ++c) n += spins_in(c);
        return n;
    }

    std::size_t dim() const { return std::size_t{1} << total_spins(); }

    void validate() const {
        if (channels.empty()) throw InputError("spin system has no channels");
        for (std::size_t i = 0; i < channels.size(); ++i) {
            if (channels[i].species.empty()) throw InputError("channel with empty species name");
            if (!std::isfinite(channels[i].offset_hz)) throw InputError("non-finite offset on " + channels[i].species);
            for (std::size_t j = 0; j < i; ++j)
                if (channels[j].species == channels[i].species)
                    throw InputError("duplicate channel " + channels[i].species);
        }
        if (!channel_index(group.channel)) throw InputError("equivalent group refers to unknown channel " + group.channel);
        if (group.count < 2 || group.count > 3) throw InputError("equivalent group must hold 2 or 3 spins");
        if (!std::isfinite(group.d_homo_hz)) throw InputError("non-finite homonuclear coupling");
        if (total_spins() > 4) throw InputError("Hilbert dimension exceeds 16");
        for (std::size_t i = 0; i < hetero.size(); ++i) {
            const auto &h = hetero[i];
            if (!channel_index(h.a) || !channel_index(h.b)) throw InputError("coupling refers to unknown channel");
            if (h.a == h.b) throw InputError("heteronuclear coupling needs two different channels");
            if (!std::isfinite(h.effective_hz())) throw InputError("non-finite heteronuclear coupling");
            for (std::size_t j = 0; j < i; ++j) {
                const auto &o = hetero[j];
                if ((o.a == h.a && o.b == h.b) || (o.a == h.b && o.b == h.a))
                    throw InputError("more than one coupling between " + h.a + " and " + h.b);
            }
        }
    }
};

/// Relative gyromagnetic ratios (1H = 1).
inline double gyromagnetic_ratio(const Channel &channel) {
    if (channel.gamma) return *channel.gamma;
    static const std::map<std::string, double> table{{"H", 1.0}, {"F", 0.94}, {"C", 0.2515}, {"N", -0.1013}, {"P", 0.4048}};
    const auto it = table.find(channel.species);
    if (it == table.end()) throw InputError("no gyromagnetic ratio known for species " + channel.species);
    return it->second;
}

namespace detail {

// Product basis: bit (n-1-k) of the index is spin k; 0 = m +1/2. Spin 0 is the most significant.
inline ComplexMatrix spin_z(int nspins, int k) {
    const std::size_t dim = std::size_t{1} << nspins;
    const std::size_t mask = std::size_t{1} << (nspins - 1 - k);
    ComplexMatrix op = ComplexMatrix::Zero(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) op(i, i) = (i & mask) ? -0.5 : 0.5;
    return op;
}

inline ComplexMatrix spin_plus(int nspins, int k) {
    const std::size_t dim = std::size_t{1} << nspins;
    const std::size_t mask = std::size_t{1} << (nspins - 1 - k);
    ComplexMatrix op = ComplexMatrix::Zero(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        if (i & mask) op(i ^ mask, i) = 1.0;
    return op;
}

struct ProductOps {
    int nspins = 0;
    std::vector<int> first_spin;  // per channel
    std::vector<ComplexMatrix> fz, fplus;
};

inline ProductOps product_ops(const SpinSystemSpec &spec) {
    // The group channel's spins come first, then the remaining channels in order.
    ProductOps ops;
    ops.nspins = spec.total_spins();
    const std::size_t group_ch = *spec.channel_index(spec.group.channel);
    ops.first_spin.assign(spec.channels.size(), 0);
    int next = spec.group.count;
    for (std::size_t c = 0; c < spec.channels.size(); ++c) {
        if (c == group_ch) continue;
        ops.first_spin[c] = next++;
    }
    const std::size_t dim = spec.dim();
    for (std::size_t c = 0; c < spec.channels.size(); ++c) {
        ComplexMatrix z = ComplexMatrix::Zero(dim, dim), p = ComplexMatrix::Zero(dim, dim);
        for (int k = 0; k < spec.spins_in(c); ++k) {
            z += spin_z(ops.nspins, ops.first_spin[c] + k);
            p += spin_plus(ops.nspins, ops.first_spin[c] + k);
        }
        ops.fz.push_back(std::move(z));
        ops.fplus.push_back(std::move(p));
    }
    return ops;
}

inline ComplexMatrix group_total_spin_squared(const SpinSystemSpec &spec) {
    const ProductOps ops = product_ops(spec);
    const std::size_t g = *spec.channel_index(spec.group.channel);
    const ComplexMatrix &z = ops.fz[g];
    const ComplexMatrix &p = ops.fplus[g];
    return z * z + 0.5 * (p * p.adjoint() + p.adjoint() * p);
}

}  // namespace detail

/// Internal Hamiltonian in the product basis, angular units (rad/s):
/// Zeeman offsets per channel, secular heteronuclear couplings, and the full
/// homonuclear dipolar term D(3 S_zi S_zj - S_i.S_j) within the equivalent group.
inline ComplexMatrix build_hamiltonian(const SpinSystemSpec &spec) {
    spec.validate();
    const auto ops = detail::product_ops(spec);
    const std::size_t dim = spec.dim();
    ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
    for (std::size_t c = 0; c < spec.channels.size(); ++c) h += spec.channels[c].offset_hz * ops.fz[c];
    for (const auto &coupling : spec.hetero) {
        const auto a = *spec.channel_index(coupling.a), b = *spec.channel_index(coupling.b);
        h += coupling.effective_hz() * ops.fz[a] * ops.fz[b];
    }
    const int n = spec.group.count;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const ComplexMatrix zi = detail::spin_z(ops.nspins, i), zj = detail::spin_z(ops.nspins, j);
            const ComplexMatrix pi = detail::spin_plus(ops.nspins, i), pj = detail::spin_plus(ops.nspins, j);
            const ComplexMatrix dot = zi * zj + 0.5 * (pi * pj.adjoint() + pi.adjoint() * pj);
            h += spec.group.d_homo_hz * (3.0 * zi * zj - dot);
        }
    }
    return kTwoPi * h;
}

struct Level {
    std::string manifold;  // "symmetric" or "asymmetric_k"
    int manifold_index = 0;  // 0 for symmetric, k for asymmetric_k
    double total_spin = 0.0;
    double group_m = 0.0;
    std::vector<double> other_m;  // m of each non-group spin, in channel order
    double energy_hz = 0.0;
    std::string logical_label;  // symmetric levels only
    bool symmetric() const { return manifold_index == 0; }
};

struct Transition {
    std::string label;
    std::string channel;
    std::size_t upper = 0;  // level reached by the channel raising operator
    std::size_t lower = 0;
    double frequency_hz = 0.0;  // E_upper - E_lower
    Complex moment;             // <upper|F+|lower> in the eigenbasis
    bool symmetric = false;
    int degeneracy_group = 0;

    SubspacePair pair(std::size_t dim) const { return SubspacePair(std::min(upper, lower), std::max(upper, lower), dim); }
};

struct TransitionCatalog {
    std::string channel;
    std::vector<Transition> transitions;

    const Transition *find(const std::string &label) const {
        for (const auto &t : transitions)
            if (t.label == label) return &t;
        return nullptr;
    }
    std::vector<const Transition *> degenerate_with(const Transition &t) const {
        std::vector<const Transition *> out;
        for (const auto &u : transitions)
            if (u.degeneracy_group == t.degeneracy_group) out.push_back(&u);
        return out;
    }
    std::vector<const Transition *> symmetric() const {
        std::vector<const Transition *> out;
        for (const auto &t : transitions)
            if (t.symmetric) out.push_back(&t);
        return out;
    }
};

struct ChannelOperators {
    ComplexMatrix fz;     // eigenbasis
    ComplexMatrix fplus;  // eigenbasis
    ComplexMatrix fx() const { return 0.5 * (fplus + fplus.adjoint()); }
    ComplexMatrix fy() const { return Complex(0.0, -0.5) * (fplus - fplus.adjoint()); }
};

/// Eigenlevels grouped by symmetry manifold, plus everything needed to act in the eigenbasis.
struct LevelScheme {
    SpinSystemSpec spec;
    std::size_t dim = 0;
    ComplexMatrix basis;       // columns: eigenvectors in the product basis
    Eigen::VectorXd energies;  // rad/s, eigenbasis order
    std::vector<Level> levels;
    std::size_t symmetric_count = 0;  // symmetric levels occupy indices [0, symmetric_count)
    std::map<std::string, ChannelOperators> channel_ops;
    std::map<std::string, TransitionCatalog> catalogs;

    ComplexMatrix hamiltonian() const { return energies.cast<Complex>().asDiagonal(); }

    const ChannelOperators &ops(const std::string &channel) const {
        const auto it = channel_ops.find(channel);
        if (it == channel_ops.end()) throw InputError("unknown channel " + channel);
        return it->second;
    }
    const TransitionCatalog &catalog(const std::string &channel) const {
        const auto it = catalogs.find(channel);
        if (it == catalogs.end()) throw InputError("unknown channel " + channel);
        return it->second;
    }
    const Transition &transition(const std::string &label) const {
        for (const auto &[name, cat] : catalogs)
            if (const auto *t = cat.find(label)) return *t;
        throw InputError("unresolvable transition label " + label);
    }
    std::vector<std::size_t> symmetric_levels() const {
        std::vector<std::size_t> out(symmetric_count);
        for (std::size_t i = 0; i < symmetric_count; ++i) out[i] = i;
        return out;
    }
    /// Restriction of an eigenbasis operator to the symmetric manifold.
    ComplexMatrix symmetric_block(const ComplexMatrix &op) const {
        return op.topLeftCorner(symmetric_count, symmetric_count);
    }
};

inline TransitionCatalog transition_catalog(const LevelScheme &scheme, const std::string &channel, double bin_tol_hz = 0.5);

namespace detail {

struct Multiplet {
    double spin = 0.0;
    int k = 0;
    std::vector<ComplexVector> ladder;  // group-space states, m = S .. -S
};

inline std::vector<Multiplet> group_multiplets(int n) {
    const std::size_t g = std::size_t{1} << n;
    ComplexMatrix sz = ComplexMatrix::Zero(g, g), sp = ComplexMatrix::Zero(g, g);
    for (int k = 0; k < n; ++k) {
        sz += spin_z(n, k);
        sp += spin_plus(n, k);
    }
    const ComplexMatrix sm = sp.adjoint();
    const ComplexMatrix s2 = sz * sz + 0.5 * (sp * sm + sm * sp);
    std::vector<Multiplet> out;
    std::map<double, int> count_for_spin;
    for (int twice = n; twice >= 0; twice -= 2) {
        const double spin = twice / 2.0;
        std::vector<std::size_t> block;
        for (std::size_t i = 0; i < g; ++i)
            if (std::abs(sz(i, i).real() - spin) < 1e-12) block.push_back(i);
        ComplexMatrix sub(block.size(), block.size());
        for (std::size_t a = 0; a < block.size(); ++a)
            for (std::size_t b = 0; b < block.size(); ++b) sub(a, b) = s2(block[a], block[b]);
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(sub);
        for (Eigen::Index col = 0; col < eig.eigenvalues().size(); ++col) {
            if (std::abs(eig.eigenvalues()(col) - spin * (spin + 1.0)) > 1e-8) continue;
            ComplexVector top = ComplexVector::Zero(g);
            for (std::size_t a = 0; a < block.size(); ++a) top(block[a]) = eig.eigenvectors()(a, col);
            // Fix the arbitrary phase: first significant component real positive.
            for (Eigen::Index i = 0; i < top.size(); ++i) {
                if (std::abs(top(i)) > 1e-9) {
                    top *= std::conj(top(i)) / std::abs(top(i));
                    break;
                }
            }
            Multiplet m;
            m.spin = spin;
            m.k = count_for_spin[spin]++;
            m.ladder.push_back(top);
            for (double mz = spin; mz > -spin + 0.5; mz -= 1.0) {
                ComplexVector next = sm * m.ladder.back();
                next /= std::sqrt(spin * (spin + 1.0) - mz * (mz - 1.0));
                m.ladder.push_back(next);
            }
            out.push_back(std::move(m));
        }
    }
    return out;
}

inline std::string logical_label(std::size_t index, std::size_t sym_count, int group_levels, int other_spins) {
    const bool pow2 = (sym_count & (sym_count - 1)) == 0;
    std::string label;
    if (pow2) {
        int bits = 0;
        while ((std::size_t{1} << bits) < sym_count) ++bits;
        for (int b = bits - 1; b >= 0; --b) label += ((index >> b) & 1) ? '1' : '0';
        return label;
    }
    const std::size_t others = std::size_t{1} << other_spins;
    label += std::to_string(index / others);
    (void)group_levels;
    for (int b = other_spins - 1; b >= 0; --b) label += (((index % others) >> b) & 1) ? '1' : '0';
    return label;
}

}  // namespace detail

/// Simultaneous eigenbasis of H, the group total spin S^2 and S_z, and the
/// other spins' I_z. Ordering: S descending, multiplet index, group m
/// descending, then the other spins' m descending (product order).
inline LevelScheme decompose_symmetry(const ComplexMatrix &h, const SpinSystemSpec &spec, double bin_tol_hz = 0.5) {
    spec.validate();
    const std::size_t dim = spec.dim();
    if (h.rows() != static_cast<Eigen::Index>(dim) || h.cols() != static_cast<Eigen::Index>(dim))
        throw InputError("Hamiltonian dimension does not match the spin system");
    const double scale = std::max(1.0, max_abs(h));
    const ComplexMatrix s2 = detail::group_total_spin_squared(spec);
    if (max_abs(commutator(h, s2)) > 1e-6 * scale)
        throw InputError("Hamiltonian does not commute with the group total spin; malformed system");

    const int n = spec.group.count;
    const int others = spec.total_spins() - n;
    const std::size_t other_dim = std::size_t{1} << others;
    const auto multiplets = detail::group_multiplets(n);

    LevelScheme scheme;
    scheme.spec = spec;
    scheme.dim = dim;
    scheme.basis = ComplexMatrix::Zero(dim, dim);
    std::size_t col = 0;
    int asym_index = 0;
    for (const auto &mult : multiplets) {
        const bool sym = std::abs(mult.spin - n / 2.0) < 1e-12;
        if (!sym) ++asym_index;
        for (std::size_t step = 0; step < mult.ladder.size(); ++step) {
            for (std::size_t o = 0; o < other_dim; ++o) {
                for (Eigen::Index gi = 0; gi < mult.ladder[step].size(); ++gi)
                    scheme.basis(gi * other_dim + o, col) = mult.ladder[step](gi);
                Level lv;
                lv.manifold = sym ? "symmetric" : "asymmetric_" + std::to_string(asym_index);
                lv.manifold_index = sym ? 0 : asym_index;
                lv.total_spin = mult.spin;
                lv.group_m = mult.spin - static_cast<double>(step);
                for (int b = others - 1; b >= 0; --b) lv.other_m.push_back(((o >> b) & 1) ? -0.5 : 0.5);
                scheme.levels.push_back(lv);
                if (sym) ++scheme.symmetric_count;
                ++col;
            }
        }
    }
    const ComplexMatrix hd = scheme.basis.adjoint() * h * scheme.basis;
    ComplexMatrix off = hd;
    off.diagonal().setZero();
    if (max_abs(off) > 1e-6 * scale) throw InputError("symmetry basis does not diagonalize the Hamiltonian");
    scheme.energies = hd.diagonal().real();
    for (std::size_t i = 0; i < dim; ++i) {
        scheme.levels[i].energy_hz = scheme.energies(i) / kTwoPi;
        if (scheme.levels[i].symmetric())
            scheme.levels[i].logical_label = detail::logical_label(i, scheme.symmetric_count, n + 1, others);
    }
    const auto ops = detail::product_ops(spec);
    for (std::size_t c = 0; c < spec.channels.size(); ++c) {
        ChannelOperators co;
        co.fz = scheme.basis.adjoint() * ops.fz[c] * scheme.basis;
        co.fplus = scheme.basis.adjoint() * ops.fplus[c] * scheme.basis;
        scheme.channel_ops.emplace(spec.channels[c].species, std::move(co));
    }
    for (const auto &ch : spec.channels) scheme.catalogs[ch.species] = transition_catalog(scheme, ch.species, bin_tol_hz);
    return scheme;
}

/// Allowed single-quantum transitions of one channel, labelled in descending
/// frequency within the symmetric manifold. Asymmetric lines take the label of
/// the degenerate symmetric line plus primes, or continue the numbering when
/// the channel uses bare numbers.
inline TransitionCatalog transition_catalog(const LevelScheme &scheme, const std::string &channel, double bin_tol_hz) {
    const auto &ops = scheme.ops(channel);
    const auto ci = scheme.spec.channel_index(channel);
    const std::string prefix = scheme.spec.channels[*ci].label_prefix;
    TransitionCatalog cat;
    cat.channel = channel;
    for (std::size_t a = 0; a < scheme.dim; ++a) {
        for (std::size_t b = 0; b < scheme.dim; ++b) {
            const Complex m = ops.fplus(a, b);
            if (a == b || std::abs(m) <= 1e-9) continue;
            Transition t;
            t.channel = channel;
            t.upper = a;
            t.lower = b;
            t.moment = m;
            t.frequency_hz = (scheme.energies(a) - scheme.energies(b)) / kTwoPi;
            t.symmetric = scheme.levels[a].symmetric() && scheme.levels[b].symmetric();
            cat.transitions.push_back(t);
        }
    }
    std::stable_sort(cat.transitions.begin(), cat.transitions.end(), [](const Transition &x, const Transition &y) {
        if (x.symmetric != y.symmetric) return x.symmetric;
        if (x.symmetric && std::abs(x.frequency_hz - y.frequency_hz) > 1e-9) return x.frequency_hz > y.frequency_hz;
        if (!x.symmetric) {
            // asymmetric: by manifold, then descending frequency
            return std::make_tuple(std::min(x.upper, x.lower), -x.frequency_hz) <
                   std::make_tuple(std::min(y.upper, y.lower), -y.frequency_hz);
        }
        return std::min(x.upper, x.lower) < std::min(y.upper, y.lower);
    });
    // Degeneracy groups by clustering sorted frequencies.
    std::vector<std::size_t> order(cat.transitions.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return cat.transitions[x].frequency_hz > cat.transitions[y].frequency_hz;
    });
    int group = -1;
    double last = 0.0;
    for (std::size_t idx : order) {
        auto &t = cat.transitions[idx];
        if (group < 0 || std::abs(t.frequency_hz - last) >= bin_tol_hz) {
            ++group;
            last = t.frequency_hz;
        }
        t.degeneracy_group = group;
    }
    int number = 0;
    for (auto &t : cat.transitions)
        if (t.symmetric) t.label = prefix + std::to_string(++number);
    std::map<std::string, int> used;
    int orphan = 0;
    for (auto &t : cat.transitions) {
        if (t.symmetric) continue;
        if (prefix.empty()) {
            t.label = std::to_string(++number);
            continue;
        }
        const Transition *partner = nullptr;
        for (const auto &u : cat.transitions)
            if (u.symmetric && u.degeneracy_group == t.degeneracy_group) partner = &u;
        if (!partner) {
            t.label = prefix + "a" + std::to_string(++orphan);
            continue;
        }
        const int k = scheme.levels[t.upper].manifold_index;
        std::string label = partner->label + std::string(static_cast<std::size_t>(k), '\'');
        while (used[label]++ > 0) label += '\'';
        t.label = label;
    }
    return cat;
}

inline LevelScheme build_scheme(const SpinSystemSpec &spec, double bin_tol_hz = 0.5) {
    return decompose_symmetry(build_hamiltonian(spec), spec, bin_tol_hz);
}

/// Deviation density matrix. Always expressed in the scheme's eigenbasis;
/// `time_s` is the sequence clock used to reference selective-pulse phases.
struct DensityState {
    ComplexMatrix rho;
    double time_s = 0.0;
};

/// High-temperature deviation state: sum over channels of gamma * F_z, in the eigenbasis.
inline DensityState equilibrium_state(const LevelScheme &scheme) {
    DensityState state;
    state.rho = ComplexMatrix::Zero(scheme.dim, scheme.dim);
    for (const auto &ch : scheme.spec.channels) state.rho += gyromagnetic_ratio(ch) * scheme.ops(ch.species).fz;
    return state;
}

}  // namespace geophase
