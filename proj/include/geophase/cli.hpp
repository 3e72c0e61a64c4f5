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

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "geophase/algorithms.hpp"
#include "geophase/geometry.hpp"
#include "geophase/program.hpp"
#include "geophase/spectrum.hpp"

namespace geophase {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitInputError = 2;

/// Reads {"real": [[..]], "imag": [[..]]} or {"diag": [[re, im], ..]}.
inline ComplexMatrix read_matrix_json(const std::string &path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
        if (j.contains("diag")) {
            const auto &d = j.at("diag");
            ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
            for (std::size_t i = 0; i < d.size(); ++i) {
                const auto &e = d[i];
                m(i, i) = e.is_array() ? Complex(e.at(0).get<double>(), e.at(1).get<double>()) : Complex(e.get<double>(), 0.0);
            }
            return m;
        }
        const auto &re = j.at("real");
        const std::size_t n = re.size();
        ComplexMatrix m = ComplexMatrix::Zero(n, n);
        for (std::size_t r = 0; r < n; ++r) {
            if (re[r].size() != n) throw InputError("matrix is not square");
            for (std::size_t c = 0; c < n; ++c) {
                const double im = j.contains("imag") ? j["imag"].at(r).at(c).get<double>() : 0.0;
                m(r, c) = Complex(re[r][c].get<double>(), im);
            }
        }
        return m;
    } catch (const nlohmann::json::exception &e) {
        throw InputError("malformed matrix file " + path + ": " + e.what());
    }
}

namespace detail {

struct LoadedProgram {
    LevelScheme scheme;
    PulseProgram program;
    PulseSequence sequence;
};

inline LoadedProgram load_program(const std::string &system_path, const std::string &program_path, PulseModel model) {
    const std::string text = read_text_file(program_path);
    PulseProgram prog = parse_program(text);
    SpinSystemSpec spec;
    if (!system_path.empty()) {
        spec = load_system(system_path);
    } else if (prog.system) {
        spec = resolve_system(*prog.system, std::filesystem::path(program_path).parent_path().string());
    } else {
        throw InputError("no system given (use --system or a 'system' line)");
    }
    LevelScheme scheme = build_scheme(spec);
    CompileOptions co;
    co.model = model;
    PulseSequence seq = compile_program(prog, scheme, co);
    return {std::move(scheme), std::move(prog), std::move(seq)};
}

inline void print_sticks(std::ostream &out, const Spectrum &spec) {
    const auto ratios = spec.ratios();
    out << "channel " << spec.channel << ": " << spec.sticks.size() << " lines\n";
    out << std::setw(12) << "freq_hz" << std::setw(14) << "abs" << std::setw(14) << "disp" << std::setw(10) << "ratio"
        << "  labels\n";
    for (std::size_t i = 0; i < spec.sticks.size(); ++i) {
        const auto &s = spec.sticks[i];
        out << std::fixed << std::setprecision(2) << std::setw(12) << s.frequency_hz << std::setprecision(6) << std::setw(14)
            << s.absorptive() << std::setw(14) << s.dispersive() << std::setprecision(3) << std::setw(10) << ratios[i] << "  ";
        for (std::size_t k = 0; k < s.labels.size(); ++k) out << (k ? "," : "") << s.labels[k];
        out << '\n';
    }
    out << std::defaultfloat;
}

inline void maybe_export(const Spectrum &spec, const std::string &path) {
    if (!path.empty()) export_spectrum(spec, path, format_from_path(path));
}

inline std::pair<std::size_t, std::size_t> parse_pair(const std::string &text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw InputError("pair must look like r,s");
    try {
        const int r = std::stoi(text.substr(0, comma)), s = std::stoi(text.substr(comma + 1));
        if (r < 1 || s < 1) throw InputError("levels are numbered from 1");
        return {static_cast<std::size_t>(r - 1), static_cast<std::size_t>(s - 1)};
    } catch (const std::logic_error &) {
        throw InputError("pair must look like r,s");
    }
}

}  // namespace detail

inline int cli_main(int argc, const char *const *argv, std::ostream &out = std::cout, std::ostream &err = std::cerr) {
    CLI::App app{"Geometric phase gates in dipolar-coupled spin systems"};
    app.require_subcommand(1);

    std::string system_path, program_path, out_path, target_path, pair_text, function_name, bits, initial = "lower";
    double lw = 10.0, tol = 1e-8;
    bool shaped = false;
    int steps = 64;

    auto *sim = app.add_subcommand("simulate", "run a pulse program and write the acquired spectrum");
    sim->add_option("--system", system_path, "system JSON (overrides the program's system line)");
    sim->add_option("--program", program_path, "pulse program")->required();
    sim->add_option("--out", out_path, "spectrum output (.json, .csv or .svg)");
    sim->add_option("--lw", lw, "Lorentzian linewidth in Hz");
    sim->add_flag("--shaped", shaped, "Gaussian selective pulses in generated gates");

    auto *dj = app.add_subcommand("dj", "Deutsch-Jozsa on CH3CN");
    dj->add_option("--function", function_name, "f1..f8")->required();
    dj->add_option("--out", out_path, "spectrum output");
    dj->add_flag("--shaped", shaped, "Gaussian selective pulses");

    auto *par = app.add_subcommand("parity", "qubit-qutrit parity on CH2FCN");
    par->add_option("--string", bits, "6-bit string")->required();
    par->add_option("--out", out_path, "spectrum output");
    par->add_flag("--shaped", shaped, "Gaussian selective pulses");

    auto *vg = app.add_subcommand("verify-gate", "compare a program's propagator with a target matrix");
    vg->add_option("--system", system_path, "system JSON");
    vg->add_option("--program", program_path, "pulse program")->required();
    vg->add_option("--target", target_path, "target matrix JSON")->required();
    vg->add_option("--tol", tol, "max-norm tolerance");
    vg->add_flag("--shaped", shaped, "Gaussian selective pulses in generated gates");

    auto *tr = app.add_subcommand("trajectory", "Bloch trajectory of one level pair");
    tr->add_option("--system", system_path, "system JSON");
    tr->add_option("--program", program_path, "pulse program")->required();
    tr->add_option("--pair", pair_text, "levels r,s (1-based)")->required();
    tr->add_option("--out", out_path, "CSV output")->required();
    tr->add_option("--steps", steps, "samples per event");
    tr->add_option("--initial", initial, "lower | upper | x | equilibrium")
        ->check(CLI::IsMember({"lower", "upper", "x", "equilibrium"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kExitInputError;
    }

    try {
        const PulseModel model = shaped ? PulseModel::Gaussian : PulseModel::Ideal;
        if (sim->parsed()) {
            const auto loaded = detail::load_program(system_path, program_path, model);
            const DensityState final_state = run_sequence(equilibrium_state(loaded.scheme), loaded.sequence, loaded.scheme);
            SpectrumOptions so;
            so.linewidth_hz = lw;
            const auto channels = loaded.program.acquired_channels();
            for (std::size_t i = 0; i < channels.size(); ++i) {
                const Spectrum spec = synthesize_spectrum(final_state, loaded.scheme, channels[i], so);
                detail::print_sticks(out, spec);
                if (!out_path.empty()) {
                    std::string path = out_path;
                    if (i > 0) {
                        const std::filesystem::path p(out_path);
                        path = (p.parent_path() / (p.stem().string() + "_" + channels[i] + p.extension().string())).string();
                    }
                    detail::maybe_export(spec, path);
                }
            }
            return kExitOk;
        }
        if (dj->parsed()) {
            RunModel m;
            m.model = model;
            const auto res = dj_run(dj_function(function_name), m);
            out << res.function.name() << ": " << (res.constant ? "constant" : "balanced") << '\n';
            out << std::setw(10) << "line" << std::setw(12) << "freq_hz" << std::setw(14) << "amplitude" << std::setw(14)
                << "coherence" << std::setw(10) << "ratio" << '\n';
            double smallest = 0.0;
            for (const auto &c : res.coherences)
                if (std::abs(c) > 1e-12 && (smallest == 0.0 || std::abs(c) < smallest)) smallest = std::abs(c);
            static const LevelScheme scheme = build_scheme(ch3cn_spec());
            for (std::size_t i = 0; i < res.labels.size(); ++i) {
                const auto &t = scheme.transition(res.labels[i]);
                out << std::setw(10) << res.labels[i] << std::fixed << std::setprecision(1) << std::setw(12) << t.frequency_hz
                    << std::setprecision(4) << std::setw(14) << res.amplitudes[i].real() << std::setw(14)
                    << res.coherences[i].real() << std::setprecision(3) << std::setw(10)
                    << (smallest > 0.0 ? std::abs(res.coherences[i]) / smallest : 0.0) << std::defaultfloat << '\n';
            }
            out << "spectral ratios:";
            for (double r : res.spectrum.ratios()) out << ' ' << std::setprecision(4) << r;
            out << "\nfidelity " << std::setprecision(6) << res.fidelity << '\n';
            detail::maybe_export(res.spectrum, out_path);
            return kExitOk;
        }
        if (par->parsed()) {
            RunModel m;
            m.model = model;
            const auto res = parity_run(parse_parity_string(bits), m);
            out << (res.odd ? "odd" : "even") << '\n';
            out << "oracle " << res.oracle.name << ", inverted lines " << res.inverted << ", signs (low to high freq):";
            for (int s : res.signs) out << ' ' << (s > 0 ? '+' : (s < 0 ? '-' : '0'));
            out << '\n';
            detail::maybe_export(res.spectrum, out_path);
            return kExitOk;
        }
        if (vg->parsed()) {
            const auto loaded = detail::load_program(system_path, program_path, model);
            const ComplexMatrix target = read_matrix_json(target_path);
            RunOptions ro;
            const ComplexMatrix u = sequence_propagator(loaded.sequence, loaded.scheme, ro);
            ComplexMatrix cmp;
            if (static_cast<std::size_t>(target.rows()) == loaded.scheme.dim)
                cmp = u;
            else if (static_cast<std::size_t>(target.rows()) == loaded.scheme.symmetric_count)
                cmp = loaded.scheme.symmetric_block(u);
            else
                throw InputError("target dimension matches neither the system nor its symmetric manifold");
            const bool ok = equal_up_to_global_phase(cmp, target, tol);
            out << (ok ? "match" : "mismatch") << '\n';
            return ok ? kExitOk : kExitVerifyFailed;
        }
        if (tr->parsed()) {
            const auto loaded = detail::load_program(system_path, program_path, model);
            const auto [r, s] = detail::parse_pair(pair_text);
            const SubspacePair pair(std::min(r, s), std::max(r, s), loaded.scheme.dim);
            DensityState start;
            if (initial == "equilibrium") {
                start = equilibrium_state(loaded.scheme);
            } else {
                start.rho = ComplexMatrix::Zero(loaded.scheme.dim, loaded.scheme.dim);
                if (initial == "lower") start.rho(pair.r(), pair.r()) = 1.0;
                if (initial == "upper") start.rho(pair.s(), pair.s()) = 1.0;
                if (initial == "x") start.rho(pair.r(), pair.r()) = start.rho(pair.s(), pair.s()) = start.rho(pair.r(), pair.s()) =
                    start.rho(pair.s(), pair.r()) = 0.5;
            }
            RunOptions ro;
            const auto traj = record_trajectory(start, loaded.sequence, loaded.scheme, pair, steps, ro);
            export_trajectory_csv(traj, out_path);
            out << traj.points.size() << " samples, " << (traj.closed() ? "closed" : "open") << '\n';
            bool unit = true;
            for (const auto &p : traj.points) unit = unit && std::abs(p.norm() - 1.0) <= 1e-6;
            if (traj.closed() && unit) out << "solid angle " << std::setprecision(8) << solid_angle(traj) << " rad\n";
            if (!unit) out << "path leaves the level pair; no solid angle\n";
            return kExitOk;
        }
    } catch (const InputError &e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    }
    return kExitInputError;
}

}  // namespace geophase
