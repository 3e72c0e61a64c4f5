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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "geophase/system.hpp"

namespace geophase {

struct Stick {
    double frequency_hz = 0.0;
    Complex amplitude;  // real part absorptive, imaginary part dispersive
    std::vector<std::string> labels;
    double absorptive() const { return amplitude.real(); }
    double dispersive() const { return amplitude.imag(); }
};

struct Spectrum {
    std::string channel;
    double linewidth_hz = 10.0;
    std::vector<Stick> sticks;  // ascending frequency
    std::vector<double> trace_hz;
    std::vector<double> trace;  // absorptive-mode display

    double max_magnitude() const {
        double m = 0.0;
        for (const auto &s : sticks) m = std::max(m, std::abs(s.amplitude));
        return m;
    }
    bool inverted(const Stick &s, double fraction = 0.1) const { return s.absorptive() < -fraction * max_magnitude(); }
    int inverted_count(double fraction = 0.1) const {
        return static_cast<int>(std::count_if(sticks.begin(), sticks.end(), [&](const Stick &s) { return inverted(s, fraction); }));
    }
    /// Line magnitudes relative to the smallest one.
    std::vector<double> ratios() const {
        std::vector<double> out;
        double smallest = 0.0;
        for (const auto &s : sticks) {
            const double m = std::abs(s.amplitude);
            if (m > 0.0 && (smallest == 0.0 || m < smallest)) smallest = m;
        }
        for (const auto &s : sticks) out.push_back(smallest > 0.0 ? std::abs(s.amplitude) / smallest : 0.0);
        return out;
    }
    const Stick *near(double f, double tol = 0.5) const {
        for (const auto &s : sticks)
            if (std::abs(s.frequency_hz - f) < tol) return &s;
        return nullptr;
    }
};

struct SpectrumOptions {
    double linewidth_hz = 10.0;
    double bin_tol_hz = 0.5;
    int points = 4096;
    bool trace = true;
};

/// Absorptive and dispersive Lorentzian of unit area, FWHM `lw`.
inline double lorentz_abs(double df, double lw) {
    const double g = 0.5 * lw;
    return g / (kPi * (df * df + g * g));
}
inline double lorentz_disp(double df, double lw) {
    const double g = 0.5 * lw;
    return df / (kPi * (df * df + g * g));
}

inline void broaden(Spectrum &spec, int points) {
    spec.trace_hz.clear();
    spec.trace.clear();
    if (spec.sticks.empty() || points < 2) return;
    double fmax = 0.0;
    for (const auto &s : spec.sticks) fmax = std::max(fmax, std::abs(s.frequency_hz));
    const double half = std::max(1.2 * fmax, fmax + 50.0 * spec.linewidth_hz);
    const double step = 2.0 * half / (points - 1);
    for (int i = 0; i < points; ++i) {
        const double f = -half + i * step;
        double v = 0.0;
        for (const auto &s : spec.sticks) {
            const double df = f - s.frequency_hz;
            v += s.absorptive() * lorentz_abs(df, spec.linewidth_hz) - s.dispersive() * lorentz_disp(df, spec.linewidth_hz);
        }
        spec.trace_hz.push_back(f);
        spec.trace.push_back(v);
    }
}

/// Trapezoidal area under the broadened trace.
inline double trace_integral(const Spectrum &spec) {
    double a = 0.0;
    for (std::size_t i = 1; i < spec.trace.size(); ++i)
        a += 0.5 * (spec.trace[i] + spec.trace[i - 1]) * (spec.trace_hz[i] - spec.trace_hz[i - 1]);
    return a;
}

/// Detected single-quantum signal of one channel: each allowed line contributes
/// <a|F+|b> rho_ba at (E_a - E_b)/2pi; lines closer than the bin tolerance merge.
inline Spectrum synthesize_spectrum(const DensityState &state, const LevelScheme &scheme, const std::string &channel,
                                    const SpectrumOptions &opts = {}) {
    const auto &cat = scheme.catalog(channel);
    Spectrum spec;
    spec.channel = channel;
    spec.linewidth_hz = opts.linewidth_hz;
    std::vector<Stick> raw;
    for (const auto &t : cat.transitions) {
        const Complex amp = t.moment * state.rho(t.lower, t.upper);
        raw.push_back({t.frequency_hz, amp, {t.label}});
    }
    std::stable_sort(raw.begin(), raw.end(), [](const Stick &a, const Stick &b) { return a.frequency_hz < b.frequency_hz; });
    for (const auto &s : raw) {
        if (!spec.sticks.empty() && std::abs(s.frequency_hz - spec.sticks.back().frequency_hz) < opts.bin_tol_hz) {
            auto &last = spec.sticks.back();
            last.amplitude += s.amplitude;
            last.labels.insert(last.labels.end(), s.labels.begin(), s.labels.end());
        } else {
            spec.sticks.push_back(s);
        }
    }
    double scale = 0.0;
    for (const auto &t : cat.transitions) scale = std::max(scale, std::abs(t.moment) * std::abs(t.moment));
    double rho_scale = std::max(max_abs(state.rho), 1e-300);
    const double floor = 1e-9 * scale * rho_scale;
    std::erase_if(spec.sticks, [&](const Stick &s) { return std::abs(s.amplitude) <= floor; });
    for (auto &s : spec.sticks) {
        if (std::abs(s.frequency_hz) < 1e-9) s.frequency_hz = 0.0;
        if (std::abs(s.amplitude.real()) <= floor) s.amplitude.real(0.0);
        if (std::abs(s.amplitude.imag()) <= floor) s.amplitude.imag(0.0);
    }
    if (opts.trace) broaden(spec, opts.points);
    return spec;
}

inline nlohmann::json spectrum_to_json(const Spectrum &spec) {
    nlohmann::json j;
    j["channel"] = spec.channel;
    j["linewidth_hz"] = spec.linewidth_hz;
    j["sticks"] = nlohmann::json::array();
    for (const auto &s : spec.sticks)
        j["sticks"].push_back({{"freq_hz", s.frequency_hz}, {"abs", s.absorptive()}, {"disp", s.dispersive()}, {"labels", s.labels}});
    j["trace"] = {{"freq_hz", spec.trace_hz}, {"abs", spec.trace}};
    return j;
}

inline Spectrum spectrum_from_json(const nlohmann::json &j) {
    try {
        Spectrum spec;
        spec.channel = j.at("channel").get<std::string>();
        spec.linewidth_hz = j.at("linewidth_hz").get<double>();
        for (const auto &s : j.at("sticks"))
            spec.sticks.push_back({s.at("freq_hz").get<double>(), Complex(s.at("abs").get<double>(), s.at("disp").get<double>()),
                                   s.value("labels", std::vector<std::string>{})});
        if (j.contains("trace")) {
            spec.trace_hz = j["trace"].at("freq_hz").get<std::vector<double>>();
            spec.trace = j["trace"].at("abs").get<std::vector<double>>();
        }
        return spec;
    } catch (const nlohmann::json::exception &e) {
        throw InputError(std::string("malformed spectrum json: ") + e.what());
    }
}

inline std::string spectrum_csv(const Spectrum &spec) {
    std::ostringstream out;
    out << std::setprecision(17) << "freq_hz,abs,disp\n";
    for (const auto &s : spec.sticks) out << s.frequency_hz << ',' << s.absorptive() << ',' << s.dispersive() << '\n';
    return out.str();
}

/// Stick plot; lines point down when their absorptive part is negative.
inline std::string spectrum_svg(const Spectrum &spec) {
    const double width = 640.0, height = 320.0, mid = height / 2.0, margin = 30.0;
    double fmax = 1.0;
    for (const auto &s : spec.sticks) fmax = std::max(fmax, std::abs(s.frequency_hz));
    fmax *= 1.2;
    const double amax = std::max(spec.max_magnitude(), 1e-300);
    std::ostringstream out;
    out << std::setprecision(6);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\" viewBox=\"0 0 "
        << width << ' ' << height << "\">\n";
    out << "<line x1=\"0\" y1=\"" << mid << "\" x2=\"" << width << "\" y2=\"" << mid << "\" stroke=\"gray\"/>\n";
    for (const auto &s : spec.sticks) {
        // frequency axis runs right to left as in NMR plots
        const double x = width / 2.0 - (s.frequency_hz / fmax) * (width / 2.0 - margin);
        double a = s.absorptive();
        if (std::abs(a) < 1e-12 * amax) a = 0.0;
        const double y = mid - (a / amax) * (mid - margin);
        const char *cls = a < 0.0 ? "down" : "up";
        out << "<line class=\"" << cls << "\" x1=\"" << x << "\" y1=\"" << mid << "\" x2=\"" << x << "\" y2=\"" << y
            << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

enum class SpectrumFormat { Json, Csv, Svg };

inline SpectrumFormat format_from_path(const std::string &path) {
    auto ends = [&](const std::string &ext) {
        return path.size() >= ext.size() && path.compare(path.size() - ext.size(), ext.size(), ext) == 0;
    };
    if (ends(".csv")) return SpectrumFormat::Csv;
    if (ends(".svg")) return SpectrumFormat::Svg;
    return SpectrumFormat::Json;
}

inline void export_spectrum(const Spectrum &spec, const std::string &path, SpectrumFormat format) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    switch (format) {
        case SpectrumFormat::Json: out << spectrum_to_json(spec).dump(2) << '\n'; break;
        case SpectrumFormat::Csv: out << spectrum_csv(spec); break;
        case SpectrumFormat::Svg: out << spectrum_svg(spec); break;
    }
    if (!out) throw std::runtime_error("write failed for " + path);
}

inline Spectrum read_spectrum_json(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception &e) {
        throw InputError(std::string("malformed spectrum json: ") + e.what());
    }
    return spectrum_from_json(j);
}

}  // namespace geophase
