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

// Line-oriented pulse programs:
//
//   system <path|ch3i|ch3cn|ch2fcn>
//   soss | pps | crush
//   pulse <channel> <angle_deg> <phase_deg>
//   selpulse <transition> <angle_deg> <phase_deg> [dur <t>] [shaped]
//   delay <t>
//   echo <channel> <tau>
//   gphase <transition> <phi_deg>
//   djgate <f1..f8>
//   oracle <6-bit string>
//   acquire <channel>
//
// Times take an s, ms or us suffix (bare numbers are seconds); '#' starts a comment.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "geophase/algorithms.hpp"

namespace geophase {

class ProgramError : public InputError {
   public:
    ProgramError(int line, int column, const std::string &what)
        : InputError("line " + std::to_string(line) + ":" + std::to_string(column) + ": " + what), line_(line), column_(column) {}
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

   private:
    int line_;
    int column_;
};

enum class Op { System, Soss, Pps, Pulse, SelPulse, Delay, Echo, Crush, GPhase, DJGate, Oracle, Acquire };

struct Statement {
    Op op = Op::Crush;
    int line = 0;
    std::string name;  // channel, transition, path, function or bit string
    double angle_deg = 0.0;
    double phase_deg = 0.0;
    std::optional<double> duration;  // seconds
    bool shaped = false;

    bool operator==(const Statement &o) const {
        return op == o.op && name == o.name && angle_deg == o.angle_deg && phase_deg == o.phase_deg && duration == o.duration &&
               shaped == o.shaped;
    }
};

struct PulseProgram {
    std::string source;
    std::vector<Statement> statements;
    std::optional<std::string> system;  // as written after `system`

    std::vector<std::string> acquired_channels() const {
        std::vector<std::string> out;
        for (const auto &s : statements)
            if (s.op == Op::Acquire) out.push_back(s.name);
        return out;
    }
};

namespace detail {

struct Token {
    std::string text;
    int column;
};

inline std::vector<Token> tokenize(const std::string &line) {
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t end = std::min(line.find('#'), line.size());
    while (i < end) {
        while (i < end && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i >= end) break;
        const std::size_t start = i;
        while (i < end && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
    }
    return out;
}

inline std::optional<double> to_double(const std::string &text) {
    double v = 0.0;
    const char *first = text.data(), *last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
    return v;
}

inline double parse_number(const Token &tok, int line, const char *what) {
    const auto v = to_double(tok.text);
    if (!v) throw ProgramError(line, tok.column, std::string("expected ") + what + ", got '" + tok.text + "'");
    return *v;
}

inline double parse_time(const Token &tok, int line) {
    std::size_t split = tok.text.size();
    while (split > 0 && std::isalpha(static_cast<unsigned char>(tok.text[split - 1]))) --split;
    const std::string unit = tok.text.substr(split);
    double scale = 1.0;
    if (unit == "ms")
        scale = 1e-3;
    else if (unit == "us")
        scale = 1e-6;
    else if (unit != "s" && !unit.empty())
        throw ProgramError(line, tok.column + static_cast<int>(split), "unknown time unit '" + unit + "'");
    const auto v = to_double(tok.text.substr(0, split));
    if (!v) throw ProgramError(line, tok.column, "expected a duration, got '" + tok.text + "'");
    if (*v < 0.0) throw ProgramError(line, tok.column, "duration must be non-negative");
    return *v * scale;
}

inline std::string format_number(double v) {
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

}  // namespace detail

inline PulseProgram parse_program(const std::string &text) {
    PulseProgram prog;
    prog.source = text;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    bool acquired = false;
    while (std::getline(in, raw)) {
        ++line;
        const auto toks = detail::tokenize(raw);
        if (toks.empty()) continue;
        const std::string &kw = toks[0].text;
        auto expect = [&](std::size_t lo, std::size_t hi) {
            if (toks.size() < lo + 1) throw ProgramError(line, toks.back().column, "'" + kw + "' is missing arguments");
            if (toks.size() > hi + 1) throw ProgramError(line, toks[hi + 1].column, "unexpected '" + toks[hi + 1].text + "'");
        };
        Statement st;
        st.line = line;
        if (acquired && kw != "acquire") throw ProgramError(line, toks[0].column, "only acquire may follow acquire");
        if (kw == "system") {
            expect(1, 1);
            if (prog.system) throw ProgramError(line, toks[0].column, "system given twice");
            prog.system = toks[1].text;
            continue;
        } else if (kw == "soss") {
            expect(0, 0);
            st.op = Op::Soss;
        } else if (kw == "pps") {
            expect(0, 0);
            st.op = Op::Pps;
        } else if (kw == "crush") {
            expect(0, 0);
            st.op = Op::Crush;
        } else if (kw == "pulse") {
            expect(3, 3);
            st.op = Op::Pulse;
            st.name = toks[1].text;
            st.angle_deg = detail::parse_number(toks[2], line, "an angle in degrees");
            st.phase_deg = detail::parse_number(toks[3], line, "a phase in degrees");
        } else if (kw == "selpulse") {
            expect(3, 6);
            st.op = Op::SelPulse;
            st.name = toks[1].text;
            st.angle_deg = detail::parse_number(toks[2], line, "an angle in degrees");
            st.phase_deg = detail::parse_number(toks[3], line, "a phase in degrees");
            for (std::size_t i = 4; i < toks.size(); ++i) {
                if (toks[i].text == "dur" && !st.duration) {
                    if (i + 1 >= toks.size()) throw ProgramError(line, toks[i].column, "'dur' needs a duration");
                    st.duration = detail::parse_time(toks[++i], line);
                } else if (toks[i].text == "shaped" && !st.shaped) {
                    st.shaped = true;
                } else {
                    throw ProgramError(line, toks[i].column, "unexpected '" + toks[i].text + "'");
                }
            }
            if (st.shaped && !(st.duration && *st.duration > 0.0))
                throw ProgramError(line, toks[0].column, "a shaped pulse needs a positive 'dur'");
        } else if (kw == "delay") {
            expect(1, 1);
            st.op = Op::Delay;
            st.duration = detail::parse_time(toks[1], line);
        } else if (kw == "echo") {
            expect(2, 2);
            st.op = Op::Echo;
            st.name = toks[1].text;
            st.duration = detail::parse_time(toks[2], line);
        } else if (kw == "gphase") {
            expect(2, 2);
            st.op = Op::GPhase;
            st.name = toks[1].text;
            st.angle_deg = detail::parse_number(toks[2], line, "a phase in degrees");
        } else if (kw == "djgate") {
            expect(1, 1);
            st.op = Op::DJGate;
            st.name = toks[1].text;
            try {
                (void)dj_function(st.name);
            } catch (const InputError &e) {
                throw ProgramError(line, toks[1].column, e.what());
            }
        } else if (kw == "oracle") {
            expect(1, 1);
            st.op = Op::Oracle;
            st.name = toks[1].text;
            try {
                (void)parse_parity_string(st.name);
            } catch (const InputError &e) {
                throw ProgramError(line, toks[1].column, e.what());
            }
        } else if (kw == "acquire") {
            expect(1, 1);
            st.op = Op::Acquire;
            st.name = toks[1].text;
            acquired = true;
        } else {
            throw ProgramError(line, toks[0].column, "unknown keyword '" + kw + "'");
        }
        prog.statements.push_back(st);
    }
    if (!acquired) throw ProgramError(line == 0 ? 1 : line, 1, "no acquire");
    return prog;
}

/// Canonical text; parses back to the same statements.
inline std::string pretty_print(const PulseProgram &prog) {
    using detail::format_number;
    std::ostringstream out;
    if (prog.system) out << "system " << *prog.system << '\n';
    for (const auto &s : prog.statements) {
        switch (s.op) {
            case Op::System: break;
            case Op::Soss: out << "soss"; break;
            case Op::Pps: out << "pps"; break;
            case Op::Crush: out << "crush"; break;
            case Op::Pulse: out << "pulse " << s.name << ' ' << format_number(s.angle_deg) << ' ' << format_number(s.phase_deg); break;
            case Op::SelPulse:
                out << "selpulse " << s.name << ' ' << format_number(s.angle_deg) << ' ' << format_number(s.phase_deg);
                if (s.duration) out << " dur " << format_number(*s.duration) << 's';
                if (s.shaped) out << " shaped";
                break;
            case Op::Delay: out << "delay " << format_number(*s.duration) << 's'; break;
            case Op::Echo: out << "echo " << s.name << ' ' << format_number(*s.duration) << 's'; break;
            case Op::GPhase: out << "gphase " << s.name << ' ' << format_number(s.angle_deg); break;
            case Op::DJGate: out << "djgate " << s.name; break;
            case Op::Oracle: out << "oracle " << s.name; break;
            case Op::Acquire: out << "acquire " << s.name; break;
        }
        out << '\n';
    }
    return out.str();
}

inline double deg(double d) { return d * kPi / 180.0; }

struct CompileOptions {
    PulseModel model = PulseModel::Ideal;  // for pulses generated by gphase/djgate/oracle
};

/// Expands macros and resolves every label against the scheme; errors carry the line.
inline PulseSequence compile_program(const PulseProgram &prog, const LevelScheme &scheme, const CompileOptions &opts = {}) {
    PulseSequence seq;
    RunModel model;
    model.model = opts.model;
    for (const auto &s : prog.statements) {
        try {
            switch (s.op) {
                case Op::System: break;
                case Op::Soss: seq = concat(std::move(seq), soss_sequence(scheme.spec.template_name)); break;
                case Op::Pps: seq = concat(std::move(seq), pps_sequence(scheme.spec.template_name)); break;
                case Op::Crush: seq.push_back(GradientCrusher{}); break;
                case Op::Pulse:
                    (void)scheme.ops(s.name);
                    seq.push_back(HardPulse{s.name, deg(s.angle_deg), deg(s.phase_deg)});
                    break;
                case Op::SelPulse:
                    (void)scheme.transition(s.name);
                    seq.push_back(SelectivePulse{s.name, deg(s.angle_deg), deg(s.phase_deg), s.duration.value_or(0.0),
                                                 s.shaped ? PulseModel::Gaussian : PulseModel::Ideal, true});
                    break;
                case Op::Delay: seq.push_back(Delay{*s.duration}); break;
                case Op::Echo:
                    (void)scheme.ops(s.name);
                    seq = concat(std::move(seq), spin_echo_block(s.name, *s.duration));
                    break;
                case Op::GPhase: {
                    (void)scheme.transition(s.name);
                    GateOptions g;
                    g.model = opts.model;
                    if (opts.model == PulseModel::Gaussian) g.pulse_duration = default_pulse_duration(scheme.spec);
                    seq = concat(std::move(seq), geometric_phase_gate(scheme, s.name, deg(s.angle_deg), g).sequence);
                    break;
                }
                case Op::DJGate: seq = concat(std::move(seq), dj_gate(scheme, dj_function(s.name), model).sequence); break;
                case Op::Oracle: {
                    const auto oracle = parity_oracle(parse_parity_string(s.name));
                    seq = concat(std::move(seq),
                                 geometric_gate_layout(scheme, oracle.gates, parity_gate_options(scheme.spec, model)).sequence);
                    break;
                }
                case Op::Acquire:
                    (void)scheme.ops(s.name);
                    seq.push_back(AcquireMarker{s.name});
                    break;
            }
        } catch (const ProgramError &) {
            throw;
        } catch (const InputError &e) {
            throw ProgramError(s.line, 1, e.what());
        }
    }
    return seq;
}

inline std::string read_text_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// System named in a program: a bundled template name or a JSON path relative to `base_dir`.
inline SpinSystemSpec resolve_system(const std::string &ref, const std::string &base_dir = ".") {
    namespace fs = std::filesystem;
    fs::path p(ref);
    if (p.is_relative() && !base_dir.empty()) p = fs::path(base_dir) / p;
    if (fs::exists(p)) return load_system(p.string());
    if (ref == "ch3i" || ref == "ch3cn" || ref == "ch2fcn") return bundled_spec(ref);
    throw InputError("cannot find system '" + ref + "'");
}

}  // namespace geophase
