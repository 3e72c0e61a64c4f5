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

#include <fstream>
#include <string>

#include <json.hpp>

#include "geophase/system.hpp"

namespace geophase {

/// 13CH3I: three methyl protons plus 13C. D_HH = 3553/3 Hz, 2D_CH + J_CH = 2053 Hz.
inline SpinSystemSpec ch3i_spec() {
    SpinSystemSpec s;
    s.name = "13CH3I";
    s.template_name = "ch3i";
    s.channels = {{"H", 0.0, "h", std::nullopt}, {"C", 0.0, "C", std::nullopt}};
    s.group = {"H", 3, 3553.0 / 3.0};
    s.hetero = {{"H", "C", 2053.0, 0.0}};
    return s;
}

/// CH3CN: three methyl protons, 3 D_HH = 4968 Hz.
inline SpinSystemSpec ch3cn_spec() {
    SpinSystemSpec s;
    s.name = "CH3CN";
    s.template_name = "ch3cn";
    s.channels = {{"H", 0.0, "", std::nullopt}};
    s.group = {"H", 3, 4968.0 / 3.0};
    return s;
}

/// CH2FCN: two methylene protons plus 19F. 3 D_HH = 5694 Hz, 2D_FH + J_FH = 473 Hz.
inline SpinSystemSpec ch2fcn_spec() {
    SpinSystemSpec s;
    s.name = "CH2FCN";
    s.template_name = "ch2fcn";
    s.channels = {{"H", 0.0, "H", std::nullopt}, {"F", 0.0, "F", std::nullopt}};
    s.group = {"H", 2, 5694.0 / 3.0};
    s.hetero = {{"H", "F", 473.0, 0.0}};
    return s;
}

inline SpinSystemSpec bundled_spec(const std::string &name) {
    if (name == "ch3i") return ch3i_spec();
    if (name == "ch3cn") return ch3cn_spec();
    if (name == "ch2fcn") return ch2fcn_spec();
    throw InputError("unknown molecule template " + name);
}

inline nlohmann::json spec_to_json(const SpinSystemSpec &s) {
    nlohmann::json j;
    j["name"] = s.name;
    if (!s.template_name.empty()) j["template"] = s.template_name;
    j["channels"] = nlohmann::json::array();
    for (const auto &c : s.channels) {
        nlohmann::json cj{{"species", c.species}, {"offset_hz", c.offset_hz}, {"label_prefix", c.label_prefix}};
        if (c.gamma) cj["gamma"] = *c.gamma;
        j["channels"].push_back(cj);
    }
    j["equivalent_group"] = {{"channel", s.group.channel}, {"count", s.group.count}, {"d_homo_hz", s.group.d_homo_hz}};
    j["hetero_couplings"] = nlohmann::json::array();
    for (const auto &h : s.hetero) j["hetero_couplings"].push_back({{"a", h.a}, {"b", h.b}, {"j_hz", h.j_hz}, {"d_hz", h.d_hz}});
    return j;
}

inline SpinSystemSpec spec_from_json(const nlohmann::json &j) {
    SpinSystemSpec s;
    try {
        s.name = j.value("name", std::string{});
        s.template_name = j.value("template", std::string{});
        for (const auto &c : j.at("channels")) {
            Channel ch;
            ch.species = c.at("species").get<std::string>();
            ch.offset_hz = c.value("offset_hz", 0.0);
            ch.label_prefix = c.value("label_prefix", ch.species);
            if (c.contains("gamma")) ch.gamma = c.at("gamma").get<double>();
            s.channels.push_back(ch);
        }
        const auto &g = j.at("equivalent_group");
        s.group.channel = g.at("channel").get<std::string>();
        s.group.count = g.at("count").get<int>();
        s.group.d_homo_hz = g.at("d_homo_hz").get<double>();
        if (j.contains("hetero_couplings"))
            for (const auto &h : j.at("hetero_couplings"))
                s.hetero.push_back({h.at("a").get<std::string>(), h.at("b").get<std::string>(), h.value("j_hz", 0.0),
                                    h.value("d_hz", 0.0)});
    } catch (const nlohmann::json::exception &e) {
        throw InputError(std::string("malformed system definition: ") + e.what());
    }
    s.validate();
    return s;
}

inline SpinSystemSpec load_system(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read system file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception &e) {
        throw InputError("system file " + path + " is not valid JSON: " + e.what());
    }
    return spec_from_json(j);
}

inline void save_system(const SpinSystemSpec &s, const std::string &path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << spec_to_json(s).dump(2) << '\n';
}

}  // namespace geophase
