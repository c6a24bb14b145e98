#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "json.hpp"

#include "costopt/likelihood.hpp"
#include "costopt/testdesign.hpp"

namespace costopt {

// One self-contained problem statement: the two hypotheses, the sample
// size, the error costs, and optionally a Neyman-Pearson size to compare
// against. Serializes to/from a small JSON document.
struct scenario {
    density_model p0;
    density_model p1;
    std::int64_t sample_size;
    cost_model costs;
    std::optional<double> np_size;

    hypothesis_pair pair() const { return hypothesis_pair{p0, p1, sample_size}; }

    bool operator==(const scenario&) const = default;
};

namespace detail {

inline std::string line_anchor(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline const nlohmann::json& require_field(const nlohmann::json& j, const std::string& key,
                                           const std::string& path) {
    if (!j.is_object() || !j.contains(key)) {
        throw input_error(path + ": missing required field '" + key + "'");
    }
    return j.at(key);
}

inline double require_number(const nlohmann::json& j, const std::string& key,
                             const std::string& path) {
    const auto& v = require_field(j, key, path);
    if (!v.is_number()) throw input_error(path + "." + key + ": expected a number");
    return v.get<double>();
}

inline std::int64_t require_integer(const nlohmann::json& j, const std::string& key,
                                    const std::string& path) {
    const auto& v = require_field(j, key, path);
    if (!v.is_number_integer()) throw input_error(path + "." + key + ": expected an integer");
    return v.get<std::int64_t>();
}

inline density_model model_from_json(const nlohmann::json& j, const std::string& path) {
    const auto& fam = require_field(j, "family", path);
    if (!fam.is_string()) throw input_error(path + ".family: expected a string");
    const std::string name = fam.get<std::string>();
    try {
        if (name == "gaussian") {
            return density_model{
                gaussian{require_number(j, "mean", path), require_number(j, "variance", path)}};
        }
        if (name == "poisson") return density_model{poisson{require_number(j, "rate", path)}};
        if (name == "bernoulli") return density_model{bernoulli{require_number(j, "p", path)}};
        if (name == "binomial") {
            return density_model{
                binomial{require_integer(j, "trials", path), require_number(j, "p", path)}};
        }
        if (name == "exponential") {
            return density_model{exponential{require_number(j, "rate", path)}};
        }
        if (name == "tabulated") {
            const auto& atoms = require_field(j, "atoms", path);
            const auto& masses = require_field(j, "masses", path);
            if (!atoms.is_array() || !masses.is_array()) {
                throw input_error(path + ": atoms and masses must be arrays");
            }
            tabulated t;
            for (const auto& a : atoms) {
                if (!a.is_number_integer()) throw input_error(path + ".atoms: expected integers");
                t.atoms.push_back(a.get<std::int64_t>());
            }
            for (const auto& m : masses) {
                if (!m.is_number()) throw input_error(path + ".masses: expected numbers");
                t.masses.push_back(m.get<double>());
            }
            return density_model{std::move(t)};
        }
    } catch (const input_error& e) {
        // Parameter-level validation failures get the field context attached.
        if (std::string(e.what()).find(path) == std::string::npos) {
            throw input_error(path + ": " + e.what());
        }
        throw;
    }
    throw input_error(path + ".family: unknown family '" + name + "'");
}

inline nlohmann::ordered_json model_to_json(const density_model& model) {
    nlohmann::ordered_json j;
    if (const auto* g = model.as<gaussian>()) {
        j["family"] = "gaussian";
        j["mean"] = g->mean;
        j["variance"] = g->variance;
    } else if (const auto* p = model.as<poisson>()) {
        j["family"] = "poisson";
        j["rate"] = p->rate;
    } else if (const auto* b = model.as<bernoulli>()) {
        j["family"] = "bernoulli";
        j["p"] = b->p;
    } else if (const auto* b = model.as<binomial>()) {
        j["family"] = "binomial";
        j["trials"] = b->trials;
        j["p"] = b->p;
    } else if (const auto* e = model.as<exponential>()) {
        j["family"] = "exponential";
        j["rate"] = e->rate;
    } else {
        const auto& t = std::get<tabulated>(model.family());
        j["family"] = "tabulated";
        j["atoms"] = t.atoms;
        j["masses"] = t.masses;
    }
    return j;
}

} // namespace detail

inline scenario parse_scenario(const std::string& text, const std::string& origin = "<string>") {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw input_error(origin + ": parse error at " + detail::line_anchor(text, e.byte) + ": " +
                          e.what());
    }
    const density_model p0 = detail::model_from_json(detail::require_field(j, "p0", origin), "p0");
    const density_model p1 = detail::model_from_json(detail::require_field(j, "p1", origin), "p1");
    const std::int64_t n = detail::require_integer(j, "sample_size", origin);
    if (n < 1) throw input_error("sample_size: must be >= 1");
    const auto& costs = detail::require_field(j, "costs", origin);
    const cost_model cm{detail::require_number(costs, "c0", "costs"),
                        detail::require_number(costs, "c1", "costs")};
    std::optional<double> np_size;
    if (j.contains("np_size") && !j.at("np_size").is_null()) {
        if (!j.at("np_size").is_number()) throw input_error("np_size: expected a number");
        np_size = j.at("np_size").get<double>();
        if (!(*np_size > 0.0 && *np_size < 1.0)) {
            throw input_error("np_size: must lie in (0,1)");
        }
    }
    scenario s{p0, p1, n, cm, np_size};
    s.pair(); // rejects mismatched base measures and identical hypotheses now
    return s;
}

inline scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open scenario file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path.string());
}

inline std::string to_json_string(const scenario& s) {
    nlohmann::ordered_json j;
    j["p0"] = detail::model_to_json(s.p0);
    j["p1"] = detail::model_to_json(s.p1);
    j["sample_size"] = s.sample_size;
    j["costs"] = {{"c0", s.costs.c0}, {"c1", s.costs.c1}};
    if (s.np_size) j["np_size"] = *s.np_size;
    return j.dump(2) + "\n";
}

} // namespace costopt
