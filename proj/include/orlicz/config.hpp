#pragma once

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "orlicz/ellipticity.hpp"
#include "orlicz/grid.hpp"
#include "orlicz/young.hpp"

namespace orlicz {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Young-function families
// ---------------------------------------------------------------------------

/// Shorthand grammar: "power:4", "zygmund:3", "power_sum:4:3:1",
/// "dual_power_sum:1.5:1.8" (hyphens and underscores interchangeable).
inline young_function parse_family(const std::string& spec) {
    std::vector<std::string> tok;
    std::string cur;
    for (char c : spec) {
        if (c == ':') {
            tok.push_back(cur);
            cur.clear();
        } else {
            cur += (c == '-') ? '_' : c;
        }
    }
    tok.push_back(cur);
    auto need = [&](std::size_t n) {
        if (tok.size() != n + 1)
            throw std::invalid_argument("family '" + spec + "': expected " + std::to_string(n) +
                                        " parameter(s)");
    };
    auto num = [&](std::size_t i) {
        try {
            return std::stod(tok.at(i));
        } catch (const std::exception&) {
            throw std::invalid_argument("family '" + spec + "': bad number '" + tok.at(i) + "'");
        }
    };
    const std::string& kind = tok[0];
    if (kind == "power" || kind == "power_law") {
        need(1);
        return young_function::power_law(num(1));
    }
    if (kind == "zygmund" || kind == "zygmund_log") {
        need(1);
        return young_function::zygmund_log(num(1));
    }
    if (kind == "power_sum") {
        need(3);
        return young_function::power_sum(num(1), num(2), num(3));
    }
    if (kind == "dual_power_sum") {
        need(2);
        return young_function::dual_power_sum(num(1), num(2));
    }
    throw std::invalid_argument("family '" + spec + "': unknown kind '" + kind + "'");
}

/// JSON form: either a shorthand string or an object
/// {"family": "power_sum", "p": 4, "r": 3, "eps": 1}.
inline young_function family_from_json(const json& j) {
    if (j.is_string()) return parse_family(j.get<std::string>());
    if (!j.is_object() || !j.contains("family"))
        throw std::invalid_argument("young function: need a shorthand string or {family: ...}");
    std::string kind = j.at("family").get<std::string>();
    for (auto& c : kind)
        if (c == '-') c = '_';
    if (kind == "power" || kind == "power_law")
        return young_function::power_law(j.at("p").get<double>());
    if (kind == "zygmund" || kind == "zygmund_log")
        return young_function::zygmund_log(j.at("r").get<double>());
    if (kind == "power_sum")
        return young_function::power_sum(j.at("p").get<double>(), j.at("r").get<double>(),
                                         j.at("eps").get<double>());
    if (kind == "dual_power_sum")
        return young_function::dual_power_sum(j.at("q").get<double>(), j.at("r").get<double>());
    throw std::invalid_argument("young function: unknown family '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Matrices
// ---------------------------------------------------------------------------

/// Accepted forms:
///   {"re": [[...]], "im": [[...]]}        constant matrix (im optional)
///   {"kind": "identity", "d": 2}
///   {"kind": "rotation", "phi": 0.3, "d": 2}
///   {"kind": "random_elliptic", "d": 2, "seed": 7, "p": 4, "min_delta": 0.05}
inline matrix_field matrix_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("matrix: expected a JSON object");
    if (j.contains("re")) {
        auto re = j.at("re").get<std::vector<std::vector<double>>>();
        int d = static_cast<int>(re.size());
        Eigen::MatrixXcd m(d, d);
        auto im = j.contains("im") ? j.at("im").get<std::vector<std::vector<double>>>()
                                   : std::vector<std::vector<double>>(
                                         d, std::vector<double>(d, 0.0));
        if (static_cast<int>(im.size()) != d)
            throw std::invalid_argument("matrix: re and im must have the same shape");
        for (int r = 0; r < d; ++r) {
            if (static_cast<int>(re[r].size()) != d || static_cast<int>(im[r].size()) != d)
                throw std::invalid_argument("matrix: rows must all have length d");
            for (int c = 0; c < d; ++c) m(r, c) = complexd(re[r][c], im[r][c]);
        }
        return matrix_field::constant(m, j.value("name", std::string("constant")));
    }
    std::string kind = j.value("kind", std::string());
    for (auto& c : kind)
        if (c == '-') c = '_';
    if (kind == "identity") return matrix_field::identity(j.value("d", 2));
    if (kind == "rotation")
        return matrix_field::rotation(j.at("phi").get<double>(), j.value("d", 2));
    if (kind == "random_elliptic")
        return make_random_elliptic(j.value("d", 2), j.value("seed", std::uint64_t(1)),
                                    j.value("p", 4.0), j.value("min_delta", 0.05),
                                    j.value("name", std::string()));
    throw std::invalid_argument("matrix: unknown kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Grid and initial data
// ---------------------------------------------------------------------------

inline grid grid_from_json(const json& j) {
    return grid(j.value("d", 1), j.at("N").get<int>(), j.value("length", 1.0));
}

/// Data kinds: {"kind": "gaussian-bump", "center": [0.3], "width": 0.15,
/// "amplitude": 1.0, "phase": 0.0} and {"kind": "fourier-mode", "k": [1],
/// "amplitude": 1.0, "phase": 0.0}.
inline grid_function data_from_json(const json& j, const grid& g) {
    std::string kind = j.value("kind", std::string());
    for (auto& c : kind)
        if (c == '-') c = '_';
    double amp = j.value("amplitude", 1.0);
    double phase = j.value("phase", 0.0);
    complexd a = amp * complexd(std::cos(phase), std::sin(phase));
    if (kind == "gaussian_bump")
        return gaussian_bump(g, j.at("center").get<std::vector<double>>(),
                             j.at("width").get<double>(), a);
    if (kind == "fourier_mode") return fourier_mode(g, j.at("k").get<std::vector<int>>(), a);
    throw std::invalid_argument("data: unknown kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Full run configuration
// ---------------------------------------------------------------------------

struct run_config {
    std::string name;
    young_function base;
    matrix_field A, B;
    grid g;
    json data_f, data_g;
    double t_max = 0.0;  // 0 = auto
    long samples = 100000;
    std::uint64_t seed = 1;
};

inline run_config run_config_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("run config: expected a JSON object");
    for (const char* key : {"young", "A", "B", "grid", "data"})
        if (!j.contains(key))
            throw std::invalid_argument(std::string("run config: missing key '") + key + "'");
    const json& data = j.at("data");
    if (!data.contains("f") || !data.contains("g"))
        throw std::invalid_argument("run config: data needs both 'f' and 'g'");

    run_config cfg{j.value("name", std::string("run")),
                   family_from_json(j.at("young")),
                   matrix_from_json(j.at("A")),
                   matrix_from_json(j.at("B")),
                   grid_from_json(j.at("grid")),
                   data.at("f"),
                   data.at("g")};
    if (j.contains("t_max")) {
        const json& t = j.at("t_max");
        if (t.is_string()) {
            if (t.get<std::string>() != "auto")
                throw std::invalid_argument("run config: t_max must be a number or \"auto\"");
        } else {
            cfg.t_max = t.get<double>();
            if (!(cfg.t_max > 0.0))
                throw std::invalid_argument("run config: t_max must be positive");
        }
    }
    cfg.samples = j.value("samples", 100000L);
    cfg.seed = j.value("seed", std::uint64_t(1));
    return cfg;
}

}  // namespace orlicz
