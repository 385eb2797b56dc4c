#include "pbl/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "pbl/grid.hpp"

namespace pbl {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError("config: " + what);
}

}  // namespace

void validate(const RunConfig& c) {
    require(c.delta >= 0.0 && c.delta <= 0.1, "delta must lie in [0, 0.1]");
    require(c.epsilon > 0.0, "epsilon must be positive");
    // delta = 0 is the degenerate expansion; there is nothing for eps to be small against
    if (c.eps_gate && c.delta > 0.0) {
        std::ostringstream os;
        os << "epsilon = " << c.epsilon << " exceeds delta^2 = " << c.delta * c.delta;
        require(c.epsilon <= c.delta * c.delta, os.str());
    }
    require(c.gamma >= 0.0 && c.gamma < 0.25, "gamma must lie in [0, 1/4)");
    require(c.kappa > 0.0 && c.kappa <= 0.1, "kappa must lie in (0, 0.1]");
    require(c.n >= 1, "n must be at least 1");
    require(c.x_max > 1.0 && c.y_max > 0.0, "x_max must exceed 1 and y_max be positive");
    require(c.nx >= 8 && c.ny >= 8, "nx and ny must be at least 8");
    require(c.stencil_order == 2 || c.stencil_order == 4, "stencil_order must be 2 or 4");
    require(c.newton_tol > 0.0 && c.bc_tol > 0.0 && c.tail_tol > 0.0 && c.mp_tol >= 0.0 && c.interp_tol > 0.0 &&
                c.quad_tol > 0.0,
            "tolerances must be positive");
    require(c.delta_half > 0.0 && (c.delta == 0.0 || c.delta_half < c.delta), "delta_half must lie in (0, delta)");
    try {
        parse_stretch(c.stretch);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

void apply_override(json& j, const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("config: override must be key=value: " + assignment);
    const std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
    json* node = &j;
    std::size_t start = 0;
    while (true) {
        auto dot = key.find('.', start);
        std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (dot == std::string::npos) {
            json value = json::parse(text, nullptr, false);
            (*node)[part] = value.is_discarded() ? json(text) : value;
            return;
        }
        node = &(*node)[part];
        start = dot + 1;
    }
}

RunConfig load_config(const std::filesystem::path& file, const std::vector<std::string>& overrides) {
    json j = RunConfig{};
    if (!file.empty()) {
        std::ifstream in(file);
        if (!in) throw ConfigError("config: cannot open " + file.string());
        json f = json::parse(in, nullptr, false);
        if (f.is_discarded() || !f.is_object()) throw ConfigError("config: " + file.string() + " is not a JSON object");
        j.merge_patch(f);
    }
    for (const auto& o : overrides) apply_override(j, o);
    const json known = RunConfig{};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.contains(it.key())) throw ConfigError("config: unknown key " + it.key());
    for (auto it = j["verdict"].begin(); it != j["verdict"].end(); ++it)
        if (!known["verdict"].contains(it.key())) throw ConfigError("config: unknown key verdict." + it.key());
    RunConfig c;
    try {
        c = j.get<RunConfig>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    validate(c);
    return c;
}

}  // namespace pbl
