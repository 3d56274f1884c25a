#include "nlslab/config.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace nlslab {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& path, const std::string& why) {
    throw std::invalid_argument("config: " + path + ": " + why);
}

void check_keys(const json& j, const std::string& path,
                const std::set<std::string>& allowed) {
    if (!j.is_object()) bad(path, "expected an object");
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key)) bad(path + "." + key, "unknown key");
}

double get_num(const json& j, const std::string& path, const char* key,
               double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) bad(path + "." + key, "expected a number");
    return j[key].get<double>();
}

template <typename T>
T get_as(const json& j, const std::string& path, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j[key].get<T>();
    } catch (const json::exception&) {
        bad(path + "." + key, "wrong type");
    }
}

} // namespace

void RunConfig::validate() const {
    if (!(k > 0.0)) throw std::invalid_argument("config: k must be positive");
    if (!(grid.L > 0.0) || grid.N < 16)
        throw std::invalid_argument("config: grid needs L > 0, N >= 16");
    if ((grid.N & (grid.N - 1)) != 0)
        throw std::invalid_argument("config: grid.N must be a power of two");
    if (!(integrator.dt > 0.0) || !(integrator.t_end > 0.0))
        throw std::invalid_argument("config: integrator needs dt, t_end > 0");
    if (solitons.empty())
        throw std::invalid_argument("config: at least one soliton");
    soliton_config().validate();
    if (perturbation.shape != "none" && perturbation.shape != "gaussian" &&
        perturbation.shape != "random")
        throw std::invalid_argument("config: unknown perturbation.shape '" +
                                    perturbation.shape + "'");
    if (perturbation.shape != "none" && !(perturbation.width > 0.0))
        throw std::invalid_argument("config: perturbation.width must be > 0");
    if (!(shooting.T > 0.0) || !(shooting.tol > 0.0) ||
        !(shooting.stage_T0 > 0.0) || !(shooting.stage_step > 0.0) ||
        shooting.ladder_steps < 0)
        throw std::invalid_argument("config: invalid shooting block");
    if (shooting.solver != "newton_fd" && shooting.solver != "secant")
        throw std::invalid_argument("config: unknown shooting.solver '" +
                                    shooting.solver + "'");
    for (double s : shooting.scan_scales)
        if (s < 0.0)
            throw std::invalid_argument("config: scan scales must be >= 0");
    for (const std::string& v : verifier.select)
        if (v != "interactt" && v != "interpol" && v != "interaction")
            throw std::invalid_argument("config: unknown verifier '" + v + "'");
    if (output_dir.empty())
        throw std::invalid_argument("config: output_dir must not be empty");
}

MultiSolitonConfig RunConfig::soliton_config() const {
    MultiSolitonConfig cfg;
    cfg.k = k;
    cfg.solitons = solitons;
    return cfg;
}

RunConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: JSON parse error: ") +
                                    e.what());
    }
    RunConfig c;
    check_keys(j, "$",
               {"k", "grid", "integrator", "solitons", "perturbation",
                "shooting", "verifier", "output_dir"});
    c.k = get_num(j, "$", "k", c.k);

    if (j.contains("grid")) {
        const json& g = j["grid"];
        check_keys(g, "$.grid", {"L", "N"});
        c.grid.L = get_num(g, "$.grid", "L", c.grid.L);
        c.grid.N = static_cast<int>(get_num(g, "$.grid", "N", c.grid.N));
    }
    if (j.contains("integrator")) {
        const json& g = j["integrator"];
        check_keys(g, "$.integrator",
                   {"dt", "t_end", "diag_stride", "snapshot_stride", "sponge"});
        c.integrator.dt = get_num(g, "$.integrator", "dt", c.integrator.dt);
        c.integrator.t_end = get_num(g, "$.integrator", "t_end", 10.0);
        c.integrator.diag_stride = static_cast<int>(
            get_num(g, "$.integrator", "diag_stride", c.integrator.diag_stride));
        c.integrator.snapshot_stride = static_cast<int>(get_num(
            g, "$.integrator", "snapshot_stride", c.integrator.snapshot_stride));
        if (g.contains("sponge")) {
            const json& s = g["sponge"];
            check_keys(s, "$.integrator.sponge", {"enabled", "width", "strength"});
            c.integrator.sponge.enabled =
                get_as<bool>(s, "$.integrator.sponge", "enabled", false);
            c.integrator.sponge.width =
                get_num(s, "$.integrator.sponge", "width", 8.0);
            c.integrator.sponge.strength =
                get_num(s, "$.integrator.sponge", "strength", 5.0);
        }
    } else {
        c.integrator.t_end = 10.0;
    }
    if (j.contains("solitons")) {
        if (!j["solitons"].is_array()) bad("$.solitons", "expected an array");
        c.solitons.clear();
        int i = 0;
        for (const json& s : j["solitons"]) {
            const std::string path = "$.solitons[" + std::to_string(i++) + "]";
            check_keys(s, path, {"v", "y", "alpha", "gamma"});
            SolitonParams p;
            p.v = get_num(s, path, "v", 0.0);
            p.y = get_num(s, path, "y", 0.0);
            p.alpha = get_num(s, path, "alpha", 1.0);
            p.gamma = get_num(s, path, "gamma", 0.0);
            c.solitons.push_back(p);
        }
    }
    if (j.contains("perturbation")) {
        const json& p = j["perturbation"];
        check_keys(p, "$.perturbation",
                   {"shape", "amplitude", "width", "center", "seed",
                    "orthogonalize"});
        c.perturbation.shape =
            get_as<std::string>(p, "$.perturbation", "shape", c.perturbation.shape);
        c.perturbation.amplitude =
            get_num(p, "$.perturbation", "amplitude", c.perturbation.amplitude);
        c.perturbation.width =
            get_num(p, "$.perturbation", "width", c.perturbation.width);
        c.perturbation.center =
            get_num(p, "$.perturbation", "center", c.perturbation.center);
        c.perturbation.seed = get_as<std::uint64_t>(p, "$.perturbation", "seed",
                                                    c.perturbation.seed);
        c.perturbation.orthogonalize = get_as<bool>(
            p, "$.perturbation", "orthogonalize", c.perturbation.orthogonalize);
    }
    if (j.contains("shooting")) {
        const json& s = j["shooting"];
        check_keys(s, "$.shooting",
                   {"T", "stage_T0", "stage_step", "tol", "ladder_steps",
                    "solver", "scan_scales"});
        c.shooting.T = get_num(s, "$.shooting", "T", c.shooting.T);
        c.shooting.stage_T0 =
            get_num(s, "$.shooting", "stage_T0", c.shooting.stage_T0);
        c.shooting.stage_step =
            get_num(s, "$.shooting", "stage_step", c.shooting.stage_step);
        c.shooting.tol = get_num(s, "$.shooting", "tol", c.shooting.tol);
        c.shooting.ladder_steps = static_cast<int>(
            get_num(s, "$.shooting", "ladder_steps", c.shooting.ladder_steps));
        c.shooting.solver =
            get_as<std::string>(s, "$.shooting", "solver", c.shooting.solver);
        c.shooting.scan_scales = get_as<std::vector<double>>(
            s, "$.shooting", "scan_scales", c.shooting.scan_scales);
    }
    if (j.contains("verifier")) {
        const json& v = j["verifier"];
        check_keys(v, "$.verifier",
                   {"select", "ratio_upper", "ratio_lower", "rate_lo", "rate_hi"});
        c.verifier.select = get_as<std::vector<std::string>>(
            v, "$.verifier", "select", c.verifier.select);
        c.verifier.ratio_upper =
            get_num(v, "$.verifier", "ratio_upper", c.verifier.ratio_upper);
        c.verifier.ratio_lower =
            get_num(v, "$.verifier", "ratio_lower", c.verifier.ratio_lower);
        c.verifier.rate_lo = get_num(v, "$.verifier", "rate_lo", c.verifier.rate_lo);
        c.verifier.rate_hi = get_num(v, "$.verifier", "rate_hi", c.verifier.rate_hi);
    }
    c.output_dir = get_as<std::string>(j, "$", "output_dir", c.output_dir);
    c.validate();
    return c;
}

std::string config_to_json(const RunConfig& c) {
    json j;
    j["k"] = c.k;
    j["grid"] = {{"L", c.grid.L}, {"N", c.grid.N}};
    j["integrator"] = {
        {"dt", c.integrator.dt},
        {"t_end", c.integrator.t_end},
        {"diag_stride", c.integrator.diag_stride},
        {"snapshot_stride", c.integrator.snapshot_stride},
        {"sponge",
         {{"enabled", c.integrator.sponge.enabled},
          {"width", c.integrator.sponge.width},
          {"strength", c.integrator.sponge.strength}}}};
    j["solitons"] = json::array();
    for (const SolitonParams& p : c.solitons)
        j["solitons"].push_back(
            {{"v", p.v}, {"y", p.y}, {"alpha", p.alpha}, {"gamma", p.gamma}});
    j["perturbation"] = {{"shape", c.perturbation.shape},
                         {"amplitude", c.perturbation.amplitude},
                         {"width", c.perturbation.width},
                         {"center", c.perturbation.center},
                         {"seed", c.perturbation.seed},
                         {"orthogonalize", c.perturbation.orthogonalize}};
    j["shooting"] = {{"T", c.shooting.T},
                     {"stage_T0", c.shooting.stage_T0},
                     {"stage_step", c.shooting.stage_step},
                     {"tol", c.shooting.tol},
                     {"ladder_steps", c.shooting.ladder_steps},
                     {"solver", c.shooting.solver},
                     {"scan_scales", c.shooting.scan_scales}};
    j["verifier"] = {{"select", c.verifier.select},
                     {"ratio_upper", c.verifier.ratio_upper},
                     {"ratio_lower", c.verifier.ratio_lower},
                     {"rate_lo", c.verifier.rate_lo},
                     {"rate_hi", c.verifier.rate_hi}};
    j["output_dir"] = c.output_dir;
    return j.dump(2) + "\n";
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return config_from_json(ss.str());
}

void save_config(const std::string& path, const RunConfig& c) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("config: cannot write " + path);
    out << config_to_json(c);
}

} // namespace nlslab
