#include "fibint/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>
#include <sstream>

namespace fibint {

using nlohmann::json;

namespace {

void require_keys(const json& obj, const std::string& path,
                  const std::set<std::string>& allowed) {
    if (!obj.is_object())
        throw config_error("config: expected an object at " + (path.empty() ? "/" : path));
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key))
            throw config_error("config: unknown key \"" + path + "/" + key + "\"");
    }
}

template <class T>
void get_to(const json& obj, const std::string& path, const char* key, T& out) {
    if (!obj.contains(key))
        return;
    try {
        obj.at(key).get_to(out);
    } catch (const json::exception& e) {
        throw config_error("config: bad value at \"" + path + "/" + key + "\": " + e.what());
    }
}

CompositeLaw parse_law(const json& obj, const std::string& path) {
    CompositeLaw law;
    if (obj.contains("terms")) {
        require_keys(obj, path, {"terms"});
        law.terms.clear();
        for (std::size_t i = 0; i < obj.at("terms").size(); ++i) {
            const auto& term = obj.at("terms")[i];
            const std::string tpath = path + "/terms/" + std::to_string(i);
            require_keys(term, tpath, {"m", "k"});
            PowerLawSpec spec;
            get_to(term, tpath, "m", spec.m);
            get_to(term, tpath, "k", spec.k);
            law.terms.push_back(spec);
        }
    } else {
        require_keys(obj, path, {"k6", "k12"});
        double k6 = -1e-7, k12 = 5e-25;
        get_to(obj, path, "k6", k6);
        get_to(obj, path, "k12", k12);
        law = CompositeLaw::lennard_jones(k6, k12);
    }
    return law;
}

}  // namespace

const std::vector<std::string>& known_scenarios() {
    static const std::vector<std::string> names = {"potential-table", "cylinder-eq",
                                                   "cutoff-study",    "integration-study",
                                                   "tangent-test",    "peel"};
    return names;
}

ScenarioConfig config_parse(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw config_error(std::string("config: parse failure: ") + e.what());
    }
    require_keys(root, "", {"scenario", "law", "geometry", "discretization", "material",
                            "solver", "output", "study", "threads"});
    ScenarioConfig cfg;
    if (!root.contains("scenario"))
        throw config_error("config: missing required key \"scenario\"");
    get_to(root, "", "scenario", cfg.scenario);
    if (root.contains("law"))
        cfg.law = parse_law(root.at("law"), "law");
    if (root.contains("geometry")) {
        const auto& g = root.at("geometry");
        require_keys(g, "geometry", {"R_x", "R_y", "beta_x", "beta_y", "length", "initial_gap"});
        get_to(g, "geometry", "R_x", cfg.geometry.R_x);
        get_to(g, "geometry", "R_y", cfg.geometry.R_y);
        get_to(g, "geometry", "beta_x", cfg.geometry.beta_x);
        get_to(g, "geometry", "beta_y", cfg.geometry.beta_y);
        get_to(g, "geometry", "length", cfg.geometry.length);
        get_to(g, "geometry", "initial_gap", cfg.geometry.initial_gap);
    }
    if (root.contains("discretization")) {
        const auto& d = root.at("discretization");
        require_keys(d, "discretization", {"degree", "control_points", "density", "cutoff"});
        get_to(d, "discretization", "degree", cfg.discretization.degree);
        get_to(d, "discretization", "control_points", cfg.discretization.control_points);
        get_to(d, "discretization", "density", cfg.discretization.density);
        if (d.contains("cutoff")) {
            double c = 0.0;
            get_to(d, "discretization", "cutoff", c);
            cfg.discretization.cutoff = c;
        }
    }
    if (root.contains("material")) {
        const auto& m = root.at("material");
        require_keys(m, "material", {"E"});
        if (m.contains("E")) {
            double e = 0.0;
            get_to(m, "material", "E", e);
            cfg.material.E = e;
        }
    }
    if (root.contains("solver")) {
        const auto& s = root.at("solver");
        require_keys(s, "solver",
                     {"t_start", "t_end", "initial_step", "max_step", "growth", "shrink",
                      "target_iterations", "max_iterations", "newton_tol", "force_scale_floor",
                      "min_step", "formulation", "moments", "freeze_pairs_per_step"});
        get_to(s, "solver", "t_start", cfg.solver.t_start);
        get_to(s, "solver", "t_end", cfg.solver.t_end);
        get_to(s, "solver", "initial_step", cfg.solver.initial_step);
        get_to(s, "solver", "max_step", cfg.solver.max_step);
        get_to(s, "solver", "growth", cfg.solver.growth);
        get_to(s, "solver", "shrink", cfg.solver.shrink);
        get_to(s, "solver", "target_iterations", cfg.solver.target_iterations);
        get_to(s, "solver", "max_iterations", cfg.solver.max_iterations);
        get_to(s, "solver", "newton_tol", cfg.solver.newton_tol);
        get_to(s, "solver", "force_scale_floor", cfg.solver.force_scale_floor);
        get_to(s, "solver", "min_step", cfg.solver.min_step);
        get_to(s, "solver", "formulation", cfg.solver.formulation);
        get_to(s, "solver", "moments", cfg.solver.moments);
        get_to(s, "solver", "freeze_pairs_per_step", cfg.solver.freeze_pairs_per_step);
    }
    if (root.contains("output")) {
        const auto& o = root.at("output");
        require_keys(o, "output", {"directory", "snapshot_every"});
        get_to(o, "output", "directory", cfg.output.directory);
        get_to(o, "output", "snapshot_every", cfg.output.snapshot_every);
    }
    if (root.contains("study")) {
        const auto& st = root.at("study");
        require_keys(st, "study",
                     {"q1_values", "q2_min", "q2_max", "q2_count", "cutoff_values", "q2_values",
                      "points_per_unit", "interval_half_width", "gap", "columns", "seed"});
        get_to(st, "study", "q1_values", cfg.study.q1_values);
        get_to(st, "study", "q2_min", cfg.study.q2_min);
        get_to(st, "study", "q2_max", cfg.study.q2_max);
        get_to(st, "study", "q2_count", cfg.study.q2_count);
        get_to(st, "study", "cutoff_values", cfg.study.cutoff_values);
        get_to(st, "study", "q2_values", cfg.study.q2_values);
        get_to(st, "study", "points_per_unit", cfg.study.points_per_unit);
        get_to(st, "study", "interval_half_width", cfg.study.interval_half_width);
        get_to(st, "study", "gap", cfg.study.gap);
        get_to(st, "study", "columns", cfg.study.columns);
        get_to(st, "study", "seed", cfg.study.seed);
    }
    get_to(root, "", "threads", cfg.threads);
    cfg.validate();
    return cfg;
}

void ScenarioConfig::validate() const {
    const auto& names = known_scenarios();
    if (std::find(names.begin(), names.end(), scenario) == names.end())
        throw config_error("config: unknown scenario \"" + scenario + "\"");
    try {
        law.validate();
        pair_geometry().validate();
    } catch (const error& e) {
        throw config_error(std::string("config: ") + e.what());
    }
    if (!(geometry.length > 0.0))
        throw config_error("config: geometry/length must be positive");
    if (!(geometry.initial_gap > 0.0))
        throw config_error("config: geometry/initial_gap must be positive");
    if (discretization.degree < 2)
        throw config_error("config: discretization/degree must be at least 2");
    if (discretization.control_points < discretization.degree + 1)
        throw config_error("config: discretization/control_points too few for the degree");
    if (!(discretization.density >= 1.0))
        throw config_error("config: discretization/density must be >= 1");
    if (!(cutoff() > 0.0))
        throw config_error("config: discretization/cutoff must be positive");
    if (!(solver.newton_tol > 0.0))
        throw config_error("config: solver/newton_tol must be positive");
    if (!(solver.shrink > 0.0 && solver.shrink < 1.0))
        throw config_error("config: solver/shrink must lie in (0, 1)");
    if (!(solver.growth > 1.0))
        throw config_error("config: solver/growth must exceed 1");
    if (solver.formulation != "averaged" && solver.formulation != "straightforward")
        throw config_error("config: solver/formulation must be averaged or straightforward");
    if ((scenario == "peel" || scenario == "tangent-test") && !material.E)
        throw config_error("config: material/E is required for scenario \"" + scenario + "\"");
    if (material.E && !(*material.E > 0.0))
        throw config_error("config: material/E must be positive");
    if (threads < 1)
        throw config_error("config: threads must be >= 1");
    if (output.snapshot_every < 1)
        throw config_error("config: output/snapshot_every must be >= 1");
}

std::string ScenarioConfig::canonical() const {
    json root;
    root["scenario"] = scenario;
    json terms = json::array();
    for (const auto& t : law.terms)
        terms.push_back({{"m", t.m}, {"k", t.k}});
    root["law"] = {{"terms", terms}};
    root["geometry"] = {{"R_x", geometry.R_x},       {"R_y", geometry.R_y},
                        {"beta_x", geometry.beta_x}, {"beta_y", geometry.beta_y},
                        {"length", geometry.length}, {"initial_gap", geometry.initial_gap}};
    root["discretization"] = {{"degree", discretization.degree},
                              {"control_points", discretization.control_points},
                              {"density", discretization.density},
                              {"cutoff", cutoff()}};
    root["material"] = json::object();
    if (material.E)
        root["material"]["E"] = *material.E;
    root["solver"] = {{"t_start", solver.t_start},
                      {"t_end", solver.t_end},
                      {"initial_step", solver.initial_step},
                      {"max_step", solver.max_step},
                      {"growth", solver.growth},
                      {"shrink", solver.shrink},
                      {"target_iterations", solver.target_iterations},
                      {"max_iterations", solver.max_iterations},
                      {"newton_tol", solver.newton_tol},
                      {"force_scale_floor", solver.force_scale_floor},
                      {"min_step", solver.min_step},
                      {"formulation", solver.formulation},
                      {"moments", solver.moments},
                      {"freeze_pairs_per_step", solver.freeze_pairs_per_step}};
    root["output"] = {{"directory", output.directory}, {"snapshot_every", output.snapshot_every}};
    root["study"] = {{"q1_values", study.q1_values},
                     {"q2_min", study.q2_min},
                     {"q2_max", study.q2_max},
                     {"q2_count", study.q2_count},
                     {"cutoff_values", study.cutoff_values},
                     {"q2_values", study.q2_values},
                     {"points_per_unit", study.points_per_unit},
                     {"interval_half_width", study.interval_half_width},
                     {"gap", study.gap},
                     {"columns", study.columns},
                     {"seed", study.seed}};
    root["threads"] = threads;
    return root.dump(2);
}

std::string config_apply_override(const std::string& text, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw config_error("config: override must have the form key.path=value");
    const std::string path = assignment.substr(0, eq);
    const std::string value_text = assignment.substr(eq + 1);
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw config_error(std::string("config: parse failure: ") + e.what());
    }
    json value;
    try {
        value = json::parse(value_text);
    } catch (const json::exception&) {
        value = value_text;  // plain string
    }
    // Dotted path -> JSON pointer.
    std::string pointer = "/";
    for (const char c : path)
        pointer += (c == '.') ? '/' : c;
    try {
        root[json::json_pointer(pointer)] = value;
    } catch (const json::exception& e) {
        throw config_error("config: bad override path \"" + path + "\": " + e.what());
    }
    return root.dump();
}

}  // namespace fibint
