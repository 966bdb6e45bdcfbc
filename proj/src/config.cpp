#include <gmq/config.hpp>

#include <filesystem>
#include <fstream>
#include <initializer_list>

namespace gmq {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ValidationError(path + ": " + msg);
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed) known = known || it.key() == k;
        if (!known) fail(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
    }
}

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

const json& require_object(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    return j;
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

std::uint64_t as_count(const json& j, const std::string& path) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer()) {
        if (j.get<std::int64_t>() < 0) fail(path, "must be non-negative");
        return static_cast<std::uint64_t>(j.get<std::int64_t>());
    }
    fail(path, "expected a non-negative integer");
}

std::vector<double> number_list(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

double number_or(const json& obj, const char* key, const std::string& path, double fallback) {
    return obj.contains(key) ? as_number(obj[key], join(path, key)) : fallback;
}

RewardFamily parse_family(const json& j, const std::string& path) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "bernoulli") return RewardFamily::bernoulli();
        if (s == "gaussian") return RewardFamily::gaussian(1.0);
        fail(path, "expected 'bernoulli' or 'gaussian', got '" + s + "'");
    }
    require_object(j, path);
    reject_unknown(j, path, {"kind", "sigma2"});
    if (!j.contains("kind") || !j["kind"].is_string()) fail(join(path, "kind"), "expected a string");
    const auto kind = j["kind"].get<std::string>();
    if (kind == "bernoulli") return RewardFamily::bernoulli();
    if (kind != "gaussian") fail(join(path, "kind"), "expected 'bernoulli' or 'gaussian'");
    try {
        return RewardFamily::gaussian(number_or(j, "sigma2", path, 1.0));
    } catch (const std::invalid_argument& e) {
        fail(join(path, "sigma2"), e.what());
    }
}

ReservoirSpec parse_reservoir(const json& g, const std::string& path, std::vector<double>* arms_out) {
    const int kinds = int(g.contains("atoms")) + int(g.contains("cdf")) + int(g.contains("arms"));
    if (kinds != 1) fail(path, "exactly one of atoms, cdf or arms is required");
    try {
        if (g.contains("atoms")) {
            const auto& a = g["atoms"];
            if (!a.is_array()) fail(join(path, "atoms"), "expected an array");
            std::vector<Atom> atoms;
            for (std::size_t i = 0; i < a.size(); ++i) {
                const std::string p = join(path, "atoms") + "[" + std::to_string(i) + "]";
                require_object(a[i], p);
                reject_unknown(a[i], p, {"mean", "mass"});
                if (!a[i].contains("mean") || !a[i].contains("mass")) fail(p, "needs mean and mass");
                atoms.push_back({as_number(a[i]["mean"], p + ".mean"), as_number(a[i]["mass"], p + ".mass")});
            }
            return ReservoirSpec::discrete(std::move(atoms));
        }
        if (g.contains("cdf")) {
            const auto& a = g["cdf"];
            if (!a.is_array()) fail(join(path, "cdf"), "expected an array");
            std::vector<Breakpoint> pts;
            for (std::size_t i = 0; i < a.size(); ++i) {
                const std::string p = join(path, "cdf") + "[" + std::to_string(i) + "]";
                require_object(a[i], p);
                reject_unknown(a[i], p, {"x", "cdf"});
                if (!a[i].contains("x") || !a[i].contains("cdf")) fail(p, "needs x and cdf");
                pts.push_back({as_number(a[i]["x"], p + ".x"), as_number(a[i]["cdf"], p + ".cdf")});
            }
            return ReservoirSpec::piecewise_linear(std::move(pts));
        }
        auto means = number_list(g["arms"], join(path, "arms"));
        if (means.empty()) fail(join(path, "arms"), "must be non-empty");
        if (arms_out) *arms_out = means;
        return ReservoirSpec::from_finite_means(std::move(means));
    } catch (const ValidationError& e) {
        // Messages from the reservoir builders start with their own relative path.
        const std::string what = e.what();
        if (what.rfind(path, 0) == 0) throw;
        throw ValidationError(path + "." + what);
    }
}

}  // namespace

BanditInstance parse_instance(const json& j, const std::string& path,
                              std::vector<std::vector<double>>* finite_means) {
    require_object(j, path);
    reject_unknown(j, path, {"id", "family", "alpha", "groups"});
    BanditInstance inst;
    if (j.contains("id")) {
        if (!j["id"].is_string()) fail(join(path, "id"), "expected a string");
        inst.id = j["id"].get<std::string>();
    }
    inst.family = j.contains("family") ? parse_family(j["family"], join(path, "family")) : RewardFamily::bernoulli();
    inst.alpha = number_or(j, "alpha", path, 0.5);
    if (!(inst.alpha > 0.0 && inst.alpha < 1.0)) fail(join(path, "alpha"), "must lie in (0, 1)");
    if (!j.contains("groups") || !j["groups"].is_array() || j["groups"].empty())
        fail(join(path, "groups"), "expected a non-empty array");
    const auto& groups = j["groups"];
    if (finite_means) finite_means->clear();
    bool all_finite = true;
    std::vector<std::vector<double>> arms(groups.size());
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const std::string gp = join(path, "groups") + "[" + std::to_string(i) + "]";
        require_object(groups[i], gp);
        reject_unknown(groups[i], gp, {"id", "atoms", "cdf", "arms"});
        GroupId id = static_cast<GroupId>(i + 1);
        if (groups[i].contains("id")) {
            if (!groups[i]["id"].is_number_integer()) fail(gp + ".id", "expected an integer");
            id = groups[i]["id"].get<GroupId>();
        }
        inst.groups.push_back({id, parse_reservoir(groups[i], gp, &arms[i])});
        all_finite = all_finite && !arms[i].empty();
    }
    try {
        inst.validate();
    } catch (const ValidationError& e) {
        fail(path, e.what());
    }
    if (finite_means && all_finite) *finite_means = std::move(arms);
    return inst;
}

json instance_to_json(const BanditInstance& instance) {
    json j;
    j["id"] = instance.id;
    if (instance.family.kind == RewardKind::Bernoulli) {
        j["family"] = "bernoulli";
    } else {
        j["family"] = {{"kind", "gaussian"}, {"sigma2", instance.family.sigma2}};
    }
    j["alpha"] = instance.alpha;
    json groups = json::array();
    for (const auto& g : instance.groups) {
        json gj{{"id", g.id}};
        if (g.reservoir.is_discrete()) {
            json atoms = json::array();
            for (const auto& a : g.reservoir.atoms()) atoms.push_back({{"mean", a.mean}, {"mass", a.mass}});
            gj["atoms"] = atoms;
        } else {
            json pts = json::array();
            for (const auto& b : g.reservoir.breakpoints()) pts.push_back({{"x", b.x}, {"cdf", b.cdf}});
            gj["cdf"] = pts;
        }
        groups.push_back(gj);
    }
    j["groups"] = groups;
    return j;
}

ExperimentConfig parse_config(const json& j, const std::string& base_dir) {
    require_object(j, "config");
    reject_unknown(j, "", {"instance", "instance_file", "mode", "params", "schedule", "trials", "seed",
                           "threads", "noiseless", "bounds", "output"});
    ExperimentConfig cfg;
    auto& spec = cfg.spec;

    if (j.contains("instance") == j.contains("instance_file"))
        fail("instance", "exactly one of instance or instance_file is required");
    if (j.contains("instance")) {
        spec.instance = parse_instance(j["instance"], "instance", &spec.finite_means);
    } else {
        if (!j["instance_file"].is_string()) fail("instance_file", "expected a path string");
        std::filesystem::path p = j["instance_file"].get<std::string>();
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        std::ifstream in(p);
        if (!in) fail("instance_file", "cannot open '" + p.string() + "'");
        json inner;
        try {
            inner = json::parse(in);
        } catch (const json::parse_error& e) {
            fail("instance_file", "'" + p.string() + "' is not valid JSON: " + e.what());
        }
        spec.instance = parse_instance(inner, "instance_file", &spec.finite_means);
    }

    if (j.contains("mode")) {
        if (!j["mode"].is_string()) fail("mode", "expected a string");
        spec.mode = parse_run_mode(j["mode"].get<std::string>());
    }
    spec.params.alpha = spec.instance.alpha;
    if (j.contains("params")) {
        const auto& p = require_object(j["params"], "params");
        reject_unknown(p, "params", {"eps", "delta_gap", "delta"});
        spec.params.eps = number_or(p, "eps", "params", spec.params.eps);
        spec.params.gap = number_or(p, "delta_gap", "params", spec.params.gap);
        spec.params.delta = number_or(p, "delta", "params", spec.params.delta);
    }
    if (j.contains("schedule")) {
        const auto& s = require_object(j["schedule"], "schedule");
        reject_unknown(s, "schedule", {"eps", "delta_gap"});
        if (!s.contains("eps") || !s.contains("delta_gap")) fail("schedule", "needs eps and delta_gap lists");
        spec.schedule.eps = number_list(s["eps"], "schedule.eps");
        spec.schedule.gap = number_list(s["delta_gap"], "schedule.delta_gap");
    }
    if (j.contains("trials")) cfg.trials = as_count(j["trials"], "trials");
    if (j.contains("seed")) cfg.seed = as_count(j["seed"], "seed");
    if (j.contains("threads")) {
        if (!j["threads"].is_number_integer()) fail("threads", "expected an integer");
        cfg.threads = j["threads"].get<int>();
    }
    if (j.contains("noiseless")) {
        if (!j["noiseless"].is_boolean()) fail("noiseless", "expected true or false");
        spec.options.noiseless = j["noiseless"].get<bool>();
    }
    if (j.contains("bounds")) {
        const auto& b = require_object(j["bounds"], "bounds");
        reject_unknown(b, "bounds", {"c", "d"});
        cfg.c = number_or(b, "c", "bounds", cfg.c);
        cfg.d = number_or(b, "d", "bounds", cfg.d);
    }
    if (j.contains("output")) {
        const auto& o = require_object(j["output"], "output");
        reject_unknown(o, "output", {"csv", "summary", "epoch_log", "round_log", "pull_log"});
        auto str = [&](const char* key, std::string& dst) {
            if (!o.contains(key)) return;
            if (!o[key].is_string()) fail(std::string("output.") + key, "expected a path string");
            std::filesystem::path path = o[key].get<std::string>();
            if (path.is_relative() && !base_dir.empty()) path = std::filesystem::path(base_dir) / path;
            dst = path.string();
        };
        str("csv", cfg.out.csv);
        str("summary", cfg.out.summary);
        str("epoch_log", cfg.out.epoch_log);
        str("round_log", cfg.out.round_log);
        str("pull_log", cfg.out.pull_log);
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw ValidationError("config: cannot open '" + file + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("config: '" + file + "' is not valid JSON: " + e.what());
    }
    const auto dir = std::filesystem::path(file).parent_path();
    return parse_config(j, dir.empty() ? "." : dir.string());
}

json config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["instance"] = instance_to_json(cfg.spec.instance);
    if (cfg.spec.mode == RunMode::Finite) {
        for (std::size_t g = 0; g < cfg.spec.finite_means.size(); ++g) {
            j["instance"]["groups"][g].erase("atoms");
            j["instance"]["groups"][g]["arms"] = cfg.spec.finite_means[g];
        }
    }
    j["mode"] = to_string(cfg.spec.mode);
    j["params"] = {{"eps", cfg.spec.params.eps}, {"delta_gap", cfg.spec.params.gap}, {"delta", cfg.spec.params.delta}};
    if (!cfg.spec.schedule.eps.empty())
        j["schedule"] = {{"eps", cfg.spec.schedule.eps}, {"delta_gap", cfg.spec.schedule.gap}};
    j["trials"] = cfg.trials;
    j["seed"] = cfg.seed;
    j["threads"] = cfg.threads;
    j["noiseless"] = cfg.spec.options.noiseless;
    j["bounds"] = {{"c", cfg.c}, {"d", cfg.d}};
    json out = json::object();
    if (!cfg.out.csv.empty()) out["csv"] = cfg.out.csv;
    if (!cfg.out.summary.empty()) out["summary"] = cfg.out.summary;
    if (!cfg.out.epoch_log.empty()) out["epoch_log"] = cfg.out.epoch_log;
    if (!cfg.out.round_log.empty()) out["round_log"] = cfg.out.round_log;
    if (!cfg.out.pull_log.empty()) out["pull_log"] = cfg.out.pull_log;
    j["output"] = out;
    return j;
}

}  // namespace gmq
