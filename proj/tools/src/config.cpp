#include "config.hpp"

#include "rtd/errors.hpp"

#include <fstream>
#include <set>

namespace rtd::cli {

using nlohmann::json;

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError(path + ": " + e.what());
    }
}

namespace {

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

// Walks one JSON object, type-checking each key it is asked about and
// complaining about the rest in finish().
class Fields {
public:
    Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
    }

    const json* find(const std::string& key) {
        seen_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void get(const std::string& key, int& out) {
        if (const auto* v = find(key)) {
            if (!v->is_number_integer()) fail(join(path_, key), "expected an integer");
            const auto x = v->get<std::int64_t>();
            if (x < INT32_MIN || x > INT32_MAX) fail(join(path_, key), "out of range");
            out = static_cast<int>(x);
        }
    }

    void get(const std::string& key, std::optional<int>& out) {
        if (const auto* v = find(key); v && !v->is_null()) {
            int x = 0;
            seen_.erase(key);
            get(key, x);
            out = x;
        }
    }

    void get(const std::string& key, std::uint64_t& out) {
        if (const auto* v = find(key)) {
            if (!v->is_number_integer() || (v->is_number_integer() && !v->is_number_unsigned() &&
                                            v->get<std::int64_t>() < 0)) {
                fail(join(path_, key), "expected a non-negative integer");
            }
            out = v->get<std::uint64_t>();
        }
    }

    void get(const std::string& key, double& out) {
        if (const auto* v = find(key)) {
            if (!v->is_number()) fail(join(path_, key), "expected a number");
            out = v->get<double>();
        }
    }

    void get(const std::string& key, bool& out) {
        if (const auto* v = find(key)) {
            if (!v->is_boolean()) fail(join(path_, key), "expected true or false");
            out = v->get<bool>();
        }
    }

    void get(const std::string& key, std::string& out) {
        if (const auto* v = find(key)) {
            if (!v->is_string()) fail(join(path_, key), "expected a string");
            out = v->get<std::string>();
        }
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.count(key)) fail(join(path_, key), "unknown field");
        }
    }

    const std::string& path() const { return path_; }

    [[noreturn]] static void fail(const std::string& where, const std::string& what) {
        throw UsageError(where + ": " + what);
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

// Library parse_* helpers throw InputError; in a config that is a usage error.
template <class F>
auto parse_field(const std::string& where, F&& f) {
    try {
        return f();
    } catch (const InputError& e) {
        throw UsageError(where + ": " + e.what());
    }
}

}  // namespace

PointCloud CloudSource::make() const {
    if (infinity) return make_infinity_sign(infinity_size, infinity_noise, spec.seed);
    return generate(spec);
}

CloudSource cloud_from_json(const json& j, const std::string& path) {
    Fields f(j, path);
    CloudSource out;
    std::string name;
    f.get("name", name);
    if (name.empty()) Fields::fail(join(path, "name"), "missing");
    f.get("seed", out.spec.seed);
    if (name == "infinity") {
        out.infinity = true;
        f.get("size", out.infinity_size);
        f.get("noise", out.infinity_noise);
        if (out.infinity_size < 1) Fields::fail(join(path, "size"), "must be >= 1");
        if (out.infinity_noise < 0.0) Fields::fail(join(path, "noise"), "must be >= 0");
        f.finish();
        return out;
    }
    out.spec.name = parse_field(join(path, "name"), [&] { return parse_dataset_name(name); });
    f.get("size", out.spec.size);
    f.get("points_per_sphere", out.spec.points_per_sphere);
    f.get("outer_sphere_points", out.spec.outer_sphere_points);
    f.get("ambient_dim", out.spec.ambient_dim);
    f.get("path", out.spec.path);
    f.finish();
    validate_or_usage(out.spec, path);
    return out;
}

TrainConfig train_from_json(const json& j, const std::string& path, TrainConfig base) {
    Fields f(j, path);
    TrainConfig& c = base;
    f.get("batch_size", c.batch_size);
    f.get("learning_rate", c.learning_rate);
    f.get("epochs_total", c.epochs_total);
    f.get("rtd_start_epoch", c.rtd_start_epoch);
    f.get("lambda", c.lambda);
    f.get("seed", c.seed);
    std::string s;
    f.get("rtd_variant", s);
    if (!s.empty()) c.rtd_variant = parse_field(join(path, "rtd_variant"), [&] { return parse_rtd_variant(s); });
    s.clear();
    f.get("optimizer", s);
    if (!s.empty()) c.optimizer = parse_field(join(path, "optimizer"), [&] { return parse_optimizer(s); });
    f.get("minimum_bypass", c.minimum_bypass);
    f.get("hidden_dim", c.hidden_dim);
    f.get("layers", c.layers);
    f.get("latent_dim", c.latent_dim);
    f.get("adam_beta1", c.adam_beta1);
    f.get("adam_beta2", c.adam_beta2);
    f.get("adam_epsilon", c.adam_epsilon);
    f.finish();
    return c;
}

OptimizerConfig optimizer_from_json(const json& j, const std::string& path,
                                    std::string* warmstart_path) {
    Fields f(j, path);
    OptimizerConfig c;
    f.get("steps", c.steps);
    double rate = -1.0;
    f.get("learning_rate", rate);
    if (const auto* sched = f.find("schedule")) {
        if (rate >= 0.0) Fields::fail(join(path, "schedule"), "give either learning_rate or schedule");
        if (!sched->is_array() || sched->empty()) {
            Fields::fail(join(path, "schedule"), "expected a non-empty array");
        }
        c.schedule.clear();
        for (std::size_t i = 0; i < sched->size(); ++i) {
            Fields g((*sched)[i], join(path, "schedule[" + std::to_string(i) + "]"));
            RateChange r;
            g.get("step", r.step);
            g.get("rate", r.rate);
            g.finish();
            c.schedule.push_back(r);
        }
    } else if (rate >= 0.0) {
        c.schedule = {{0, rate}};
    }
    f.get("minimum_bypass", c.minimum_bypass);
    f.get("smoothing", c.smoothing);
    f.get("beta", c.beta);
    if (const auto* nb = f.find("neighborhood")) {
        Fields g(*nb, join(path, "neighborhood"));
        std::optional<int> k;
        double radius = -1.0;
        g.get("knn", k);
        g.get("radius", radius);
        g.finish();
        if (k && radius >= 0.0) Fields::fail(g.path(), "give either knn or radius");
        if (k) c.neighborhood = Neighborhood::knn(*k);
        else if (radius >= 0.0) c.neighborhood = Neighborhood::within(radius);
        else Fields::fail(g.path(), "expected knn or radius");
    }
    std::string warm;
    f.get("warmstart", warm);
    if (warmstart_path) *warmstart_path = warm;
    f.finish();
    return c;
}

EvalToggles eval_from_json(const json& j, const std::string& path) {
    Fields f(j, path);
    EvalToggles e;
    f.get("enabled", e.enabled);
    f.get("triplets", e.options.num_triplets);
    f.get("seed", e.options.seed);
    f.get("h1", e.options.with_h1);
    f.get("resamples", e.options.resamples);
    f.get("sample_size", e.options.sample_size);
    f.get("max_full_size", e.options.max_full_size);
    f.finish();
    return e;
}

TrainExperiment train_experiment_from_json(const json& j) {
    Fields f(j, "");
    TrainExperiment x;
    const auto* data = f.find("dataset");
    if (!data) Fields::fail("dataset", "missing");
    x.data = cloud_from_json(*data, "dataset");
    if (const auto* t = f.find("train")) x.train = train_from_json(*t, "train");
    if (const auto* s = f.find("seeds")) {
        if (!s->is_array()) Fields::fail("seeds", "expected an array");
        for (std::size_t i = 0; i < s->size(); ++i) {
            const auto& v = (*s)[i];
            if (!v.is_number_unsigned()) {
                Fields::fail("seeds[" + std::to_string(i) + "]", "expected a non-negative integer");
            }
            x.seeds.push_back(v.get<std::uint64_t>());
        }
    }
    if (const auto* e = f.find("eval")) x.eval = eval_from_json(*e, "eval");
    f.get("output_dir", x.output_dir);
    f.finish();
    return x;
}

MorphExperiment morph_experiment_from_json(const json& j) {
    Fields f(j, "");
    MorphExperiment x;
    const auto* start = f.find("start");
    const auto* target = f.find("target");
    if (!start) Fields::fail("start", "missing");
    if (!target) Fields::fail("target", "missing");
    x.start = cloud_from_json(*start, "start");
    x.target = cloud_from_json(*target, "target");
    if (const auto* o = f.find("optimizer")) {
        x.optimizer = optimizer_from_json(*o, "optimizer", &x.warmstart_path);
    }
    f.get("output_dir", x.output_dir);
    f.finish();
    return x;
}

json to_json(const CloudSource& s) {
    if (s.infinity) {
        return {{"name", "infinity"}, {"size", s.infinity_size}, {"noise", s.infinity_noise},
                {"seed", s.spec.seed}};
    }
    json j{{"name", to_string(s.spec.name)}, {"seed", s.spec.seed}};
    if (s.spec.size) j["size"] = *s.spec.size;
    if (s.spec.name == DatasetName::Spheres) {
        j["points_per_sphere"] = s.spec.points_per_sphere;
        j["outer_sphere_points"] = s.spec.outer_sphere_points;
    }
    if (s.spec.ambient_dim) j["ambient_dim"] = *s.spec.ambient_dim;
    if (s.spec.name == DatasetName::File) j["path"] = s.spec.path;
    return j;
}

json to_json(const TrainConfig& c) {
    return {{"batch_size", c.batch_size},
            {"learning_rate", c.learning_rate},
            {"epochs_total", c.epochs_total},
            {"rtd_start_epoch", c.rtd_start_epoch},
            {"lambda", c.lambda},
            {"seed", c.seed},
            {"rtd_variant", to_string(c.rtd_variant)},
            {"optimizer", to_string(c.optimizer)},
            {"minimum_bypass", c.minimum_bypass},
            {"hidden_dim", c.hidden_dim},
            {"layers", c.layers},
            {"latent_dim", c.latent_dim},
            {"adam_beta1", c.adam_beta1},
            {"adam_beta2", c.adam_beta2},
            {"adam_epsilon", c.adam_epsilon}};
}

json to_json(const OptimizerConfig& c, const std::string& warmstart_path) {
    json schedule = json::array();
    for (const auto& r : c.schedule) schedule.push_back({{"step", r.step}, {"rate", r.rate}});
    json nb = c.neighborhood.kind == Neighborhood::Kind::Knn ? json{{"knn", c.neighborhood.k}}
                                                             : json{{"radius", c.neighborhood.radius}};
    json j{{"steps", c.steps},
           {"schedule", schedule},
           {"minimum_bypass", c.minimum_bypass},
           {"smoothing", c.smoothing},
           {"neighborhood", nb},
           {"beta", c.beta}};
    if (!warmstart_path.empty()) j["warmstart"] = warmstart_path;
    return j;
}

json to_json(const EvalToggles& e) {
    return {{"enabled", e.enabled},
            {"triplets", e.options.num_triplets},
            {"seed", e.options.seed},
            {"h1", e.options.with_h1},
            {"resamples", e.options.resamples},
            {"sample_size", e.options.sample_size},
            {"max_full_size", e.options.max_full_size}};
}

json to_json(const TrainExperiment& x) {
    return {{"dataset", to_json(x.data)},
            {"train", to_json(x.train)},
            {"seeds", x.seeds},
            {"eval", to_json(x.eval)},
            {"output_dir", x.output_dir}};
}

json to_json(const MorphExperiment& x) {
    return {{"start", to_json(x.start)},
            {"target", to_json(x.target)},
            {"optimizer", to_json(x.optimizer, x.warmstart_path)},
            {"output_dir", x.output_dir}};
}

void validate_or_usage(const TrainConfig& config, const std::string& path) {
    try {
        config.validate();
    } catch (const InputError& e) {
        throw UsageError(path + ": " + e.what());
    }
}

void validate_or_usage(const OptimizerConfig& config, const std::string& path) {
    try {
        config.validate();
    } catch (const InputError& e) {
        throw UsageError(path + ": " + e.what());
    }
}

void validate_or_usage(const DatasetSpec& spec, const std::string& path) {
    try {
        spec.validate();
    } catch (const InputError& e) {
        throw UsageError(path + ": " + e.what());
    }
}

}  // namespace rtd::cli
