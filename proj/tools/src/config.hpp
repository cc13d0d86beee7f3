#pragma once

#include "rtd/datasets.hpp"
#include "rtd/metrics.hpp"
#include "rtd/model.hpp"
#include "rtd/optimize.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rtd::cli {

/// Bad flags or a malformed config file. Exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

nlohmann::json read_json_file(const std::string& path);

/// A cloud to start from: a dataset spec, or the infinity sign used as the
/// starting shape for direct optimization (not a DatasetSpec name).
struct CloudSource {
    DatasetSpec spec;
    bool infinity = false;
    int infinity_size = 100;
    double infinity_noise = 0.0;

    PointCloud make() const;
};

struct EvalToggles {
    bool enabled = true;
    EvalOptions options;
};

struct TrainExperiment {
    CloudSource data;
    TrainConfig train;
    std::vector<std::uint64_t> seeds;  ///< empty: just train.seed
    EvalToggles eval;
    std::string output_dir = "run";
};

struct MorphExperiment {
    CloudSource start;
    CloudSource target;
    OptimizerConfig optimizer;
    std::string warmstart_path;
    std::string output_dir = "morph";
};

/// Parsers reject unknown keys and wrong types; messages carry the field path,
/// e.g. "train.batch_size: expected an integer".
CloudSource cloud_from_json(const nlohmann::json& j, const std::string& path);
TrainConfig train_from_json(const nlohmann::json& j, const std::string& path,
                            TrainConfig base = {});
OptimizerConfig optimizer_from_json(const nlohmann::json& j, const std::string& path,
                                    std::string* warmstart_path);
EvalToggles eval_from_json(const nlohmann::json& j, const std::string& path);
TrainExperiment train_experiment_from_json(const nlohmann::json& j);
MorphExperiment morph_experiment_from_json(const nlohmann::json& j);

nlohmann::json to_json(const CloudSource& source);
nlohmann::json to_json(const TrainConfig& config);
nlohmann::json to_json(const OptimizerConfig& config, const std::string& warmstart_path);
nlohmann::json to_json(const EvalToggles& eval);
nlohmann::json to_json(const TrainExperiment& experiment);
nlohmann::json to_json(const MorphExperiment& experiment);

/// Library validate() failures rethrown as usage errors under `path`.
void validate_or_usage(const TrainConfig& config, const std::string& path);
void validate_or_usage(const OptimizerConfig& config, const std::string& path);
void validate_or_usage(const DatasetSpec& spec, const std::string& path);

}  // namespace rtd::cli
