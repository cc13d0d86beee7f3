#include "rtd/model.hpp"

#include "rtd/errors.hpp"
#include "rtd/grad.hpp"
#include "rtd/random.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>

namespace rtd {

namespace {

using Eigen::MatrixXd;

std::vector<std::pair<int, int>> layer_shapes(int input_dim, int hidden_dim, int layers,
                                              int latent_dim) {
    // (in, out) for each encoder layer
    std::vector<std::pair<int, int>> shapes;
    int in = input_dim;
    for (int l = 0; l < layers; ++l) {
        const int out = l + 1 == layers ? latent_dim : hidden_dim;
        shapes.emplace_back(in, out);
        in = out;
    }
    return shapes;
}

void check_shape_args(int input_dim, int hidden_dim, int layers, int latent_dim) {
    if (input_dim < 1 || hidden_dim < 1 || layers < 1 || latent_dim < 1) {
        throw InputError("network dimensions and layer count must be >= 1");
    }
}

/// Cached activations of one pass through a stack of layers.
struct StackPass {
    std::vector<MatrixXd> inputs;  ///< input to each layer
    std::vector<MatrixXd> outputs; ///< post-activation output of each layer
};

MatrixXd run_stack(const std::vector<DenseLayer>& stack, const MatrixXd& input, StackPass* pass) {
    MatrixXd h = input;
    for (std::size_t l = 0; l < stack.size(); ++l) {
        if (pass) pass->inputs.push_back(h);
        MatrixXd next = h * stack[l].weight.transpose();
        next.rowwise() += stack[l].bias.transpose();
        if (l + 1 < stack.size()) next = next.array().tanh().matrix();
        if (pass) pass->outputs.push_back(next);
        h = std::move(next);
    }
    return h;
}

/// Backpropagates d(loss)/d(output) through the stack, writing parameter
/// gradients into `grads` (same shapes as the stack) and returning
/// d(loss)/d(input).
MatrixXd backprop_stack(const std::vector<DenseLayer>& stack, const StackPass& pass,
                        MatrixXd d_out, std::vector<DenseLayer>& grads) {
    for (std::size_t l = stack.size(); l-- > 0;) {
        if (l + 1 < stack.size()) {
            const auto& act = pass.outputs[l];
            d_out = (d_out.array() * (1.0 - act.array().square())).matrix();
        }
        grads[l].weight = d_out.transpose() * pass.inputs[l];
        grads[l].bias = d_out.colwise().sum().transpose();
        d_out = d_out * stack[l].weight;
    }
    return d_out;
}

void append(std::vector<double>& flat, const std::vector<DenseLayer>& stack) {
    for (const auto& layer : stack) {
        for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
            for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) flat.push_back(layer.weight(r, c));
        }
        for (Eigen::Index r = 0; r < layer.bias.size(); ++r) flat.push_back(layer.bias(r));
    }
}

std::size_t take(const std::vector<double>& flat, std::size_t pos, std::vector<DenseLayer>& stack) {
    for (auto& layer : stack) {
        for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
            for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = flat[pos++];
        }
        for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = flat[pos++];
    }
    return pos;
}

PointCloud to_cloud(const MatrixXd& m) { return PointCloud(RowMatrix(m)); }

}  // namespace

MlpParams MlpParams::zeros(int input_dim, int hidden_dim, int layers, int latent_dim) {
    check_shape_args(input_dim, hidden_dim, layers, latent_dim);
    MlpParams p;
    p.input_dim = input_dim;
    p.hidden_dim = hidden_dim;
    p.layers = layers;
    p.latent_dim = latent_dim;
    const auto shapes = layer_shapes(input_dim, hidden_dim, layers, latent_dim);
    for (const auto& [in, out] : shapes) {
        p.encoder.push_back({MatrixXd::Zero(out, in), Eigen::VectorXd::Zero(out)});
    }
    for (auto it = shapes.rbegin(); it != shapes.rend(); ++it) {
        p.decoder.push_back({MatrixXd::Zero(it->first, it->second), Eigen::VectorXd::Zero(it->first)});
    }
    return p;
}

MlpParams MlpParams::init(int input_dim, int hidden_dim, int layers, int latent_dim,
                          std::uint64_t seed) {
    MlpParams p = zeros(input_dim, hidden_dim, layers, latent_dim);
    Rng rng(seed);
    auto fill = [&](std::vector<DenseLayer>& stack) {
        for (auto& layer : stack) {
            const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weight.cols()));
            for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
                for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
                    layer.weight(r, c) = rng.uniform(-bound, bound);
                }
            }
            for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = rng.uniform(-bound, bound);
        }
    };
    fill(p.encoder);
    fill(p.decoder);
    return p;
}

void MlpParams::validate() const {
    check_shape_args(input_dim, hidden_dim, layers, latent_dim);
    const auto shapes = layer_shapes(input_dim, hidden_dim, layers, latent_dim);
    if (encoder.size() != shapes.size() || decoder.size() != shapes.size()) {
        throw InputError("layer count does not match the declared network depth");
    }
    auto check = [](const DenseLayer& layer, int in, int out, const std::string& name) {
        if (layer.weight.rows() != out || layer.weight.cols() != in || layer.bias.size() != out) {
            throw InputError(name + " has shape " + std::to_string(layer.weight.rows()) + "x" +
                             std::to_string(layer.weight.cols()) + ", expected " +
                             std::to_string(out) + "x" + std::to_string(in));
        }
        if (!layer.weight.allFinite() || !layer.bias.allFinite()) {
            throw InputError(name + " has non-finite entries");
        }
    };
    for (std::size_t l = 0; l < shapes.size(); ++l) {
        check(encoder[l], shapes[l].first, shapes[l].second, "encoder layer " + std::to_string(l));
        const auto& mirror = shapes[shapes.size() - 1 - l];
        check(decoder[l], mirror.second, mirror.first, "decoder layer " + std::to_string(l));
    }
}

std::size_t MlpParams::parameter_count() const {
    std::size_t count = 0;
    for (const auto* stack : {&encoder, &decoder}) {
        for (const auto& layer : *stack) {
            count += static_cast<std::size_t>(layer.weight.size() + layer.bias.size());
        }
    }
    return count;
}

std::vector<double> MlpParams::flatten() const {
    std::vector<double> flat;
    flat.reserve(parameter_count());
    append(flat, encoder);
    append(flat, decoder);
    return flat;
}

void MlpParams::assign(const std::vector<double>& flat) {
    if (flat.size() != parameter_count()) throw InputError("flat parameter vector has wrong size");
    const std::size_t pos = take(flat, 0, encoder);
    take(flat, pos, decoder);
}

ForwardResult forward(const MlpParams& params, const PointCloud& batch) {
    if (batch.dim() != params.input_dim) {
        throw InputError("batch has " + std::to_string(batch.dim()) + " columns, network expects " +
                         std::to_string(params.input_dim));
    }
    const MatrixXd x = batch.points();
    const MatrixXd z = run_stack(params.encoder, x, nullptr);
    const MatrixXd rec = run_stack(params.decoder, z, nullptr);
    return {to_cloud(z), to_cloud(rec)};
}

PointCloud encode(const MlpParams& params, const PointCloud& data) {
    if (data.dim() != params.input_dim) {
        throw InputError("data has " + std::to_string(data.dim()) + " columns, network expects " +
                         std::to_string(params.input_dim));
    }
    return to_cloud(run_stack(params.encoder, MatrixXd(data.points()), nullptr));
}

void TrainConfig::validate() const {
    if (batch_size < 4) throw InputError("batch_size must be >= 4");
    if (!(learning_rate > 0.0)) throw InputError("learning_rate must be positive");
    if (epochs_total < 0) throw InputError("epochs_total must be non-negative");
    if (rtd_start_epoch < 0 || rtd_start_epoch > epochs_total) {
        throw InputError("rtd_start_epoch must lie in [0, epochs_total]");
    }
    if (!(lambda >= 0.0)) throw InputError("lambda must be non-negative");
    if (hidden_dim < 1 || layers < 1 || latent_dim < 1) {
        throw InputError("hidden_dim, layers and latent_dim must be >= 1");
    }
}

LossGradient loss_and_gradient(const MlpParams& params, const PointCloud& batch, double lambda,
                               RtdLossVariant variant, bool minimum_bypass) {
    if (batch.dim() != params.input_dim) {
        throw InputError("batch width does not match the network input");
    }
    const int b = batch.size();
    const MatrixXd x = batch.points();
    StackPass enc;
    StackPass dec;
    const MatrixXd z = run_stack(params.encoder, x, &enc);
    const MatrixXd rec = run_stack(params.decoder, z, &dec);

    LossGradient out;
    const MatrixXd diff = rec - x;
    out.loss.reconstruction = 0.5 * diff.squaredNorm() / b;

    MlpParams grads = params;
    MatrixXd d_z = backprop_stack(params.decoder, dec, diff / b, grads.decoder);

    if (lambda > 0.0) {
        try {
            const PointCloud latent = to_cloud(z);
            SubgradientOptions opt;
            opt.minimum_bypass = minimum_bypass;
            auto sg = rtd_subgradient(batch, latent, opt);
            double value = sg.value;
            RowMatrix d_latent = sg.grads.d_x_tilde;
            if (variant == RtdLossVariant::MinPlusMax) {
                opt.variant = CrossVariant::Max;
                const auto sg_max = rtd_subgradient(batch, latent, opt);
                value += sg_max.value;
                d_latent += sg_max.grads.d_x_tilde;
            }
            out.loss.rtd = value;
            d_z += lambda * MatrixXd(d_latent);
        } catch (const SingularityError&) {
            out.rtd_skipped = true;
        }
    }
    out.loss.total = out.loss.reconstruction + lambda * out.loss.rtd;
    backprop_stack(params.encoder, enc, d_z, grads.encoder);
    out.grad = grads.flatten();
    return out;
}

TrainResult train(const PointCloud& data, const TrainConfig& config) {
    config.validate();
    data.validate();
    if (data.size() < config.batch_size) {
        throw InputError("dataset has fewer points than one batch");
    }
    TrainResult result;
    result.params = MlpParams::init(data.dim(), config.hidden_dim, config.layers, config.latent_dim,
                                    config.seed);
    Rng rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<double> theta = result.params.flatten();
    std::vector<double> m1(theta.size(), 0.0), m2(theta.size(), 0.0);
    std::int64_t step = 0;

    const int n = data.size();
    for (int epoch = 0; epoch < config.epochs_total; ++epoch) {
        const bool with_rtd = epoch >= config.rtd_start_epoch && config.lambda > 0.0;
        const auto order = rng.permutation(n);
        EpochStats stats;
        stats.epoch = epoch;
        int rtd_batches = 0;
        for (int start = 0; start < n; start += config.batch_size) {
            const int size = std::min(config.batch_size, n - start);
            PointCloud batch(size, data.dim());
            for (int i = 0; i < size; ++i) batch.points().row(i) = data.row(order[start + i]);
            // A cross matrix needs at least two points.
            const bool rtd_here = with_rtd && size >= 2;
            result.params.assign(theta);
            const auto lg = loss_and_gradient(result.params, batch, rtd_here ? config.lambda : 0.0,
                                              config.rtd_variant, config.minimum_bypass);
            ++step;
            if (config.optimizer == OptimizerKind::Sgd) {
                for (std::size_t k = 0; k < theta.size(); ++k) theta[k] -= config.learning_rate * lg.grad[k];
            } else {
                const double c1 = 1.0 - std::pow(config.adam_beta1, static_cast<double>(step));
                const double c2 = 1.0 - std::pow(config.adam_beta2, static_cast<double>(step));
                for (std::size_t k = 0; k < theta.size(); ++k) {
                    const double g = lg.grad[k];
                    m1[k] = config.adam_beta1 * m1[k] + (1.0 - config.adam_beta1) * g;
                    m2[k] = config.adam_beta2 * m2[k] + (1.0 - config.adam_beta2) * g * g;
                    theta[k] -= config.learning_rate * (m1[k] / c1) /
                                (std::sqrt(m2[k] / c2) + config.adam_epsilon);
                }
            }
            stats.reconstruction += lg.loss.reconstruction * size;
            if (rtd_here && !lg.rtd_skipped) {
                stats.rtd += lg.loss.rtd;
                ++rtd_batches;
            }
            if (lg.rtd_skipped) ++stats.skipped_rtd_batches;
        }
        stats.reconstruction /= n;
        if (rtd_batches > 0) stats.rtd /= rtd_batches;
        stats.total = stats.reconstruction + (with_rtd ? config.lambda * stats.rtd : 0.0);
        result.history.push_back(stats);
    }
    result.params.assign(theta);
    return result;
}

std::string to_string(OptimizerKind kind) { return kind == OptimizerKind::Sgd ? "sgd" : "adam"; }

std::string to_string(RtdLossVariant variant) {
    return variant == RtdLossVariant::Min ? "min" : "min+max";
}

OptimizerKind parse_optimizer(const std::string& name) {
    if (name == "sgd") return OptimizerKind::Sgd;
    if (name == "adam") return OptimizerKind::Adam;
    throw InputError("unknown optimizer '" + name + "' (expected sgd or adam)");
}

RtdLossVariant parse_rtd_variant(const std::string& name) {
    if (name == "min") return RtdLossVariant::Min;
    if (name == "min+max") return RtdLossVariant::MinPlusMax;
    throw InputError("unknown rtd variant '" + name + "' (expected min or min+max)");
}

namespace {

constexpr const char* kCheckpointFormat = "rtd-ae-checkpoint";
constexpr int kCheckpointVersion = 1;

nlohmann::json stack_json(const std::vector<DenseLayer>& stack) {
    auto arr = nlohmann::json::array();
    for (const auto& layer : stack) {
        std::vector<double> w;
        for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
            for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) w.push_back(layer.weight(r, c));
        }
        std::vector<double> bias(layer.bias.data(), layer.bias.data() + layer.bias.size());
        arr.push_back({{"rows", layer.weight.rows()}, {"cols", layer.weight.cols()},
                       {"weight", w}, {"bias", bias}});
    }
    return arr;
}

std::vector<DenseLayer> stack_from(const nlohmann::json& arr) {
    std::vector<DenseLayer> stack;
    for (const auto& item : arr) {
        const auto rows = item.at("rows").get<Eigen::Index>();
        const auto cols = item.at("cols").get<Eigen::Index>();
        const auto w = item.at("weight").get<std::vector<double>>();
        const auto b = item.at("bias").get<std::vector<double>>();
        if (rows < 1 || cols < 1 || static_cast<Eigen::Index>(w.size()) != rows * cols ||
            static_cast<Eigen::Index>(b.size()) != rows) {
            throw InputError("checkpoint layer arrays do not match their declared shape");
        }
        DenseLayer layer{MatrixXd(rows, cols), Eigen::VectorXd(rows)};
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) layer.weight(r, c) = w[static_cast<std::size_t>(r * cols + c)];
            layer.bias(r) = b[static_cast<std::size_t>(r)];
        }
        stack.push_back(std::move(layer));
    }
    return stack;
}

}  // namespace

void save_checkpoint(const std::string& path, const MlpParams& params, const TrainConfig& config) {
    params.validate();
    nlohmann::json j;
    j["format"] = kCheckpointFormat;
    j["version"] = kCheckpointVersion;
    j["input_dim"] = params.input_dim;
    j["hidden_dim"] = params.hidden_dim;
    j["layers"] = params.layers;
    j["latent_dim"] = params.latent_dim;
    j["activation"] = "tanh";
    j["encoder"] = stack_json(params.encoder);
    j["decoder"] = stack_json(params.decoder);
    j["config"] = {{"batch_size", config.batch_size},
                   {"learning_rate", config.learning_rate},
                   {"epochs_total", config.epochs_total},
                   {"rtd_start_epoch", config.rtd_start_epoch},
                   {"lambda", config.lambda},
                   {"seed", config.seed},
                   {"rtd_variant", to_string(config.rtd_variant)},
                   {"optimizer", to_string(config.optimizer)},
                   {"minimum_bypass", config.minimum_bypass},
                   {"hidden_dim", config.hidden_dim},
                   {"layers", config.layers},
                   {"latent_dim", config.latent_dim},
                   {"adam_beta1", config.adam_beta1},
                   {"adam_beta2", config.adam_beta2},
                   {"adam_epsilon", config.adam_epsilon}};
    std::ofstream out(path);
    if (!out) throw InputError("cannot open " + path + " for writing");
    out << j.dump(1) << '\n';
}

MlpParams load_checkpoint(const std::string& path, TrainConfig* config) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    try {
        const auto j = nlohmann::json::parse(in);
        if (j.at("format").get<std::string>() != kCheckpointFormat) {
            throw InputError(path + " is not a checkpoint");
        }
        if (j.at("version").get<int>() != kCheckpointVersion) {
            throw InputError(path + ": unsupported checkpoint version");
        }
        if (j.at("activation").get<std::string>() != "tanh") {
            throw InputError(path + ": unsupported activation");
        }
        MlpParams p;
        p.input_dim = j.at("input_dim").get<int>();
        p.hidden_dim = j.at("hidden_dim").get<int>();
        p.layers = j.at("layers").get<int>();
        p.latent_dim = j.at("latent_dim").get<int>();
        p.encoder = stack_from(j.at("encoder"));
        p.decoder = stack_from(j.at("decoder"));
        p.validate();
        if (config) {
            const auto& c = j.at("config");
            config->batch_size = c.at("batch_size").get<int>();
            config->learning_rate = c.at("learning_rate").get<double>();
            config->epochs_total = c.at("epochs_total").get<int>();
            config->rtd_start_epoch = c.at("rtd_start_epoch").get<int>();
            config->lambda = c.at("lambda").get<double>();
            config->seed = c.at("seed").get<std::uint64_t>();
            config->rtd_variant = parse_rtd_variant(c.at("rtd_variant").get<std::string>());
            config->optimizer = parse_optimizer(c.at("optimizer").get<std::string>());
            config->minimum_bypass = c.at("minimum_bypass").get<bool>();
            config->hidden_dim = c.at("hidden_dim").get<int>();
            config->layers = c.at("layers").get<int>();
            config->latent_dim = c.at("latent_dim").get<int>();
            config->adam_beta1 = c.at("adam_beta1").get<double>();
            config->adam_beta2 = c.at("adam_beta2").get<double>();
            config->adam_epsilon = c.at("adam_epsilon").get<double>();
        }
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path + ": malformed checkpoint: " + e.what());
    }
}

}  // namespace rtd
