#pragma once

#include "rtd/geometry.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rtd {

struct DenseLayer {
    Eigen::MatrixXd weight;  ///< out x in
    Eigen::VectorXd bias;    ///< out
};

/// Fully connected autoencoder. The encoder has `layers` affine maps
/// input -> hidden -> ... -> hidden -> latent with tanh between them; the
/// decoder mirrors it. Both output layers are linear.
struct MlpParams {
    int input_dim = 0;
    int hidden_dim = 0;
    int layers = 0;
    int latent_dim = 0;
    std::vector<DenseLayer> encoder;
    std::vector<DenseLayer> decoder;

    /// Zero-initialised network with the given shape.
    static MlpParams zeros(int input_dim, int hidden_dim, int layers, int latent_dim);
    /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and biases.
    static MlpParams init(int input_dim, int hidden_dim, int layers, int latent_dim,
                          std::uint64_t seed);

    /// Throws InputError unless the layer shapes chain and entries are finite.
    void validate() const;
    std::size_t parameter_count() const;
    std::vector<double> flatten() const;
    void assign(const std::vector<double>& flat);
};

struct ForwardResult {
    PointCloud latent;
    PointCloud reconstruction;
};

ForwardResult forward(const MlpParams& params, const PointCloud& batch);
PointCloud encode(const MlpParams& params, const PointCloud& data);

enum class OptimizerKind { Sgd, Adam };
enum class RtdLossVariant { Min, MinPlusMax };

struct TrainConfig {
    int batch_size = 80;
    double learning_rate = 1e-3;
    int epochs_total = 100;
    int rtd_start_epoch = 20;
    double lambda = 1.0;
    std::uint64_t seed = 0;
    RtdLossVariant rtd_variant = RtdLossVariant::Min;
    OptimizerKind optimizer = OptimizerKind::Sgd;
    bool minimum_bypass = false;
    int hidden_dim = 16;
    int layers = 3;
    int latent_dim = 2;
    /// Conventional Adam constants.
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;

    void validate() const;
};

/// Batch loss: 0.5 * mean_i ||x_i - rec_i||^2 + lambda * rtd(X, Z).
struct LossTerms {
    double reconstruction = 0.0;
    double rtd = 0.0;
    double total = 0.0;
};

struct LossGradient {
    LossTerms loss;
    std::vector<double> grad;  ///< same layout as MlpParams::flatten()
    bool rtd_skipped = false;  ///< singular RTD gradient; term left out
};

/// Loss of one batch and its gradient with respect to every parameter.
/// lambda == 0 skips the RTD computation entirely.
LossGradient loss_and_gradient(const MlpParams& params, const PointCloud& batch, double lambda,
                               RtdLossVariant variant = RtdLossVariant::Min,
                               bool minimum_bypass = false);

struct EpochStats {
    int epoch = 0;
    double reconstruction = 0.0;  ///< per-sample mean over the epoch
    double rtd = 0.0;             ///< mean over batches with an RTD term
    double total = 0.0;
    int skipped_rtd_batches = 0;

    friend bool operator==(const EpochStats&, const EpochStats&) = default;
};

struct TrainResult {
    MlpParams params;
    std::vector<EpochStats> history;
};

/// Two-phase training: reconstruction only before rtd_start_epoch, then
/// reconstruction + lambda * rtd on every mini-batch.
TrainResult train(const PointCloud& data, const TrainConfig& config);

/// Versioned JSON checkpoint: shapes, row-major weights and the config.
void save_checkpoint(const std::string& path, const MlpParams& params, const TrainConfig& config);
MlpParams load_checkpoint(const std::string& path, TrainConfig* config = nullptr);

std::string to_string(OptimizerKind kind);
std::string to_string(RtdLossVariant variant);
OptimizerKind parse_optimizer(const std::string& name);
RtdLossVariant parse_rtd_variant(const std::string& name);

}  // namespace rtd
