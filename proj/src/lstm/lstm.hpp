#pragma once

#include <json.hpp>

#include "features/features.hpp"
#include "util/rng.hpp"

namespace edf::lstm {

struct LstmConfig {
    int hidden_size = 32;
    int n_layers = 2;
    double dropout_p = 0.2;
    int dense_units = 128;
    double learning_rate = 0.01;
    int batch_size = 64;
    int max_epochs = 200;
    int patience = 10;
    double grad_clip = 5.0;
    double forget_bias = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
};

void to_json(nlohmann::json& j, const LstmConfig& c);
void from_json(const nlohmann::json& j, LstmConfig& c);

/// Weights stored input-major for right multiplication: Z = X * Wx + H * Wh.
/// Gate column blocks in order: input, forget, cell candidate, output.
struct LayerParams {
    Eigen::MatrixXd Wx;  // F_in x 4H
    Eigen::MatrixXd Wh;  // H x 4H
    Eigen::VectorXd b;   // 4H
};

struct LstmParams {
    int input_size = 0;
    std::vector<LayerParams> layers;
    Eigen::MatrixXd Wd;  // H x dense
    Eigen::VectorXd bd;
    Eigen::MatrixXd Wp;  // dense x 7
    Eigen::VectorXd bp;

    /// Flat views over every parameter block, fixed order; gradients and
    /// optimizer state reuse the same shape so the views align.
    std::vector<Eigen::Map<Eigen::VectorXd>> blocks();
    std::vector<Eigen::Map<const Eigen::VectorXd>> blocks() const;
    void set_zero();
};

/// Fresh network: weights uniform(-1/sqrt(hidden), +1/sqrt(hidden)), forget
/// gate biases at config.forget_bias, everything else zero.
LstmParams init_params(const LstmConfig& config, int input_size, Rng& rng);

struct ForwardCache {
    // per layer, per step: gate activations and cell states, batch-major
    std::vector<std::vector<Eigen::MatrixXd>> I, F, G, O, C, TanhC;
    std::vector<std::vector<Eigen::MatrixXd>> H;  // [layer][step] hidden, step 0 = zeros
    std::vector<Eigen::MatrixXd> X;               // input steps, B x F
    Eigen::MatrixXd dropout_mask;                 // B x H, scaled; ones in eval
    Eigen::MatrixXd HD, U, A;                     // dropout output, dense pre/post ReLU
};

/// Runs the stacked recurrence over all kInputLen steps for a batch laid out
/// one sample per row per step. Returns B x 7 predictions.
Eigen::MatrixXd forward_batch(const LstmParams& params, const LstmConfig& config,
                              const std::vector<Eigen::MatrixXd>& steps, bool train_mode,
                              Rng* dropout_rng, ForwardCache* cache);

/// Single-sample convenience wrapper (batch of one).
Eigen::VectorXd forward(const LstmParams& params, const LstmConfig& config,
                        const Eigen::MatrixXd& X, bool train_mode, std::uint64_t seed,
                        ForwardCache* cache = nullptr);

/// Exact BPTT through the cached forward pass. grad_out is dLoss/dOut, B x 7.
LstmParams backward(const LstmParams& params, const LstmConfig& config, const ForwardCache& cache,
                    const Eigen::MatrixXd& grad_out);

struct TrainReport {
    int epochs_run = 0;
    std::vector<double> train_curve;
    std::vector<double> val_curve;
    int best_epoch = 0;
    bool early_stopped = false;
};

struct TrainedLstm {
    LstmConfig config;
    LstmParams params;
    features::StandardizationParams standardization;
    TrainReport report;
};

/// Chronologically last 20% of the windows validate; the rest train with
/// per-epoch shuffling, mini-batch Adam on standardized MSE, global gradient
/// clipping, and patience-based early stopping restoring the best epoch.
TrainedLstm train(const std::vector<features::WindowSample>& train_windows,
                  const LstmConfig& config);

/// Eval-mode forward on a standardized window, result in original units.
Eigen::VectorXd predict(const TrainedLstm& model, const features::WindowSample& sample);

nlohmann::json to_json(const TrainedLstm& model);
TrainedLstm trained_from_json(const nlohmann::json& j);
void save_trained(const TrainedLstm& model, const std::string& path);
TrainedLstm load_trained(const std::string& path);

}  // namespace edf::lstm
