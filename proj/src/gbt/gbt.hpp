#pragma once

#include <json.hpp>

#include "features/features.hpp"

namespace edf::gbt {

struct GbtConfig {
    int n_trees = 100;
    double learning_rate = 0.05;
    int max_depth = 3;
    double lambda = 1.0;           // l2 leaf penalty
    double gamma = 0.0;            // split penalty
    double min_child_weight = 1.0; // minimum child hessian sum
    std::uint64_t seed = 0;        // unused by training (exact greedy is deterministic)

    void validate() const;
};

void to_json(nlohmann::json& j, const GbtConfig& c);
void from_json(const nlohmann::json& j, GbtConfig& c);

/// Node in a regression tree; `feature < 0` marks a leaf. Values below the
/// threshold go left. `cover` is the training hessian sum that reached the
/// node (recorded for SHAP).
struct TreeNode {
    int feature = -1;
    double threshold = 0;
    double weight = 0;   // leaf value
    double gain = 0;     // split gain, internal nodes only
    double cover = 0;
    int left = -1;
    int right = -1;
};

struct Tree {
    std::vector<TreeNode> nodes;  // index 0 is the root

    double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    int depth() const;
};

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0;
    double gain = 0;
};

/// Exact greedy split search over every (feature, midpoint-threshold)
/// candidate for the given sample subset. Ties break toward the lowest
/// feature index, then the lowest threshold. Exposed for oracle testing.
SplitChoice best_split(const Eigen::MatrixXd& X, const Eigen::VectorXd& grad,
                       const Eigen::VectorXd& hess, const std::vector<int>& samples,
                       const GbtConfig& config);

struct HorizonEnsemble {
    int horizon = 1;  // 1..7
    double base_score = 0;
    double learning_rate = 0.05;
    std::vector<Tree> trees;

    double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

/// Squared-error gradient boosting on a scalar target.
HorizonEnsemble fit_ensemble(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             const GbtConfig& config, int horizon = 1,
                             std::vector<double>* train_mse_curve = nullptr);

/// One independent ensemble per forecast horizon, on flattened windows.
struct MultistepGbt {
    GbtConfig config;
    std::vector<std::string> feature_manifest;  // flattened names, length L*F
    std::vector<HorizonEnsemble> ensembles;     // exactly kHorizon

    Eigen::VectorXd predict(const features::WindowSample& sample) const;
};

/// Row-major by day then feature: element day*F + f, day 0 the oldest.
Eigen::VectorXd flatten(const features::WindowSample& sample);
std::vector<std::string> flatten_names(const std::vector<std::string>& per_day_names);

MultistepGbt fit_multistep(const std::vector<features::WindowSample>& train,
                           const GbtConfig& config,
                           const std::vector<std::string>& per_day_names);

nlohmann::json to_json(const MultistepGbt& model);
MultistepGbt multistep_from_json(const nlohmann::json& j);
void save_multistep(const MultistepGbt& model, const std::string& path);
MultistepGbt load_multistep(const std::string& path);

}  // namespace edf::gbt
