#pragma once

#include <Eigen/Dense>

#include "core/covariates.hpp"
#include "core/series.hpp"

namespace edf::features {

inline constexpr int kInputLen = 14;  // past days fed to a model
inline constexpr int kHorizon = 7;    // days forecast ahead

/// Per-date feature matrix with the aligned target series. Column order is
/// fixed and recorded in `names`; 12 columns without autoregressive terms,
/// 23 with.
struct FeatureFrame {
    std::vector<CalendarDate> dates;
    std::vector<std::string> names;
    Eigen::MatrixXd values;  // dates x F
    Eigen::VectorXd target;  // y_t aligned with dates
};

/// One supervised example: the kInputLen days of features ending at `origin`
/// and the kHorizon subsequent targets.
struct WindowSample {
    CalendarDate origin;
    Eigen::MatrixXd X;  // kInputLen x F
    Eigen::VectorXd y;  // kHorizon
};

struct StandardizationParams {
    Eigen::VectorXd feature_mean;
    Eigen::VectorXd feature_std;  // floored at 1e-8
    double target_mean = 0;
    double target_std = 1;

    Eigen::MatrixXd scale_features(const Eigen::MatrixXd& X) const;
    Eigen::VectorXd scale_target(const Eigen::VectorXd& y) const;
    Eigen::VectorXd unscale_target(const Eigen::VectorXd& y) const;
};

/// Calendar + holiday + weather features, plus lag-1..7 and rolling 7/14-day
/// mean/std (windows ending at t, inclusive) when `include_autoregressive`.
/// The first kInputLen dates are dropped as rolling warm-up.
FeatureFrame build_frame(const DailySeries& series, const CovariateTable& covariates,
                         bool include_autoregressive, int days_since_holiday_cap = 365);

/// All stride-1 windows; empty when the frame is shorter than 21 rows.
std::vector<WindowSample> make_windows(const FeatureFrame& frame);

/// Samples whose 7-day target lies entirely inside the final `test_days`
/// dates go to the test set; samples with targets entirely before it go to
/// the train set; straddlers are discarded.
std::pair<std::vector<WindowSample>, std::vector<WindowSample>> chronological_split(
    const std::vector<WindowSample>& samples, int test_days = 180);

std::pair<std::pair<std::vector<WindowSample>, std::vector<WindowSample>>, StandardizationParams>
standardize(const std::vector<WindowSample>& train, const std::vector<WindowSample>& test);

StandardizationParams compute_standardization(const std::vector<WindowSample>& train);

void export_frame_csv(const FeatureFrame& frame, const std::string& path);

}  // namespace edf::features
