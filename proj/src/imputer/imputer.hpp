#pragma once

#include <json.hpp>

#include <Eigen/Dense>

#include "core/dataset.hpp"

namespace edf::imputer {

struct AdditiveConfig {
    int k_weekly = 3;        // weekly Fourier order
    int k_yearly = 10;       // yearly Fourier order
    int n_changepoints = 10; // evenly spaced piecewise-linear trend knots
    double ridge_lambda = 1.0;
};

/// Additive decomposition y ~ trend + weekly + yearly + holiday, fitted by
/// ridge-penalized least squares on non-anomalous dates. The fitted value is
/// defined for every date in the series range; the trend extrapolates
/// linearly through the anomaly window.
struct AdditiveModel {
    AdditiveConfig config;
    SeriesKey key;
    CalendarDate start;
    std::int64_t n_days = 0;
    Eigen::VectorXd coeffs;
    double residual_sigma = 0;  // population std of training residuals

    /// Fitted value at day index t (0-based from `start`).
    double fitted(std::int64_t t) const;
    /// Weekly component in isolation, for a given day-of-week.
    double weekly_component(int dow) const;

    std::vector<std::uint8_t> holiday_mask_;  // per-day flag over the series range
};

AdditiveModel fit_additive(const DailySeries& series, const CovariateTable& covariates,
                           const AdditiveConfig& config = {});

struct ImputationReport {
    SeriesKey key;
    DateInterval window;
    std::int64_t n_replaced = 0;
    double sigma = 0;
    std::uint64_t seed = 0;
};

void to_json(nlohmann::json& j, const ImputationReport& r);

/// Replaces counts inside the anomaly window with max(0, round(fit + noise)),
/// noise ~ N(0, sigma^2), rounding half away from zero. Values outside the
/// window are untouched. Deterministic given the seed.
std::pair<DailySeries, ImputationReport> impute_window(const DailySeries& series,
                                                       const AdditiveModel& model,
                                                       std::uint64_t seed);

/// Imputes every base series independently, then re-derives the aggregate
/// series from the imputed bases so the aggregation identities hold
/// everywhere.
std::pair<Dataset, std::vector<ImputationReport>> impute_dataset(const Dataset& dataset,
                                                                 const AdditiveConfig& config,
                                                                 std::uint64_t seed);

}  // namespace edf::imputer
