#include "imputer/imputer.hpp"

#include "util/rng.hpp"

namespace edf::imputer {

namespace {

int n_features(const AdditiveConfig& c) {
    return 2 + c.n_changepoints + 2 * c.k_weekly + 2 * c.k_yearly + 1;
}

// One design-matrix row for day index t.
Eigen::RowVectorXd make_row(const AdditiveConfig& cfg, const CalendarDate& start, std::int64_t n,
                            std::int64_t t, bool holiday) {
    Eigen::RowVectorXd row(n_features(cfg));
    int col = 0;
    double tn = static_cast<double>(t) / static_cast<double>(n);
    row(col++) = 1.0;
    row(col++) = tn;
    for (int j = 1; j <= cfg.n_changepoints; ++j) {
        double knot = static_cast<double>(j) / (cfg.n_changepoints + 1);
        row(col++) = std::max(0.0, tn - knot);
    }
    CalendarDate d = start.plus_days(t);
    int dow = d.day_of_week();
    for (int k = 1; k <= cfg.k_weekly; ++k) {
        row(col++) = std::sin(2 * M_PI * k * dow / 7.0);
        row(col++) = std::cos(2 * M_PI * k * dow / 7.0);
    }
    int doy = d.day_of_year();
    for (int k = 1; k <= cfg.k_yearly; ++k) {
        row(col++) = std::sin(2 * M_PI * k * doy / 365.25);
        row(col++) = std::cos(2 * M_PI * k * doy / 365.25);
    }
    row(col++) = holiday ? 1.0 : 0.0;
    return row;
}

}  // namespace

double AdditiveModel::fitted(std::int64_t t) const {
    bool holiday = t >= 0 && t < static_cast<std::int64_t>(holiday_mask_.size()) &&
                   holiday_mask_[static_cast<size_t>(t)];
    return make_row(config, start, n_days, t, holiday).dot(coeffs);
}

double AdditiveModel::weekly_component(int dow) const {
    int base = 2 + config.n_changepoints;
    double out = 0;
    for (int k = 1; k <= config.k_weekly; ++k) {
        out += coeffs(base + 2 * (k - 1)) * std::sin(2 * M_PI * k * dow / 7.0);
        out += coeffs(base + 2 * (k - 1) + 1) * std::cos(2 * M_PI * k * dow / 7.0);
    }
    return out;
}

AdditiveModel fit_additive(const DailySeries& series, const CovariateTable& covariates,
                           const AdditiveConfig& config) {
    series.validate();
    const std::int64_t n = static_cast<std::int64_t>(series.counts.size());

    AdditiveModel model;
    model.config = config;
    model.key = series.key;
    model.start = series.start;
    model.n_days = n;
    model.holiday_mask_.assign(static_cast<size_t>(n), 0);
    for (std::int64_t t = 0; t < n; ++t) {
        CalendarDate d = series.start.plus_days(t);
        if (covariates.covers(d, d) && covariates.at(d).is_holiday)
            model.holiday_mask_[static_cast<size_t>(t)] = 1;
    }

    std::vector<std::int64_t> train_idx;
    for (std::int64_t t = 0; t < n; ++t) {
        CalendarDate d = series.start.plus_days(t);
        if (series.anomaly_window && series.anomaly_window->contains(d)) continue;
        train_idx.push_back(t);
    }
    if (train_idx.empty()) fail_data("nothing to fit on: anomaly window covers all data");

    const int p = n_features(config);
    Eigen::MatrixXd X(static_cast<Eigen::Index>(train_idx.size()), p);
    Eigen::VectorXd y(static_cast<Eigen::Index>(train_idx.size()));
    for (size_t i = 0; i < train_idx.size(); ++i) {
        std::int64_t t = train_idx[i];
        X.row(static_cast<Eigen::Index>(i)) =
            make_row(config, series.start, n, t, model.holiday_mask_[static_cast<size_t>(t)]);
        y(static_cast<Eigen::Index>(i)) = static_cast<double>(series.counts[static_cast<size_t>(t)]);
    }

    Eigen::MatrixXd gram = X.transpose() * X;
    for (int j = 1; j < p; ++j) gram(j, j) += config.ridge_lambda;  // intercept unpenalized
    model.coeffs = gram.ldlt().solve(X.transpose() * y);

    Eigen::VectorXd resid = y - X * model.coeffs;
    model.residual_sigma = std::sqrt(resid.squaredNorm() / static_cast<double>(resid.size()));
    return model;
}

void to_json(nlohmann::json& j, const ImputationReport& r) {
    j = {{"series", r.key.to_string()},
         {"window_start", r.window.start.to_string()},
         {"window_end", r.window.end.to_string()},
         {"n_replaced", r.n_replaced},
         {"sigma", r.sigma},
         {"seed", r.seed}};
}

std::pair<DailySeries, ImputationReport> impute_window(const DailySeries& series,
                                                       const AdditiveModel& model,
                                                       std::uint64_t seed) {
    if (!series.anomaly_window) fail_data("series " + series.key.to_string() + " has no anomaly window");
    if (!(model.key == series.key) || model.start != series.start ||
        model.n_days != static_cast<std::int64_t>(series.counts.size()))
        fail_data("additive model was not fitted on series " + series.key.to_string());

    DailySeries out = series;
    ImputationReport report;
    report.key = series.key;
    report.window = *series.anomaly_window;
    report.sigma = model.residual_sigma;
    report.seed = seed;

    Rng rng(seed);
    for (std::int64_t t = 0; t < model.n_days; ++t) {
        CalendarDate d = series.start.plus_days(t);
        if (!series.anomaly_window->contains(d)) continue;
        double value = model.fitted(t) + rng.normal(0.0, model.residual_sigma);
        out.counts[static_cast<size_t>(t)] =
            std::max<std::int64_t>(0, static_cast<std::int64_t>(std::llround(value)));
        ++report.n_replaced;
    }
    return {std::move(out), report};
}

std::pair<Dataset, std::vector<ImputationReport>> impute_dataset(const Dataset& dataset,
                                                                 const AdditiveConfig& config,
                                                                 std::uint64_t seed) {
    Dataset out;
    out.covariates = dataset.covariates;
    std::vector<ImputationReport> reports;
    std::uint64_t stream = 0;
    for (Ward w : kBaseWards) {
        for (Complexity c : {Complexity::Major, Complexity::Other}) {
            const DailySeries& s = dataset.get({w, c});
            std::uint64_t series_seed = Rng::substream(seed, stream++).next_u64();
            if (!s.anomaly_window) {
                out.series[s.key] = s;
                continue;
            }
            AdditiveModel model = fit_additive(s, dataset.covariates, config);
            auto [imputed, report] = impute_window(s, model, series_seed);
            imputed.anomaly_window.reset();  // window now holds counterfactual data
            out.series[imputed.key] = std::move(imputed);
            reports.push_back(report);
        }
    }
    out.derive_aggregates();
    out.check_aggregation_identities();
    return {std::move(out), std::move(reports)};
}

}  // namespace edf::imputer
