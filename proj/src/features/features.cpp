#include "features/features.hpp"

#include "core/csv.hpp"

namespace edf::features {

namespace {

constexpr double kStdFloor = 1e-8;

}  // namespace

Eigen::MatrixXd StandardizationParams::scale_features(const Eigen::MatrixXd& X) const {
    Eigen::MatrixXd out = X;
    out.rowwise() -= feature_mean.transpose();
    out.array().rowwise() /= feature_std.transpose().array();
    return out;
}

Eigen::VectorXd StandardizationParams::scale_target(const Eigen::VectorXd& y) const {
    return (y.array() - target_mean) / target_std;
}

Eigen::VectorXd StandardizationParams::unscale_target(const Eigen::VectorXd& y) const {
    return y.array() * target_std + target_mean;
}

FeatureFrame build_frame(const DailySeries& series, const CovariateTable& covariates,
                         bool include_autoregressive, int days_since_holiday_cap) {
    series.validate();
    if (!covariates.covers(series.start, series.last_date()))
        fail_data("covariates do not cover the range of series " + series.key.to_string());

    const std::int64_t n = static_cast<std::int64_t>(series.counts.size());
    FeatureFrame frame;
    frame.names = {"day_of_week", "month", "day_of_year", "is_weekend", "dow_sin", "dow_cos",
                   "is_holiday", "days_since_last_holiday", "tmax", "tmin", "wind_mean",
                   "precip_total"};
    if (include_autoregressive) {
        for (int k = 1; k <= 7; ++k) frame.names.push_back("lag_" + std::to_string(k));
        frame.names.insert(frame.names.end(),
                           {"roll_mean_7", "roll_std_7", "roll_mean_14", "roll_std_14"});
    }
    const int F = static_cast<int>(frame.names.size());
    const std::int64_t warmup = kInputLen;
    if (n <= warmup) fail_data("series too short for feature warm-up");

    frame.values.resize(n - warmup, F);
    frame.target.resize(n - warmup);
    frame.dates.reserve(static_cast<size_t>(n - warmup));

    // days since the most recent holiday on or before each date, capped;
    // covariate history before the series start counts
    std::int64_t last_holiday_serial = -1;
    for (CalendarDate d = covariates.start; d < series.start; d = d.next())
        if (covariates.at(d).is_holiday) last_holiday_serial = d.serial();

    for (std::int64_t t = 0; t < n; ++t) {
        CalendarDate d = series.start.plus_days(t);
        const CovariateRecord& cov = covariates.at(d);
        if (cov.is_holiday) last_holiday_serial = d.serial();
        if (t < warmup) continue;
        std::int64_t row = t - warmup;
        frame.dates.push_back(d);

        int dow = d.day_of_week();
        int col = 0;
        frame.values(row, col++) = dow;
        frame.values(row, col++) = d.month;
        frame.values(row, col++) = d.day_of_year();
        frame.values(row, col++) = dow >= 5 ? 1 : 0;
        frame.values(row, col++) = std::sin(2 * M_PI * dow / 7.0);
        frame.values(row, col++) = std::cos(2 * M_PI * dow / 7.0);
        frame.values(row, col++) = cov.is_holiday ? 1 : 0;
        double since = last_holiday_serial < 0 ? days_since_holiday_cap
                                               : static_cast<double>(d.serial() - last_holiday_serial);
        frame.values(row, col++) = std::min(since, static_cast<double>(days_since_holiday_cap));
        frame.values(row, col++) = cov.tmax;
        frame.values(row, col++) = cov.tmin;
        frame.values(row, col++) = cov.wind_mean;
        frame.values(row, col++) = cov.precip_total;

        if (include_autoregressive) {
            for (int k = 1; k <= 7; ++k)
                frame.values(row, col++) = static_cast<double>(series.counts[static_cast<size_t>(t - k)]);
            for (int w : {7, 14}) {
                double mean = 0;
                for (int j = 0; j < w; ++j)
                    mean += static_cast<double>(series.counts[static_cast<size_t>(t - j)]);
                mean /= w;
                double var = 0;
                for (int j = 0; j < w; ++j) {
                    double dev = static_cast<double>(series.counts[static_cast<size_t>(t - j)]) - mean;
                    var += dev * dev;
                }
                frame.values(row, col++) = mean;
                frame.values(row, col++) = std::sqrt(var / w);  // population std
            }
        }
        frame.target(row) = static_cast<double>(series.counts[static_cast<size_t>(t)]);
    }
    return frame;
}

std::vector<WindowSample> make_windows(const FeatureFrame& frame) {
    std::vector<WindowSample> out;
    const std::int64_t len = frame.values.rows();
    if (len < kInputLen + kHorizon) return out;  // too short: no valid origin
    for (std::int64_t i = kInputLen - 1; i + kHorizon < len; ++i) {
        WindowSample s;
        s.origin = frame.dates[static_cast<size_t>(i)];
        s.X = frame.values.middleRows(i - (kInputLen - 1), kInputLen);
        s.y = frame.target.segment(i + 1, kHorizon);
        out.push_back(std::move(s));
    }
    return out;
}

std::pair<std::vector<WindowSample>, std::vector<WindowSample>> chronological_split(
    const std::vector<WindowSample>& samples, int test_days) {
    if (samples.empty()) fail_data("no samples to split");
    CalendarDate last_target = samples.front().origin.plus_days(kHorizon);
    CalendarDate first_input = samples.front().origin.plus_days(-(kInputLen - 1));
    for (const auto& s : samples) {
        last_target = std::max(last_target, s.origin.plus_days(kHorizon));
        first_input = std::min(first_input, s.origin.plus_days(-(kInputLen - 1)));
    }
    std::int64_t span = last_target.serial() - first_input.serial() + 1;
    if (test_days >= span) fail_data("test_days >= series length");

    CalendarDate test_start = last_target.plus_days(-(test_days - 1));
    std::vector<WindowSample> train, test;
    for (const auto& s : samples) {
        CalendarDate target_first = s.origin.next();
        CalendarDate target_last = s.origin.plus_days(kHorizon);
        if (target_last < test_start)
            train.push_back(s);
        else if (target_first >= test_start)
            test.push_back(s);
        // straddlers discarded
    }
    return {std::move(train), std::move(test)};
}

StandardizationParams compute_standardization(const std::vector<WindowSample>& train) {
    if (train.empty()) fail_data("cannot standardize with an empty training set");
    const Eigen::Index F = train.front().X.cols();
    StandardizationParams p;
    p.feature_mean = Eigen::VectorXd::Zero(F);
    p.feature_std = Eigen::VectorXd::Zero(F);
    double rows = 0, tn = 0;
    for (const auto& s : train) {
        p.feature_mean += s.X.colwise().sum().transpose();
        rows += static_cast<double>(s.X.rows());
        p.target_mean += s.y.sum();
        tn += static_cast<double>(s.y.size());
    }
    p.feature_mean /= rows;
    p.target_mean /= tn;
    double tvar = 0;
    for (const auto& s : train) {
        p.feature_std +=
            (s.X.rowwise() - p.feature_mean.transpose()).array().square().colwise().sum().matrix().transpose();
        tvar += (s.y.array() - p.target_mean).square().sum();
    }
    p.feature_std = (p.feature_std / rows).array().sqrt().max(kStdFloor);
    p.target_std = std::max(std::sqrt(tvar / tn), kStdFloor);
    return p;
}

std::pair<std::pair<std::vector<WindowSample>, std::vector<WindowSample>>, StandardizationParams>
standardize(const std::vector<WindowSample>& train, const std::vector<WindowSample>& test) {
    StandardizationParams p = compute_standardization(train);
    auto apply = [&](const std::vector<WindowSample>& in) {
        std::vector<WindowSample> out;
        out.reserve(in.size());
        for (const auto& s : in)
            out.push_back(WindowSample{s.origin, p.scale_features(s.X), p.scale_target(s.y)});
        return out;
    };
    return {{apply(train), apply(test)}, p};
}

void export_frame_csv(const FeatureFrame& frame, const std::string& path) {
    CsvTable t;
    t.header.push_back("date");
    for (const auto& name : frame.names) t.header.push_back(name);
    t.header.push_back("target");
    for (Eigen::Index r = 0; r < frame.values.rows(); ++r) {
        std::vector<std::string> row;
        row.push_back(frame.dates[static_cast<size_t>(r)].to_string());
        for (Eigen::Index c = 0; c < frame.values.cols(); ++c)
            row.push_back(format_double(frame.values(r, c)));
        row.push_back(format_double(frame.target(r)));
        t.rows.push_back(std::move(row));
    }
    write_csv(path, t);
}

}  // namespace edf::features
