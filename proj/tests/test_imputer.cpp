#include <doctest.h>

#include <cmath>
#include <functional>

#include "core/ingest.hpp"
#include "imputer/imputer.hpp"

using namespace edf;
using namespace edf::imputer;

namespace {

DailySeries make_series(int n, const std::function<double(std::int64_t)>& f) {
    DailySeries s;
    s.key = {Ward::Surgery, Complexity::Major};
    s.start = {2017, 1, 1};
    for (int t = 0; t < n; ++t)
        s.counts.push_back(std::max<std::int64_t>(0, std::llround(f(t))));
    return s;
}

CovariateTable empty_covariates() { return CovariateTable{}; }

}  // namespace

TEST_CASE("constant series fits as a flat trend with zero sigma") {
    auto s = make_series(900, [](std::int64_t) { return 7.0; });
    auto model = fit_additive(s, empty_covariates());
    for (std::int64_t t : {0L, 250L, 899L}) CHECK(model.fitted(t) == doctest::Approx(7.0).epsilon(1e-6));
    CHECK(model.residual_sigma < 1e-6);
    for (int dow = 0; dow < 7; ++dow) CHECK(std::fabs(model.weekly_component(dow)) < 1e-6);
}

TEST_CASE("weekly sinusoid amplitude is recovered") {
    auto s = make_series(1460, [](std::int64_t t) {
        int dow = CalendarDate{2017, 1, 1}.plus_days(t).day_of_week();
        return 100.0 + 30.0 * std::sin(2 * M_PI * dow / 7.0);
    });
    auto model = fit_additive(s, empty_covariates());
    // least-squares projection of the fitted weekly component onto the
    // generating sinusoid recovers its amplitude
    double num = 0, den = 0;
    for (int dow = 0; dow < 7; ++dow) {
        double basis = std::sin(2 * M_PI * dow / 7.0);
        num += model.weekly_component(dow) * basis;
        den += basis * basis;
    }
    CHECK(num / den == doctest::Approx(30.0).epsilon(0.05));
}

TEST_CASE("pure linear ramp is fit by the trend alone") {
    auto s = make_series(1000, [](std::int64_t t) { return static_cast<double>(t) / 2.0; });
    auto model = fit_additive(s, empty_covariates());
    // interior slope; ridge shrinkage bends the very ends slightly
    double slope = (model.fitted(900) - model.fitted(100)) / 800.0;
    CHECK(slope == doctest::Approx(0.5).epsilon(0.02));
    for (int dow = 0; dow < 7; ++dow) CHECK(std::fabs(model.weekly_component(dow)) < 0.3);
}

TEST_CASE("sigma = 0 imputation equals the rounded fit") {
    auto s = make_series(900, [](std::int64_t) { return 4.0; });
    s.anomaly_window = DateInterval{{2018, 1, 1}, {2018, 3, 1}};
    auto model = fit_additive(s, empty_covariates());
    model.residual_sigma = 0;
    // force a fractional fitted value
    model.coeffs(0) += 0.4;
    auto [imputed, report] = impute_window(s, model, 99);
    for (std::int64_t t = 0; t < model.n_days; ++t) {
        CalendarDate d = s.start.plus_days(t);
        if (s.anomaly_window->contains(d))
            CHECK(imputed.counts[static_cast<size_t>(t)] == std::llround(model.fitted(t)));
    }
    CHECK(report.n_replaced ==
          s.anomaly_window->end.serial() - s.anomaly_window->start.serial() + 1);
}

TEST_CASE("imputed values are clamped at zero and stay integers") {
    auto s = make_series(900, [](std::int64_t) { return 0.0; });
    s.anomaly_window = DateInterval{{2018, 1, 1}, {2018, 6, 1}};
    auto model = fit_additive(s, empty_covariates());
    model.coeffs.setZero();
    model.coeffs(0) = 0.2;        // near-zero fit
    model.residual_sigma = 3.0;   // large noise: many negative draws
    auto [imputed, report] = impute_window(s, model, 7);
    bool saw_zero = false;
    for (auto v : imputed.counts) {
        CHECK(v >= 0);
        if (v == 0) saw_zero = true;
    }
    CHECK(saw_zero);
}

TEST_CASE("imputation is deterministic and leaves non-window values untouched") {
    // weekly pattern plus deterministic pseudo-noise so residual sigma > 0
    auto s = make_series(1100, [](std::int64_t t) {
        return 9.0 + (t % 7) + ((static_cast<std::uint64_t>(t) * 2654435761ull >> 16) % 5);
    });
    s.anomaly_window = DateInterval{{2019, 2, 1}, {2019, 5, 1}};
    auto model = fit_additive(s, empty_covariates());
    auto [a, ra] = impute_window(s, model, 31);
    auto [b, rb] = impute_window(s, model, 31);
    CHECK(a.counts == b.counts);
    auto [c, rc] = impute_window(s, model, 32);
    CHECK(a.counts != c.counts);
    for (std::int64_t t = 0; t < model.n_days; ++t) {
        CalendarDate d = s.start.plus_days(t);
        if (!s.anomaly_window->contains(d))
            CHECK(a.counts[static_cast<size_t>(t)] == s.counts[static_cast<size_t>(t)]);
    }
}

TEST_CASE("imputed mean tracks the model fit over a long window") {
    auto s = make_series(1460, [](std::int64_t t) { return 50.0 + 5.0 * std::sin(t / 40.0); });
    s.anomaly_window = DateInterval{{2019, 1, 1}, {2019, 12, 31}};
    auto model = fit_additive(s, empty_covariates());
    auto [imputed, report] = impute_window(s, model, 11);
    double imp_mean = 0, fit_mean = 0;
    int n = 0;
    for (std::int64_t t = 0; t < model.n_days; ++t) {
        CalendarDate d = s.start.plus_days(t);
        if (!s.anomaly_window->contains(d)) continue;
        imp_mean += static_cast<double>(imputed.counts[static_cast<size_t>(t)]);
        fit_mean += model.fitted(t);
        ++n;
    }
    imp_mean /= n;
    fit_mean /= n;
    CHECK(std::fabs(imp_mean - fit_mean) < 3 * model.residual_sigma / std::sqrt(n) + 0.5);
}

TEST_CASE("window covering everything is rejected") {
    auto s = make_series(400, [](std::int64_t) { return 3.0; });
    s.anomaly_window = DateInterval{s.start, s.last_date()};
    CHECK_THROWS_WITH_AS(fit_additive(s, empty_covariates()),
                         doctest::Contains("nothing to fit on"), Error);
}

TEST_CASE("dataset-level imputation restores aggregation identities") {
    Dataset ds;
    for (Ward w : kBaseWards)
        for (Complexity c : {Complexity::Major, Complexity::Other}) {
            auto s = make_series(1100, [&](std::int64_t t) { return 6.0 + (t + static_cast<int>(w)) % 5; });
            s.key = {w, c};
            ds.series[s.key] = s;
        }
    ds.derive_aggregates(/*mark_derived_before_imputation=*/true);
    set_anomaly_window(ds, {{2019, 3, 1}, {2019, 8, 1}});

    auto [imputed, reports] = impute_dataset(ds, AdditiveConfig{}, 5);
    CHECK(reports.size() == 16);
    imputed.check_aggregation_identities();  // holds everywhere after re-derivation
    // determinism
    auto [imputed2, reports2] = impute_dataset(ds, AdditiveConfig{}, 5);
    for (const auto& [key, s] : imputed.series) CHECK(imputed2.get(key).counts == s.counts);
}
