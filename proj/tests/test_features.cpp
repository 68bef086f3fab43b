#include <doctest.h>

#include <filesystem>
#include <functional>
#include <set>

#include "core/csv.hpp"
#include "features/features.hpp"

using namespace edf;
using namespace edf::features;

namespace {

CovariateTable make_covariates(CalendarDate start, int n, std::set<std::int64_t> holidays = {}) {
    CovariateTable cov;
    cov.start = start;
    for (int i = 0; i < n; ++i) {
        CovariateRecord r;
        r.tmax = 20.0 + (i % 9);
        r.tmin = 10.0 + (i % 5);
        r.wind_mean = 3.0 + 0.1 * (i % 4);
        r.precip_total = (i % 6) * 0.5;
        r.is_holiday = holidays.count(i) > 0;
        cov.records.push_back(r);
    }
    return cov;
}

DailySeries make_series(int n, const std::function<std::int64_t(std::int64_t)>& f) {
    DailySeries s;
    s.key = {Ward::Paediatric, Complexity::All};
    s.start = {2017, 1, 1};
    for (int t = 0; t < n; ++t) s.counts.push_back(f(t));
    return s;
}

}  // namespace

TEST_CASE("calendar columns") {
    auto s = make_series(60, [](std::int64_t t) { return 6; });
    auto cov = make_covariates(s.start, 60, {20});
    auto frame = build_frame(s, cov, true);
    REQUIRE(static_cast<int>(frame.names.size()) == 23);
    CHECK(frame.dates.size() == 60 - 14);

    // 2017-01-21 (index 20) is a Saturday and our planted holiday
    auto find_row = [&](CalendarDate d) {
        for (size_t i = 0; i < frame.dates.size(); ++i)
            if (frame.dates[i] == d) return static_cast<Eigen::Index>(i);
        FAIL("date not in frame");
        return Eigen::Index{0};
    };
    Eigen::Index sat = find_row({2017, 1, 21});
    CHECK(frame.values(sat, 0) == 5);  // day_of_week
    CHECK(frame.values(sat, 3) == 1);  // is_weekend
    CHECK(frame.values(sat, 6) == 1);  // is_holiday
    CHECK(frame.values(sat, 7) == 0);  // days_since_last_holiday
    Eigen::Index sun = find_row({2017, 1, 22});
    CHECK(frame.values(sun, 7) == 1);
    CHECK(frame.values(sun, 4) == doctest::Approx(std::sin(2 * M_PI * 6 / 7.0)));
    Eigen::Index mon = find_row({2017, 1, 23});
    CHECK(frame.values(mon, 3) == 0);
    // weather columns pass through
    CHECK(frame.values(sat, 8) == cov.at({2017, 1, 21}).tmax);
}

TEST_CASE("autoregressive columns on a constant series") {
    auto s = make_series(80, [](std::int64_t) { return 6; });
    auto frame = build_frame(s, make_covariates(s.start, 80), true);
    for (Eigen::Index r = 0; r < frame.values.rows(); ++r) {
        for (int k = 0; k < 7; ++k) CHECK(frame.values(r, 12 + k) == 6);  // lag_1..lag_7
        CHECK(frame.values(r, 19) == 6);  // roll_mean_7
        CHECK(frame.values(r, 20) == 0);  // roll_std_7
        CHECK(frame.values(r, 21) == 6);  // roll_mean_14
        CHECK(frame.values(r, 22) == 0);  // roll_std_14
    }
}

TEST_CASE("without autoregressive terms the frame has the 12 exogenous columns") {
    auto s = make_series(50, [](std::int64_t t) { return t % 4; });
    auto frame = build_frame(s, make_covariates(s.start, 50), false);
    CHECK(frame.names.size() == 12);
    CHECK(frame.values.cols() == 12);
}

TEST_CASE("window extraction") {
    auto make_frame = [&](int days) {
        auto s = make_series(days, [](std::int64_t t) { return t; });
        return build_frame(s, make_covariates(s.start, days), true);
    };
    SUBCASE("exactly one sample at the boundary") {
        auto w = make_windows(make_frame(35));  // frame length 21
        CHECK(w.size() == 1);
    }
    SUBCASE("length-200 frame gives 180 samples") {
        auto w = make_windows(make_frame(214));
        CHECK(w.size() == 180);
    }
    SUBCASE("frame too short gives no samples") {
        CHECK(make_windows(make_frame(34)).empty());
    }
    SUBCASE("targets and inputs are aligned") {
        auto frame = make_frame(60);
        auto w = make_windows(frame);
        for (const auto& sample : w) {
            // series value at date t is t's day index; y[0] is the target at t+1
            std::int64_t origin_day = sample.origin.serial() - CalendarDate{2017, 1, 1}.serial();
            CHECK(sample.y(0) == static_cast<double>(origin_day + 1));
            CHECK(sample.y(6) == static_cast<double>(origin_day + 7));
            // last input row is the origin day, first is 13 days earlier
            CHECK(sample.X(13, 12) == static_cast<double>(origin_day - 1));  // lag_1 at origin
            CHECK(sample.X(0, 12) == static_cast<double>(origin_day - 14));
        }
    }
}

TEST_CASE("chronological split") {
    auto s = make_series(1826, [](std::int64_t t) { return t % 9; });
    auto frame = build_frame(s, make_covariates(s.start, 1826), true);
    auto samples = make_windows(frame);
    auto [train, test] = chronological_split(samples, 180);

    CHECK(test.size() == 174);
    CHECK(train.size() + test.size() <= samples.size());

    // disjoint and ordered
    std::set<std::int64_t> train_origins, test_origins;
    for (const auto& w : train) train_origins.insert(w.origin.serial());
    for (const auto& w : test) test_origins.insert(w.origin.serial());
    for (auto o : test_origins) CHECK(train_origins.count(o) == 0);
    CHECK(*train_origins.rbegin() + 7 < *test_origins.begin() + 1);

    // latest train target date strictly before earliest test target date
    CalendarDate latest_train = CalendarDate::from_serial(*train_origins.rbegin()).plus_days(7);
    CalendarDate earliest_test = CalendarDate::from_serial(*test_origins.begin()).plus_days(1);
    CHECK(latest_train < earliest_test);

    CHECK_THROWS_AS(chronological_split(samples, 2000), Error);
}

TEST_CASE("standardization") {
    auto s = make_series(400, [](std::int64_t t) { return 3 + (t * 7 % 11); });
    auto frame = build_frame(s, make_covariates(s.start, 400), true);
    auto [train, test] = chronological_split(make_windows(frame), 60);
    auto [scaled, params] = standardize(train, test);

    SUBCASE("round-trips within 1e-9") {
        for (size_t i = 0; i < train.size(); ++i) {
            Eigen::VectorXd back = params.unscale_target(scaled.first[i].y);
            CHECK((back - train[i].y).cwiseAbs().maxCoeff() < 1e-9);
        }
    }
    SUBCASE("train columns have mean 0 after scaling") {
        Eigen::VectorXd colsum = Eigen::VectorXd::Zero(23);
        double rows = 0;
        for (const auto& w : scaled.first) {
            colsum += w.X.colwise().sum().transpose();
            rows += static_cast<double>(w.X.rows());
        }
        CHECK((colsum / rows).cwiseAbs().maxCoeff() < 1e-9);
    }
    SUBCASE("zero-variance column maps to zero") {
        // a constant series makes every lag column constant
        auto sc = make_series(400, [](std::int64_t) { return 5; });
        auto fc = build_frame(sc, make_covariates(sc.start, 400), true);
        auto [tr, te] = chronological_split(make_windows(fc), 60);
        auto [sc2, p2] = standardize(tr, te);
        for (const auto& w : sc2.first)
            for (int k = 0; k < 7; ++k) CHECK(w.X.col(12 + k).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("no future leakage: perturbing later targets never changes earlier inputs") {
    auto s = make_series(200, [](std::int64_t t) { return 4 + (t % 5); });
    auto cov = make_covariates(s.start, 200);
    auto before = make_windows(build_frame(s, cov, true));

    for (std::int64_t perturb_day : {100L, 150L, 199L}) {
        auto s2 = s;
        s2.counts[static_cast<size_t>(perturb_day)] += 13;
        auto after = make_windows(build_frame(s2, cov, true));
        REQUIRE(after.size() == before.size());
        for (size_t i = 0; i < before.size(); ++i) {
            std::int64_t origin_day = before[i].origin.serial() - s.start.serial();
            if (origin_day < perturb_day)
                CHECK(before[i].X == after[i].X);  // bit-identical
        }
    }
}

TEST_CASE("frame export includes the column manifest") {
    auto s = make_series(60, [](std::int64_t t) { return t % 3; });
    auto frame = build_frame(s, make_covariates(s.start, 60), true);
    auto path = (std::filesystem::temp_directory_path() / "edf_frame.csv").string();
    export_frame_csv(frame, path);
    auto t = edf::read_csv(path);
    CHECK(t.header.size() == 25);  // date + 23 features + target
    CHECK(t.header[1] == "day_of_week");
    CHECK(t.rows.size() == frame.dates.size());
}
