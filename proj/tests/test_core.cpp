#include <doctest.h>

#include <filesystem>
#include <random>

#include "core/csv.hpp"
#include "core/dataset.hpp"
#include "core/ingest.hpp"

using namespace edf;
namespace fs = std::filesystem;

namespace {

std::string temp_dir(const std::string& tag) {
    auto dir = fs::temp_directory_path() / ("edf_core_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir.string();
}

void write_file(const std::string& path, const std::string& content) {
    write_text_file(path, content);
}

}  // namespace

TEST_CASE("calendar dates") {
    CalendarDate d{2017, 1, 1};
    CHECK(d.to_string() == "2017-01-01");
    CHECK(d.day_of_week() == 6);  // a Sunday
    CHECK(CalendarDate{2021, 12, 31}.serial() - d.serial() + 1 == 1826);
    CHECK(d.next() == CalendarDate{2017, 1, 2});
    CHECK(CalendarDate{2020, 2, 28}.next() == CalendarDate{2020, 2, 29});
    CHECK(CalendarDate{2021, 2, 28}.next() == CalendarDate{2021, 3, 1});
    CHECK(CalendarDate::parse("2017-06-03") == CalendarDate{2017, 6, 3});
    CHECK(CalendarDate{2017, 2, 1}.day_of_year() == 32);
    CHECK_THROWS_AS(CalendarDate::parse("2017-13-01"), Error);
    CHECK_THROWS_AS(CalendarDate::parse("noise"), Error);

    // successor adds exactly one day across a long span
    CalendarDate cur{2016, 12, 25};
    for (int i = 0; i < 400; ++i) {
        CalendarDate nxt = cur.next();
        CHECK(nxt.serial() == cur.serial() + 1);
        CHECK(cur < nxt);
        cur = nxt;
    }
}

TEST_CASE("ward and complexity labels") {
    CHECK(parse_ward("Surgery") == Ward::Surgery);
    CHECK(parse_ward("  emergency medicine ") == Ward::EmergencyMedicine);
    CHECK(parse_complexity("MINOR") == Complexity::Other);
    CHECK_THROWS_WITH_AS(parse_ward("icu"), doctest::Contains("valid labels"), Error);
    add_ward_alias("theatre", Ward::Surgery);
    CHECK(parse_ward("Theatre") == Ward::Surgery);
    CHECK(SeriesKey::parse("total_all_wards_all") ==
          SeriesKey{Ward::TotalAllWards, Complexity::All});
    CHECK(SeriesKey{Ward::Surgery, Complexity::Major}.to_string() == "surgery_major");
}

TEST_CASE("ingest_admissions aggregates per-admission rows") {
    auto dir = temp_dir("ingest");
    write_file(dir + "/adm.csv",
               "date,ward,complexity\n"
               "2017-01-01,surgery,major\n"
               "2017-01-01,surgery,major\n"
               "2017-01-01,surgery,major\n"
               "2017-01-01,surgery,minor\n"
               "2017-01-03,cardiology,major\n");
    auto result = ingest_admissions(dir + "/adm.csv");
    const auto& ds = result.dataset;
    CHECK(ds.get({Ward::Surgery, Complexity::Major}).at({2017, 1, 1}) == 3);
    CHECK(ds.get({Ward::Surgery, Complexity::Other}).at({2017, 1, 1}) == 1);
    // missing day inside the range is a zero-admission day, not an error
    CHECK(ds.get({Ward::Surgery, Complexity::Major}).at({2017, 1, 2}) == 0);
    CHECK(ds.get({Ward::Cardiology, Complexity::Major}).at({2017, 1, 3}) == 1);
    CHECK(ds.get({Ward::TotalAllWards, Complexity::All}).at({2017, 1, 1}) == 4);
    ds.check_aggregation_identities();
}

TEST_CASE("ingest_admissions with count column and aggregation identity") {
    auto dir = temp_dir("ingest_count");
    write_file(dir + "/adm.csv",
               "date,ward,complexity,count\n"
               "2017-01-01,surgery,major,2\n"
               "2017-01-01,surgery,other,5\n");
    auto ds = ingest_admissions(dir + "/adm.csv").dataset;
    CHECK(ds.get({Ward::Surgery, Complexity::All}).at({2017, 1, 1}) == 7);
}

TEST_CASE("ingest_admissions error paths") {
    auto dir = temp_dir("ingest_err");
    write_file(dir + "/empty.csv", "date,ward,complexity\n");
    CHECK_THROWS_WITH_AS(ingest_admissions(dir + "/empty.csv"), doctest::Contains("no rows"),
                         Error);

    write_file(dir + "/baddate.csv",
               "date,ward,complexity\n"
               "not-a-date,surgery,major\n"
               "2017-01-01,surgery,major\n");
    auto result = ingest_admissions(dir + "/baddate.csv");
    CHECK(result.diagnostics.size() == 1);
    CHECK(result.dataset.get({Ward::Surgery, Complexity::Major}).at({2017, 1, 1}) == 1);

    write_file(dir + "/badward.csv", "date,ward,complexity\n2017-01-01,dermatology,major\n");
    CHECK_THROWS_WITH_AS(ingest_admissions(dir + "/badward.csv"),
                         doctest::Contains("valid labels"), Error);

    write_file(dir + "/agg.csv", "date,ward,complexity\n2017-01-01,total_all_wards,major\n");
    CHECK_THROWS_AS(ingest_admissions(dir + "/agg.csv"), Error);
}

TEST_CASE("ingest_covariates") {
    auto dir = temp_dir("cov");
    write_file(dir + "/cov.csv",
               "date,tmax_c,tmin_c,wind_ms,precip_mm,is_holiday\n"
               "2017-01-01,24.1,13.0,3.2,0.0,1\n"
               "2017-01-02,20.0,12.0,2.0,1.5,0\n");
    auto cov = ingest_covariates(dir + "/cov.csv");
    CHECK(cov.at({2017, 1, 1}).is_holiday);
    CHECK(cov.at({2017, 1, 1}).tmax == doctest::Approx(24.1));
    CHECK_FALSE(cov.at({2017, 1, 2}).is_holiday);

    write_file(dir + "/dup.csv",
               "date,tmax_c,tmin_c,wind_ms,precip_mm,is_holiday\n"
               "2017-01-01,24.1,13.0,3.2,0.0,0\n"
               "2017-01-01,20.0,12.0,2.0,1.5,0\n");
    CHECK_THROWS_WITH_AS(ingest_covariates(dir + "/dup.csv"), doctest::Contains("duplicate"),
                         Error);

    write_file(dir + "/swap.csv",
               "date,tmax_c,tmin_c,wind_ms,precip_mm,is_holiday\n"
               "2017-06-01,10,12,2.0,0.0,0\n");
    CHECK_THROWS_WITH_AS(ingest_covariates(dir + "/swap.csv"),
                         doctest::Contains("tmax < tmin at 2017-06-01"), Error);

    write_file(dir + "/gap.csv",
               "date,tmax_c,tmin_c,wind_ms,precip_mm,is_holiday\n"
               "2017-01-01,24.1,13.0,3.2,0.0,0\n"
               "2017-01-04,20.0,12.0,2.0,1.5,0\n");
    CHECK_THROWS_WITH_AS(ingest_covariates(dir + "/gap.csv"),
                         doctest::Contains("2017-01-02 2017-01-03"), Error);
}

TEST_CASE("slice semantics") {
    DailySeries s;
    s.key = {Ward::Surgery, Complexity::Major};
    s.start = {2017, 1, 1};
    std::mt19937 gen(7);
    for (int i = 0; i < 1826; ++i) s.counts.push_back(gen() % 10);

    SUBCASE("full-range slice is the identity") {
        auto full = slice(s, s.start, s.last_date());
        CHECK(full.counts == s.counts);
        CHECK(full.key == s.key);
    }
    SUBCASE("length-1 slice") {
        auto one = slice(s, {2017, 3, 5}, {2017, 3, 5});
        CHECK(one.counts.size() == 1);
        CHECK(one.counts[0] == s.at({2017, 3, 5}));
    }
    SUBCASE("last 180 days of an 1826-day series") {
        auto tail = slice(s, s.last_date().plus_days(-179), s.last_date());
        CHECK(tail.counts.size() == 180);
        CHECK(tail.counts.back() == s.counts.back());
    }
    SUBCASE("out of range") {
        CHECK_THROWS_AS(slice(s, {2016, 12, 31}, {2017, 1, 5}), Error);
    }
    SUBCASE("nested slices compose") {
        std::mt19937 rng(3);
        for (int rep = 0; rep < 50; ++rep) {
            std::int64_t a = rng() % 1000, b = a + rng() % 800;
            std::int64_t c = a + rng() % (b - a + 1), d = c + rng() % (b - c + 1);
            auto outer = slice(s, s.start.plus_days(a), s.start.plus_days(b));
            auto inner = slice(outer, s.start.plus_days(c), s.start.plus_days(d));
            auto direct = slice(s, s.start.plus_days(c), s.start.plus_days(d));
            CHECK(inner.counts == direct.counts);
            CHECK(inner.start == direct.start);
        }
    }
}

TEST_CASE("dataset dump round-trips bit-exactly") {
    auto dir = temp_dir("roundtrip");
    write_file(dir + "/adm.csv",
               "date,ward,complexity,count\n"
               "2017-01-01,surgery,major,2\n"
               "2017-01-02,psychiatry,other,4\n"
               "2017-01-03,neurology,major,1\n");
    auto ds = ingest_admissions(dir + "/adm.csv").dataset;
    emit_dataset(ds, dir + "/dump");
    auto back = load_dataset(dir + "/dump");
    REQUIRE(back.series.size() == ds.series.size());
    for (const auto& [key, s] : ds.series) {
        CHECK(back.get(key).counts == s.counts);
        CHECK(back.get(key).start == s.start);
    }
    back.check_aggregation_identities();

    // emitting again produces byte-identical files
    emit_dataset(back, dir + "/dump2");
    for (const auto& entry : fs::directory_iterator(dir + "/dump")) {
        auto name = entry.path().filename().string();
        if (entry.path().extension() != ".csv") continue;
        CHECK(read_text_file(entry.path().string()) ==
              read_text_file(dir + "/dump2/" + name));
    }
}

TEST_CASE("aggregation check is scoped for derived-before-imputation series") {
    Dataset ds;
    for (Ward w : kBaseWards)
        for (Complexity c : {Complexity::Major, Complexity::Other}) {
            DailySeries s;
            s.key = {w, c};
            s.start = {2017, 1, 1};
            s.counts = {1, 1, 1, 1, 1};
            ds.series[s.key] = s;
        }
    ds.derive_aggregates(/*mark_derived_before_imputation=*/true);
    set_anomaly_window(ds, {{2017, 1, 2}, {2017, 1, 3}});
    // perturb one base series inside the window only
    ds.series[{Ward::Surgery, Complexity::Major}].counts[1] = 9;
    CHECK_NOTHROW(ds.check_aggregation_identities());
    // outside the window the identity is enforced
    ds.series[{Ward::Surgery, Complexity::Major}].counts[0] = 9;
    CHECK_THROWS_AS(ds.check_aggregation_identities(), Error);
}
