#include "core/ingest.hpp"

#include <filesystem>
#include <map>

#include "core/csv.hpp"

namespace fs = std::filesystem;

namespace edf {

IngestResult ingest_admissions(const std::string& path) {
    CsvTable t = read_csv(path);
    int date_col = t.require_column("date", path);
    int ward_col = t.require_column("ward", path);
    int cplx_col = t.require_column("complexity", path);
    int count_col = t.column("count");
    if (t.rows.empty()) fail_data("no rows in " + path);

    IngestResult result;
    std::map<SeriesKey, std::map<std::int64_t, std::int64_t>> counts;
    std::int64_t min_day = 0, max_day = 0;
    bool any = false;

    for (size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        CalendarDate date;
        try {
            date = CalendarDate::parse(row[static_cast<size_t>(date_col)]);
        } catch (const Error& e) {
            result.diagnostics.push_back(path + ":" + std::to_string(r + 2) + ": rejected row: " +
                                         e.what());
            continue;
        }
        Ward ward = parse_ward(row[static_cast<size_t>(ward_col)]);
        Complexity cplx = parse_complexity(row[static_cast<size_t>(cplx_col)]);
        if (ward == Ward::TotalAllWards || cplx == Complexity::All)
            fail_data(path + ":" + std::to_string(r + 2) +
                      ": aggregate labels cannot be ingested directly");
        std::int64_t n = 1;
        if (count_col >= 0) {
            try {
                n = std::stoll(row[static_cast<size_t>(count_col)]);
            } catch (...) {
                fail_data(path + ":" + std::to_string(r + 2) + ": bad count value");
            }
            if (n < 0) fail_data(path + ":" + std::to_string(r + 2) + ": negative count");
        }
        counts[SeriesKey{ward, cplx}][date.serial()] += n;
        std::int64_t s = date.serial();
        if (!any) {
            min_day = max_day = s;
            any = true;
        } else {
            min_day = std::min(min_day, s);
            max_day = std::max(max_day, s);
        }
    }
    if (!any) fail_data("no rows in " + path);

    size_t n_days = static_cast<size_t>(max_day - min_day + 1);
    for (Ward w : kBaseWards) {
        for (Complexity c : {Complexity::Major, Complexity::Other}) {
            SeriesKey key{w, c};
            DailySeries s;
            s.key = key;
            s.start = CalendarDate::from_serial(min_day);
            s.counts.assign(n_days, 0);
            auto it = counts.find(key);
            if (it != counts.end())
                for (const auto& [day, n] : it->second)
                    s.counts[static_cast<size_t>(day - min_day)] = n;
            result.dataset.series[key] = std::move(s);
        }
    }
    result.dataset.derive_aggregates();
    return result;
}

CovariateTable ingest_covariates(const std::string& path) {
    CsvTable t = read_csv(path);
    int date_col = t.require_column("date", path);
    int tmax_col = t.require_column("tmax_c", path);
    int tmin_col = t.require_column("tmin_c", path);
    int wind_col = t.require_column("wind_ms", path);
    int precip_col = t.require_column("precip_mm", path);
    int hol_col = t.require_column("is_holiday", path);

    std::map<std::int64_t, CovariateRecord> by_day;
    for (size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        CalendarDate date = CalendarDate::parse(row[static_cast<size_t>(date_col)]);
        if (by_day.count(date.serial()))
            fail_data(path + ": duplicate covariate date " + date.to_string());
        CovariateRecord rec;
        rec.tmax = std::stod(row[static_cast<size_t>(tmax_col)]);
        rec.tmin = std::stod(row[static_cast<size_t>(tmin_col)]);
        rec.wind_mean = std::stod(row[static_cast<size_t>(wind_col)]);
        rec.precip_total = std::stod(row[static_cast<size_t>(precip_col)]);
        const std::string& h = row[static_cast<size_t>(hol_col)];
        if (h != "0" && h != "1") fail_data(path + ": is_holiday must be 0 or 1, got '" + h + "'");
        rec.is_holiday = h == "1";
        if (rec.tmax < rec.tmin) fail_data("tmax < tmin at " + date.to_string());
        by_day[date.serial()] = rec;
    }
    if (by_day.empty()) fail_data("no rows in " + path);

    CovariateTable table;
    table.start = CalendarDate::from_serial(by_day.begin()->first);
    std::int64_t expect = by_day.begin()->first;
    std::string missing;
    for (const auto& [day, rec] : by_day) {
        while (expect < day) {
            missing += (missing.empty() ? "" : " ") + CalendarDate::from_serial(expect).to_string();
            ++expect;
        }
        table.records.push_back(rec);
        ++expect;
    }
    if (!missing.empty()) fail_data(path + ": missing covariate dates: " + missing);
    table.validate();
    return table;
}

void emit_dataset(const Dataset& dataset, const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir)) fail_io("cannot create directory " + dir);

    for (const auto& [key, s] : dataset.series) {
        CsvTable t;
        t.header = {"date", "count"};
        for (size_t i = 0; i < s.counts.size(); ++i)
            t.rows.push_back({s.start.plus_days(static_cast<std::int64_t>(i)).to_string(),
                              std::to_string(s.counts[i])});
        write_csv(dir + "/" + key.to_string() + ".csv", t);
    }
    if (!dataset.covariates.records.empty()) {
        CsvTable t;
        t.header = {"date", "tmax_c", "tmin_c", "wind_ms", "precip_mm", "is_holiday"};
        const auto& cov = dataset.covariates;
        for (size_t i = 0; i < cov.records.size(); ++i) {
            const auto& r = cov.records[i];
            t.rows.push_back({cov.start.plus_days(static_cast<std::int64_t>(i)).to_string(),
                              format_double(r.tmax), format_double(r.tmin),
                              format_double(r.wind_mean), format_double(r.precip_total),
                              r.is_holiday ? "1" : "0"});
        }
        write_csv(dir + "/covariates.csv", t);
    }
}

Dataset load_dataset(const std::string& dir) {
    if (!fs::is_directory(dir)) fail_io("no such dataset directory: " + dir);
    Dataset out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() != ".csv") continue;
        std::string stem = entry.path().stem().string();
        if (stem == "covariates") {
            out.covariates = ingest_covariates(entry.path().string());
            continue;
        }
        SeriesKey key;
        try {
            key = SeriesKey::parse(stem);
        } catch (const Error&) {
            continue;  // unrelated csv
        }
        CsvTable t = read_csv(entry.path().string());
        int date_col = t.require_column("date", stem);
        int count_col = t.require_column("count", stem);
        DailySeries s;
        s.key = key;
        for (size_t r = 0; r < t.rows.size(); ++r) {
            CalendarDate d = CalendarDate::parse(t.rows[r][static_cast<size_t>(date_col)]);
            if (r == 0) s.start = d;
            else if (d.serial() != s.start.serial() + static_cast<std::int64_t>(r))
                fail_data(stem + ".csv: dates are not consecutive at row " + std::to_string(r + 2));
            s.counts.push_back(std::stoll(t.rows[r][static_cast<size_t>(count_col)]));
        }
        s.validate();
        out.series[key] = std::move(s);
    }
    if (out.series.empty()) fail_data("no series files found in " + dir);
    out.check_alignment();
    return out;
}

void set_anomaly_window(Dataset& dataset, const DateInterval& window) {
    for (auto& [key, s] : dataset.series) {
        s.anomaly_window = window;
        s.validate();
    }
}

}  // namespace edf
