#include "synthgen/synthgen.hpp"

#include <filesystem>

#include "core/csv.hpp"
#include "core/ingest.hpp"
#include "util/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace edf::synthgen {

GeneratorConfig GeneratorConfig::defaults() {
    GeneratorConfig cfg;
    cfg.ward_means = {
        {Ward::EmergencyMedicine, {2.35, 12.82}},
        {Ward::GeneralMedicine, {5.92, 5.38}},
        {Ward::Surgery, {2.58, 7.52}},
        {Ward::Paediatric, {0.85, 2.46}},
        {Ward::Psychiatry, {0.66, 2.17}},
        {Ward::Cardiology, {0.78, 1.75}},
        {Ward::Neurology, {0.24, 0.45}},
        {Ward::Other, {3.00, 4.83}},
    };
    // mild Monday peak, suppressed weekend; exact mean 1
    cfg.weekly_profile = {1.15, 1.05, 1.00, 1.00, 0.98, 0.90, 0.92};
    cfg.holidays = {{1, 1}, {1, 26}, {4, 25}, {12, 25}, {12, 26}};
    return cfg;
}

void GeneratorConfig::validate() const {
    if (n_days < 28) fail_config("n_days must be >= 28 (insufficient for windowing)");
    for (Ward w : kBaseWards) {
        auto it = ward_means.find(w);
        if (it == ward_means.end()) fail_config("missing ward_means for " + edf::to_string(w));
        if (it->second.major_mean <= 0 || it->second.other_mean <= 0)
            fail_config("ward means must be > 0 for " + edf::to_string(w));
    }
    double sum = 0;
    for (double f : weekly_profile) {
        if (f <= 0) fail_config("weekly_profile factors must be > 0");
        sum += f;
    }
    if (std::fabs(sum / 7.0 - 1.0) > 1e-9) fail_config("weekly_profile must average to 1");
    if (dispersion < 0) fail_config("dispersion must be >= 0");
    if (anomaly && (anomaly->depth <= 0 || anomaly->depth > 1))
        fail_config("anomaly depth must lie in (0, 1]");
}

void to_json(json& j, const GeneratorConfig& cfg) {
    j = json::object();
    j["start"] = cfg.start.to_string();
    j["n_days"] = cfg.n_days;
    json means = json::object();
    for (const auto& [w, m] : cfg.ward_means)
        means[edf::to_string(w)] = {{"major_mean", m.major_mean}, {"other_mean", m.other_mean}};
    j["ward_means"] = means;
    j["weekly_profile"] = cfg.weekly_profile;
    j["annual_amplitude"] = cfg.annual_amplitude;
    j["annual_phase"] = cfg.annual_phase;
    j["holiday_effect"] = cfg.holiday_effect;
    j["weather_coeffs"] = {{"tmax", cfg.weather_coeffs.tmax},
                           {"tmin", cfg.weather_coeffs.tmin},
                           {"wind_mean", cfg.weather_coeffs.wind_mean},
                           {"precip_total", cfg.weather_coeffs.precip_total}};
    if (cfg.anomaly)
        j["anomaly"] = {{"start", cfg.anomaly->window.start.to_string()},
                        {"end", cfg.anomaly->window.end.to_string()},
                        {"depth", cfg.anomaly->depth}};
    j["dispersion"] = cfg.dispersion;
    j["seed"] = cfg.seed;
    json hol = json::array();
    for (auto [m, d] : cfg.holidays) hol.push_back({{"month", m}, {"day", d}});
    j["holidays"] = hol;
}

void from_json(const json& j, GeneratorConfig& cfg) {
    cfg = GeneratorConfig::defaults();
    if (j.contains("start")) cfg.start = CalendarDate::parse(j.at("start").get<std::string>());
    if (j.contains("n_days")) cfg.n_days = j.at("n_days").get<int>();
    if (j.contains("ward_means")) {
        cfg.ward_means.clear();
        for (const auto& [label, m] : j.at("ward_means").items())
            cfg.ward_means[parse_ward(label)] = {m.at("major_mean").get<double>(),
                                                 m.at("other_mean").get<double>()};
    }
    if (j.contains("weekly_profile")) cfg.weekly_profile = j.at("weekly_profile");
    if (j.contains("annual_amplitude")) cfg.annual_amplitude = j.at("annual_amplitude");
    if (j.contains("annual_phase")) cfg.annual_phase = j.at("annual_phase");
    if (j.contains("holiday_effect")) cfg.holiday_effect = j.at("holiday_effect");
    if (j.contains("weather_coeffs")) {
        const auto& w = j.at("weather_coeffs");
        cfg.weather_coeffs = {w.value("tmax", 0.0), w.value("tmin", 0.0),
                              w.value("wind_mean", 0.0), w.value("precip_total", 0.0)};
    }
    if (j.contains("anomaly") && !j.at("anomaly").is_null()) {
        const auto& a = j.at("anomaly");
        cfg.anomaly = AnomalySpec{{CalendarDate::parse(a.at("start").get<std::string>()),
                                   CalendarDate::parse(a.at("end").get<std::string>())},
                                  a.at("depth").get<double>()};
    } else if (j.contains("anomaly")) {
        cfg.anomaly.reset();
    }
    if (j.contains("dispersion")) cfg.dispersion = j.at("dispersion");
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("holidays")) {
        cfg.holidays.clear();
        for (const auto& h : j.at("holidays"))
            cfg.holidays.emplace_back(h.at("month").get<int>(), h.at("day").get<int>());
    }
}

namespace {

CovariateTable simulate_weather(const GeneratorConfig& cfg) {
    CovariateTable cov;
    cov.start = cfg.start;
    Rng rng = Rng::substream(cfg.seed, 1000);  // stream id reserved for weather
    // warm-in-January annual cycle
    const double weather_phase = M_PI / 2 - 2 * M_PI * 15.0 / 365.25;
    for (int i = 0; i < cfg.n_days; ++i) {
        CalendarDate d = cfg.start.plus_days(i);
        double season = std::sin(2 * M_PI * d.day_of_year() / 365.25 + weather_phase);
        CovariateRecord r;
        r.tmax = 17.0 + 8.0 * season + rng.normal(0, 2.0);
        r.tmin = r.tmax - 6.0 - std::fabs(rng.normal(0, 2.0));
        r.wind_mean = std::exp(rng.normal(std::log(3.0), 0.3));
        r.precip_total = std::exp(rng.normal(std::log(1.5), 1.0));
        bool holiday = false;
        for (auto [m, day] : cfg.holidays)
            if (d.month == m && d.day == day) holiday = true;
        r.is_holiday = holiday;
        cov.records.push_back(r);
    }
    cov.validate();
    return cov;
}

}  // namespace

SyntheticTruth generate(const GeneratorConfig& cfg) {
    cfg.validate();
    SyntheticTruth truth;
    truth.realized.covariates = simulate_weather(cfg);
    const CovariateTable& cov = truth.realized.covariates;

    std::uint64_t stream = 0;
    for (Ward w : kBaseWards) {
        for (Complexity c : {Complexity::Major, Complexity::Other}) {
            SeriesKey key{w, c};
            double mean = c == Complexity::Major ? cfg.ward_means.at(w).major_mean
                                                 : cfg.ward_means.at(w).other_mean;
            Rng rng = Rng::substream(cfg.seed, stream++);
            DailySeries s;
            s.key = key;
            s.start = cfg.start;
            std::vector<double> rates;
            rates.reserve(static_cast<size_t>(cfg.n_days));
            for (int i = 0; i < cfg.n_days; ++i) {
                CalendarDate d = cfg.start.plus_days(i);
                const CovariateRecord& r = cov.records[static_cast<size_t>(i)];
                double rate = mean * cfg.weekly_profile[static_cast<size_t>(d.day_of_week())];
                rate *= 1.0 + cfg.annual_amplitude *
                                  std::sin(2 * M_PI * d.day_of_year() / 365.25 + cfg.annual_phase);
                if (r.is_holiday) rate *= cfg.holiday_effect;
                rate *= std::exp(cfg.weather_coeffs.tmax * r.tmax +
                                 cfg.weather_coeffs.tmin * r.tmin +
                                 cfg.weather_coeffs.wind_mean * r.wind_mean +
                                 cfg.weather_coeffs.precip_total * r.precip_total);
                if (cfg.anomaly && cfg.anomaly->window.contains(d))
                    rate *= 1.0 - cfg.anomaly->depth;
                rates.push_back(rate);
                s.counts.push_back(rng.neg_binomial(rate, cfg.dispersion));
            }
            if (cfg.anomaly) s.anomaly_window = cfg.anomaly->window;
            truth.rates[key] = std::move(rates);
            truth.realized.series[key] = std::move(s);
        }
    }
    truth.realized.derive_aggregates();
    if (cfg.anomaly)
        for (auto& [key, s] : truth.realized.series) s.anomaly_window = cfg.anomaly->window;
    return truth;
}

void emit(const SyntheticTruth& truth, const GeneratorConfig& cfg, const std::string& dir) {
    emit_dataset(truth.realized, dir);
    json manifest;
    manifest["kind"] = "synthetic_dataset";
    to_json(manifest["config"], cfg);
    manifest["seed"] = cfg.seed;
    manifest["n_series"] = truth.realized.series.size();
    write_text_file(dir + "/manifest.json", manifest.dump(2) + "\n");
}

GeneratorConfig load_manifest(const std::string& path) {
    json j = json::parse(read_text_file(path));
    GeneratorConfig cfg;
    from_json(j.at("config"), cfg);
    return cfg;
}

}  // namespace edf::synthgen
