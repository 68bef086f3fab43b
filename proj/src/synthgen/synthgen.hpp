#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "core/dataset.hpp"

namespace edf::synthgen {

struct WardMeans {
    double major_mean = 1.0;  // admissions/day
    double other_mean = 1.0;
};

struct AnomalySpec {
    DateInterval window;
    double depth = 0.5;  // rate multiplied by (1 - depth) inside the window
};

struct WeatherCoeffs {
    // linear effects on the log-rate
    double tmax = 0, tmin = 0, wind_mean = 0, precip_total = 0;
};

struct GeneratorConfig {
    CalendarDate start{2017, 1, 1};
    int n_days = 1826;
    std::map<Ward, WardMeans> ward_means;          // the 8 base wards
    std::array<double, 7> weekly_profile;          // multiplicative, mean 1
    double annual_amplitude = 0.10;                // fraction
    double annual_phase = -M_PI / 2;               // mid-year (southern winter) peak
    double holiday_effect = 0.90;                  // multiplicative
    WeatherCoeffs weather_coeffs;
    std::optional<AnomalySpec> anomaly;
    double dispersion = 0.0;                       // 0 = Poisson
    std::uint64_t seed = 1;
    std::vector<std::pair<int, int>> holidays;     // (month, day), every year

    /// Table 1 calibrated defaults.
    static GeneratorConfig defaults();

    void validate() const;
};

void to_json(nlohmann::json& j, const GeneratorConfig& cfg);
void from_json(const nlohmann::json& j, GeneratorConfig& cfg);

struct SyntheticTruth {
    /// Latent per-day rate for each of the 16 base series.
    std::map<SeriesKey, std::vector<double>> rates;
    Dataset realized;
};

/// Deterministic given (config, seed): counts drawn per base series from
/// per-series RNG substreams, aggregates derived by summation, weather and
/// holidays simulated.
SyntheticTruth generate(const GeneratorConfig& config);

/// Canonical per-series CSVs + covariates CSV + JSON manifest with the full
/// config. Re-running with the same config yields byte-identical files.
void emit(const SyntheticTruth& truth, const GeneratorConfig& config, const std::string& dir);

GeneratorConfig load_manifest(const std::string& path);

}  // namespace edf::synthgen
