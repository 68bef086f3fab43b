#pragma once

#include <string>
#include <vector>

#include "core/dataset.hpp"

namespace edf {

struct IngestResult {
    Dataset dataset;
    std::vector<std::string> diagnostics;  // per-row rejections
};

/// Admissions CSV: header `date,ward,complexity[,count]`, one row per
/// admission or one row per (date, key) count. Missing days inside the
/// observed range become zero-admission days; aggregates are materialized.
IngestResult ingest_admissions(const std::string& path);

/// Covariates CSV: header `date,tmax_c,tmin_c,wind_ms,precip_mm,is_holiday`.
CovariateTable ingest_covariates(const std::string& path);

/// Canonical dataset dump: one `<ward>_<complexity>.csv` per series with
/// `date,count`, plus `covariates.csv`.
void emit_dataset(const Dataset& dataset, const std::string& dir);
Dataset load_dataset(const std::string& dir);

void set_anomaly_window(Dataset& dataset, const DateInterval& window);

}  // namespace edf
