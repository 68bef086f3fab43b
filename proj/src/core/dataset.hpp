#pragma once

#include <map>
#include <optional>

#include "core/covariates.hpp"
#include "core/series.hpp"

namespace edf {

/// The 16 base (ward, complexity) series plus derived aggregates, together
/// with the shared covariate table. Immutable after assembly.
struct Dataset {
    std::map<SeriesKey, DailySeries> series;
    CovariateTable covariates;

    const DailySeries& get(const SeriesKey& key) const;
    bool has(const SeriesKey& key) const { return series.count(key) > 0; }

    /// Materializes (w, All) and (TotalAllWards, c) aggregates from the base
    /// series by elementwise summation, replacing any existing aggregates.
    void derive_aggregates(bool mark_derived_before_imputation = false);

    /// Checks the aggregation identities elementwise. Dates inside the anomaly
    /// window are skipped for series flagged derived_before_imputation.
    void check_aggregation_identities() const;

    /// Common date range checks: all series share identical [start, end].
    void check_alignment() const;
};

}  // namespace edf
