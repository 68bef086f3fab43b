#include "core/dataset.hpp"

namespace edf {

const DailySeries& Dataset::get(const SeriesKey& key) const {
    auto it = series.find(key);
    if (it == series.end()) fail_data("dataset has no series " + key.to_string());
    return it->second;
}

void Dataset::derive_aggregates(bool mark_derived_before_imputation) {
    if (series.empty()) return;
    check_alignment();

    auto sum_into = [&](const SeriesKey& out_key, const std::vector<SeriesKey>& parts) {
        DailySeries out;
        out.key = out_key;
        bool first = true;
        for (const auto& pk : parts) {
            const DailySeries& p = get(pk);
            if (first) {
                out.start = p.start;
                out.counts.assign(p.counts.size(), 0);
                out.anomaly_window = p.anomaly_window;
                first = false;
            }
            for (size_t i = 0; i < p.counts.size(); ++i) out.counts[i] += p.counts[i];
        }
        out.derived_before_imputation = mark_derived_before_imputation;
        series[out_key] = std::move(out);
    };

    for (Ward w : kBaseWards)
        sum_into(SeriesKey{w, Complexity::All},
                 {SeriesKey{w, Complexity::Major}, SeriesKey{w, Complexity::Other}});
    for (Complexity c : {Complexity::Major, Complexity::Other, Complexity::All}) {
        std::vector<SeriesKey> parts;
        for (Ward w : kBaseWards) parts.push_back(SeriesKey{w, c});
        sum_into(SeriesKey{Ward::TotalAllWards, c}, parts);
    }
}

void Dataset::check_aggregation_identities() const {
    auto check_sum = [&](const SeriesKey& agg_key, const std::vector<SeriesKey>& parts) {
        const DailySeries& agg = get(agg_key);
        for (size_t i = 0; i < agg.counts.size(); ++i) {
            CalendarDate d = agg.start.plus_days(static_cast<std::int64_t>(i));
            if (agg.derived_before_imputation && agg.anomaly_window &&
                agg.anomaly_window->contains(d))
                continue;
            std::int64_t sum = 0;
            for (const auto& pk : parts) sum += get(pk).counts[i];
            if (sum != agg.counts[i])
                fail_data("aggregation identity broken for " + agg_key.to_string() + " at " +
                          d.to_string());
        }
    };

    for (Ward w : kBaseWards)
        check_sum(SeriesKey{w, Complexity::All},
                  {SeriesKey{w, Complexity::Major}, SeriesKey{w, Complexity::Other}});
    for (Complexity c : {Complexity::Major, Complexity::Other, Complexity::All}) {
        std::vector<SeriesKey> parts;
        for (Ward w : kBaseWards) parts.push_back(SeriesKey{w, c});
        check_sum(SeriesKey{Ward::TotalAllWards, c}, parts);
    }
}

void Dataset::check_alignment() const {
    const DailySeries* ref = nullptr;
    for (const auto& [key, s] : series) {
        s.validate();
        if (!ref) {
            ref = &s;
            continue;
        }
        if (s.start != ref->start || s.counts.size() != ref->counts.size())
            fail_data("series " + key.to_string() + " does not share the common date range");
    }
}

}  // namespace edf
