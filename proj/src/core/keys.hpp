#pragma once

#include <array>
#include <compare>
#include <string>
#include <vector>

namespace edf {

enum class Ward {
    EmergencyMedicine,
    GeneralMedicine,
    Surgery,
    Paediatric,
    Psychiatry,
    Cardiology,
    Neurology,
    Other,
    TotalAllWards,  // derived aggregate, never ingested directly
};

enum class Complexity {
    Major,
    Other,
    All,  // derived: Major + Other
};

inline constexpr std::array<Ward, 8> kBaseWards = {
    Ward::EmergencyMedicine, Ward::GeneralMedicine, Ward::Surgery,
    Ward::Paediatric,        Ward::Psychiatry,      Ward::Cardiology,
    Ward::Neurology,         Ward::Other,
};

inline constexpr std::array<Ward, 9> kAllWards = {
    Ward::EmergencyMedicine, Ward::GeneralMedicine, Ward::Surgery,
    Ward::Paediatric,        Ward::Psychiatry,      Ward::Cardiology,
    Ward::Neurology,         Ward::Other,           Ward::TotalAllWards,
};

std::string to_string(Ward w);
std::string to_string(Complexity c);

/// Case-insensitive, trimmed lookup with an alias table ("ed" -> Emergency
/// Medicine etc.). Extra aliases can be appended from config.
Ward parse_ward(const std::string& label);
Complexity parse_complexity(const std::string& label);
void add_ward_alias(const std::string& alias, Ward w);
std::vector<std::string> valid_ward_labels();

struct SeriesKey {
    Ward ward = Ward::EmergencyMedicine;
    Complexity complexity = Complexity::All;

    std::string to_string() const;          // "surgery_major"
    static SeriesKey parse(const std::string& s);

    friend bool operator==(const SeriesKey&, const SeriesKey&) = default;
    friend auto operator<=>(const SeriesKey&, const SeriesKey&) = default;
};

}  // namespace edf
