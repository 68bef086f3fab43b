#include "core/keys.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "core/error.hpp"

namespace edf {

namespace {

std::string canon(const std::string& s) {
    std::string out;
    size_t b = s.find_first_not_of(" \t\r\n");
    size_t e = s.find_last_not_of(" \t\r\n");
    if (b == std::string::npos) return out;
    for (size_t i = b; i <= e; ++i) {
        char c = s[i];
        if (c == ' ' || c == '-') c = '_';
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

std::map<std::string, Ward>& ward_aliases() {
    static std::map<std::string, Ward> table = {
        {"emergency_medicine", Ward::EmergencyMedicine},
        {"emergency", Ward::EmergencyMedicine},
        {"ed", Ward::EmergencyMedicine},
        {"general_medicine", Ward::GeneralMedicine},
        {"general", Ward::GeneralMedicine},
        {"surgery", Ward::Surgery},
        {"surgical", Ward::Surgery},
        {"paediatric", Ward::Paediatric},
        {"pediatric", Ward::Paediatric},
        {"paediatrics", Ward::Paediatric},
        {"psychiatry", Ward::Psychiatry},
        {"cardiology", Ward::Cardiology},
        {"neurology", Ward::Neurology},
        {"other", Ward::Other},
        {"total_all_wards", Ward::TotalAllWards},
        {"total", Ward::TotalAllWards},
        {"total_arrivals", Ward::TotalAllWards},
    };
    return table;
}

}  // namespace

std::string to_string(Ward w) {
    switch (w) {
        case Ward::EmergencyMedicine: return "emergency_medicine";
        case Ward::GeneralMedicine: return "general_medicine";
        case Ward::Surgery: return "surgery";
        case Ward::Paediatric: return "paediatric";
        case Ward::Psychiatry: return "psychiatry";
        case Ward::Cardiology: return "cardiology";
        case Ward::Neurology: return "neurology";
        case Ward::Other: return "other";
        case Ward::TotalAllWards: return "total_all_wards";
    }
    return "?";
}

std::string to_string(Complexity c) {
    switch (c) {
        case Complexity::Major: return "major";
        case Complexity::Other: return "other";
        case Complexity::All: return "all";
    }
    return "?";
}

Ward parse_ward(const std::string& label) {
    auto& table = ward_aliases();
    auto it = table.find(canon(label));
    if (it == table.end()) {
        std::string msg = "unknown ward label '" + label + "'; valid labels:";
        for (const auto& s : valid_ward_labels()) msg += " " + s;
        fail_data(msg);
    }
    return it->second;
}

Complexity parse_complexity(const std::string& label) {
    std::string c = canon(label);
    if (c == "major") return Complexity::Major;
    if (c == "other" || c == "minor" || c == "intermediate") return Complexity::Other;
    if (c == "all") return Complexity::All;
    fail_data("unknown complexity label '" + label + "'; valid labels: major other all");
}

void add_ward_alias(const std::string& alias, Ward w) { ward_aliases()[canon(alias)] = w; }

std::vector<std::string> valid_ward_labels() {
    std::vector<std::string> out;
    for (Ward w : kAllWards) out.push_back(to_string(w));
    return out;
}

std::string SeriesKey::to_string() const {
    return edf::to_string(ward) + "_" + edf::to_string(complexity);
}

SeriesKey SeriesKey::parse(const std::string& s) {
    auto pos = s.rfind('_');
    if (pos == std::string::npos) fail_data("bad series key '" + s + "'");
    // complexity is the last underscore-separated token
    return SeriesKey{parse_ward(s.substr(0, pos)), parse_complexity(s.substr(pos + 1))};
}

}  // namespace edf
