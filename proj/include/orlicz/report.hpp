#pragma once

#include <algorithm>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

namespace orlicz {

/// Outcome of one sampled inequality check.  `min_margin` is the worst
/// (smallest) relative margin seen; the check passes when it stays above
/// -tolerance and no precondition failed.
struct margin_report {
    std::string name;
    long long samples = 0;
    double min_margin = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string argmin;  // human-readable location of the minimizing sample
    std::string note;    // precondition failures, resample counts, flags
};

inline std::string format_double(double v, int precision = 17) {
    std::ostringstream os;
    os << std::setprecision(precision) << v;
    return os.str();
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

/// CSV table of margin reports, sorted by name for byte-stable output.
inline std::string margins_to_csv(std::vector<margin_report> reports) {
    std::sort(reports.begin(), reports.end(),
              [](const margin_report& a, const margin_report& b) { return a.name < b.name; });
    std::ostringstream os;
    os << "check,samples,min_margin,tolerance,pass,argmin,note\n";
    for (const auto& r : reports) {
        os << csv_escape(r.name) << ',' << r.samples << ',' << format_double(r.min_margin) << ','
           << format_double(r.tolerance) << ',' << (r.pass ? "1" : "0") << ','
           << csv_escape(r.argmin) << ',' << csv_escape(r.note) << '\n';
    }
    return os.str();
}

/// One computed quantity against its bound.
struct quantity_row {
    std::string name;
    double computed = 0.0;
    double bound = 0.0;
    double margin = 0.0;
};

inline std::string quantities_to_csv(std::vector<quantity_row> rows) {
    std::sort(rows.begin(), rows.end(),
              [](const quantity_row& a, const quantity_row& b) { return a.name < b.name; });
    std::ostringstream os;
    os << "quantity,computed,bound,margin\n";
    for (const auto& r : rows)
        os << csv_escape(r.name) << ',' << format_double(r.computed) << ','
           << format_double(r.bound) << ',' << format_double(r.margin) << '\n';
    return os.str();
}

}  // namespace orlicz
