#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace diskperc {

/// Flat key-value experiment description. Values are kept as text so that
/// write/parse round-trips exactly; numeric setters print 17 significant digits.
struct ExperimentConfig {
    std::string experiment;
    std::uint64_t seed = 1;
    int workers = 0;
    std::string output;
    std::map<std::string, std::string> params;

    void set(const std::string& key, const std::string& value) { params[key] = value; }
    void set(const std::string& key, double value);
    void set(const std::string& key, const std::vector<double>& values);

    bool has(const std::string& key) const { return params.count(key) != 0; }
    std::string text(const std::string& key, const std::string& fallback) const;
    double number(const std::string& key, double fallback) const;
    std::int64_t integer(const std::string& key, std::int64_t fallback) const;
    std::vector<double> list(const std::string& key, const std::vector<double>& fallback) const;

    /// "key = value" lines; '#' starts a comment.
    std::string to_text() const;
    static ExperimentConfig parse(std::string_view text);
    static ExperimentConfig load(const std::string& path);

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

struct ResultRow {
    std::string experiment;
    std::string parameters;   // "k=v;k=v", keys sorted
    std::string statistic;
    double value = 0.0;
    double stderr_value = 0.0;  // NaN when not applicable
    std::uint64_t seed = 0;
    double wall_time = 0.0;   // seconds
};

inline constexpr std::string_view kResultSchema = "diskperc-results v1";

/// CSV with a leading "# diskperc-results v1" comment and a column header.
/// Wall time is a column only when `timing` is set, so that default output is
/// a pure function of the configuration.
void write_csv(std::ostream& os, const std::vector<ResultRow>& rows, bool timing = false);
std::string to_csv(const std::vector<ResultRow>& rows, bool timing = false);
std::string format_number(double x);

/// Runs the named experiment. Throws std::invalid_argument for unknown names
/// and forwards parameter-range errors from the modules.
std::vector<ResultRow> run(const ExperimentConfig& config);
std::vector<std::string> experiment_names();

}  // namespace diskperc
