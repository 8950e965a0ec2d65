#ifndef CONICFLOW_CONFIG_HPP
#define CONICFLOW_CONFIG_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "conicflow/metric.hpp"

namespace conicflow {

// Flat sectioned key = value configuration.  Scalars are typed on read; arrays
// are bracketed comma lists: w = [2, 1].
class RunConfig {
public:
    static RunConfig parse_file(const std::string& path);
    static RunConfig parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& section, const std::string& key) const;

    double get_real(const std::string& section, const std::string& key) const;
    double get_real_or(const std::string& section, const std::string& key, double fallback) const;
    long get_int(const std::string& section, const std::string& key) const;
    long get_int_or(const std::string& section, const std::string& key, long fallback) const;
    std::string get_string(const std::string& section, const std::string& key) const;
    std::string get_string_or(const std::string& section, const std::string& key,
                              const std::string& fallback) const;
    Vec get_vec(const std::string& section, const std::string& key) const;
    Vec get_vec_or(const std::string& section, const std::string& key, const Vec& fallback) const;

    // Rejects any key not consumed by one of the getters above.
    void check_unknown_keys() const;

    const std::vector<std::string>& raw_lines() const { return raw_lines_; }
    uint64_t seed() const;
    std::string output_dir() const;

    // Builds the metric (with optional potential) from the [metric] section.
    ScatteringMetric build_metric() const;

private:
    struct Entry {
        std::string value;
        mutable bool used = false;
    };
    std::map<std::string, std::map<std::string, Entry>> sections_;
    std::vector<std::string> raw_lines_;
    std::string origin_;

    const Entry* find(const std::string& section, const std::string& key) const;
    const Entry& require(const std::string& section, const std::string& key) const;
};

}  // namespace conicflow

#endif
