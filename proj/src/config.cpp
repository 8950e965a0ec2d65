#include "conicflow/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace conicflow {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_real(const std::string& v, const std::string& where) {
    char* end = nullptr;
    double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw DomainError("config: expected a real number for " + where + ", got '" + v + "'");
    return x;
}

long parse_int(const std::string& v, const std::string& where) {
    char* end = nullptr;
    long x = std::strtol(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0')
        throw DomainError("config: expected an integer for " + where + ", got '" + v + "'");
    return x;
}

}  // namespace

RunConfig RunConfig::parse_string(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        cfg.raw_lines_.push_back(line);
        std::string s = trim(line);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw DomainError("config: malformed section header at line " +
                                  std::to_string(lineno));
            section = trim(s.substr(1, s.size() - 2));
            if (section.empty())
                throw DomainError("config: empty section name at line " + std::to_string(lineno));
            cfg.sections_[section];
            continue;
        }
        size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw DomainError("config: expected key = value at line " + std::to_string(lineno));
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (key.empty())
            throw DomainError("config: empty key at line " + std::to_string(lineno));
        if (section.empty())
            throw DomainError("config: key outside any section at line " + std::to_string(lineno));
        auto& sec = cfg.sections_[section];
        if (sec.count(key))
            throw DomainError("config: duplicate key '" + section + "." + key + "'");
        sec[key] = Entry{value, false};
    }
    return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
}

const RunConfig::Entry* RunConfig::find(const std::string& section,
                                        const std::string& key) const {
    auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    k->second.used = true;
    return &k->second;
}

const RunConfig::Entry& RunConfig::require(const std::string& section,
                                           const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) throw DomainError("config: missing required key '" + section + "." + key + "'");
    return *e;
}

bool RunConfig::has(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
}

double RunConfig::get_real(const std::string& s, const std::string& k) const {
    return parse_real(require(s, k).value, s + "." + k);
}
double RunConfig::get_real_or(const std::string& s, const std::string& k, double f) const {
    const Entry* e = find(s, k);
    return e ? parse_real(e->value, s + "." + k) : f;
}
long RunConfig::get_int(const std::string& s, const std::string& k) const {
    return parse_int(require(s, k).value, s + "." + k);
}
long RunConfig::get_int_or(const std::string& s, const std::string& k, long f) const {
    const Entry* e = find(s, k);
    return e ? parse_int(e->value, s + "." + k) : f;
}
std::string RunConfig::get_string(const std::string& s, const std::string& k) const {
    return require(s, k).value;
}
std::string RunConfig::get_string_or(const std::string& s, const std::string& k,
                                     const std::string& f) const {
    const Entry* e = find(s, k);
    return e ? e->value : f;
}

Vec RunConfig::get_vec(const std::string& s, const std::string& k) const {
    std::string v = require(s, k).value;
    if (v.size() < 2 || v.front() != '[' || v.back() != ']')
        throw DomainError("config: expected a bracketed array for " + s + "." + k);
    std::string body = v.substr(1, v.size() - 2);
    std::vector<double> vals;
    std::istringstream in(body);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        vals.push_back(parse_real(tok, s + "." + k));
    }
    if (vals.empty()) throw DomainError("config: empty array for " + s + "." + k);
    Vec out(vals.size());
    for (size_t i = 0; i < vals.size(); ++i) out(i) = vals[i];
    return out;
}
Vec RunConfig::get_vec_or(const std::string& s, const std::string& k, const Vec& f) const {
    return find(s, k) ? get_vec(s, k) : f;
}

void RunConfig::check_unknown_keys() const {
    for (auto& [sec, keys] : sections_)
        for (auto& [key, entry] : keys)
            if (!entry.used)
                throw DomainError("config: unknown key '" + sec + "." + key + "' in " + origin_);
}

uint64_t RunConfig::seed() const {
    return uint64_t(get_int_or("run", "seed", 20260801));
}

std::string RunConfig::output_dir() const {
    const char* env = std::getenv("CONICFLOW_OUTDIR");
    if (env && *env) return env;
    return get_string_or("run", "output_dir", ".");
}

ScatteringMetric RunConfig::build_metric() const {
    std::string family = get_string("metric", "family");
    double x0 = get_real_or("metric", "x0", 0.0);
    ScatteringMetric m = [&] {
        if (family == "euclidean") {
            int dim = int(get_int_or("metric", "dim", 2));
            return ScatteringMetric::euclidean(dim, x0 > 0 ? x0 : 0.5);
        }
        if (family == "conformal_bump") {
            int dim = int(get_int_or("metric", "dim", 2));
            double eps = get_real("metric", "eps");
            double radius = get_real("metric", "bump_radius");
            Vec center = get_vec_or("metric", "bump_center", Vec::Zero(dim));
            return ScatteringMetric::conformal_bump(dim, eps, radius, center, x0);
        }
        if (family == "surface_revolution") {
            double amp = get_real("metric", "amp");
            double r1 = get_real("metric", "r1");
            double r2 = get_real("metric", "r2");
            return ScatteringMetric::surface_revolution(amp, r1, r2, x0);
        }
        throw DomainError("config: unknown metric family '" + family + "'");
    }();
    if (has("metric", "x_interior")) m.set_x_interior(get_real("metric", "x_interior"));
    if (has("potential", "amplitude")) {
        double amp = get_real("potential", "amplitude");
        Vec center = get_vec_or("potential", "center", Vec::Zero(m.dim()));
        double inner = get_real_or("potential", "inner_radius", 0.0);
        double outer = get_real("potential", "outer_radius");
        m.set_bump_potential(amp, center, inner, outer);
    }
    return m;
}

}  // namespace conicflow
