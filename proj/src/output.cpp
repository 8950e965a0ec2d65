#include "conicflow/output.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "conicflow/config.hpp"

namespace conicflow {

const char* kVersion = "0.1.0";

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw NumericalError("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw NumericalError("short write to " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string provenance_comment(const std::string& command, const RunConfig& cfg) {
    std::ostringstream os;
    os << "# conicflow " << kVersion << "\n";
    os << "# command: " << command << "\n";
    os << "# config:\n";
    for (auto& line : cfg.raw_lines()) os << "# | " << line << "\n";
    return os.str();
}

int thread_count() {
    const char* env = std::getenv("CONICFLOW_THREADS");
    if (!env || !*env) return 1;
    long n = std::strtol(env, nullptr, 10);
    if (n < 1) n = 1;
    if (n > 64) n = 64;
    return int(n);
}

}  // namespace conicflow
