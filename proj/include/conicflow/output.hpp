#ifndef CONICFLOW_OUTPUT_HPP
#define CONICFLOW_OUTPUT_HPP

#include <string>
#include <vector>

namespace conicflow {

class RunConfig;

// 17 significant digits so every double round-trips exactly.
std::string fmt17(double x);

// temp file + rename; an interrupted run never leaves a partial artifact
void write_file_atomic(const std::string& path, const std::string& content);

// leading comment block for CSV artifacts: version, command, config echo
std::string provenance_comment(const std::string& command, const RunConfig& cfg);

int thread_count();  // CONICFLOW_THREADS, clamped to [1, 64]

extern const char* kVersion;

}  // namespace conicflow

#endif
