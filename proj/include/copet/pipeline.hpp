#pragma once

#include <string>
#include <vector>

#include "copet/config.hpp"

namespace copet {

// Pipeline stage drivers behind the CLI subcommands. Each stage writes its
// artifacts plus a manifest (config hash, input hashes, version) under
// <output_dir>/<stage>/, so identical config+inputs yield byte-identical
// outputs. Stages throw IoError / std::runtime_error on failure; the CLI
// maps those to exit 1.
void run_synth(const RunConfig& config);
void run_ingest(const RunConfig& config);
void run_project(const RunConfig& config);
void run_communities(const RunConfig& config);
void run_pagerank(const RunConfig& config);
void run_stats(const RunConfig& config);
void run_regress(const RunConfig& config);
void run_report(const RunConfig& config);
void run_pipeline(const RunConfig& config); // ingest..report in order

// One run per output directory; throws if another run holds the lock.
class RunLock {
public:
    explicit RunLock(const std::string& output_dir);
    ~RunLock();
    RunLock(const RunLock&) = delete;
    RunLock& operator=(const RunLock&) = delete;

private:
    std::string path_;
};

extern const char* kVersion;

} // namespace copet
