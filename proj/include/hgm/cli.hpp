#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hgm/fraction.hpp"
#include "hgm/trace.hpp"

namespace hgm {

enum class OutputFormat { Jsonl, Csv };

struct RunConfig {
    std::string alpha, beta;
    Fraction z;
    std::uint64_t limit = 0;
    std::optional<int> precision;
    std::string output;  // empty: stdout
    OutputFormat format = OutputFormat::Jsonl;
    std::string cache_dir;  // empty: default_cache_dir()
    bool no_cache = false;
    // number of good primes to recheck with the oracle; nullopt means all
    std::optional<std::uint64_t> oracle_check = 0;
    int threads = 0;
    bool phase_timings = false;
};

// Exit codes of run().
enum ExitCode : int { kOk = 0, kUsage = 2, kOracleMismatch = 3, kRuntime = 4 };

std::string csv_header();
std::string emit_record(const TraceResult& r, OutputFormat f);

// Parses the command line; prints help or errors to err and returns the exit code
// through `code` when the program should stop.
std::optional<RunConfig> parse_command_line(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
                                            int& code);

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

int cli_main(int argc, const char* const* argv);

}  // namespace hgm
