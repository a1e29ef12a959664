// sweep.hpp — Parameter sweeps: config grammar, worker pool and run records
//
// Config grammar (one `key = value` per line, `#` starts a comment):
//
//     kind      = mem, post
//     r         = 0.05, 0.1          | logspace(a, b, n) | linspace(a, b, n)
//     gamma0    = ...                (with gamma; instead of r)
//     gamma     = ...
//     n         = 0.5, 1, 10
//     tau_end   = 20
//     points    = 200
//     analyses  = measure, rates, choi, divisibility, positivity
//     format    = csv | json
//     seed      = 42
//     budget    = 1000
//     positivity_samples = 1000
//     divisibility_grid  = 200
//     workers   = 4                  (0: hardware concurrency)
//
// logspace takes decimal exponents. The same keys are accepted as a JSON object,
// with numbers, arrays, or strings in the grammar above as values.

#pragma once

#include "memkernel/map_engine.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace memkernel::cli {

inline constexpr const char* kAnalyses[] = {"measure", "rates", "choi", "divisibility", "positivity"};

struct SweepConfig {
    std::vector<EquationKind> kinds{EquationKind::MemoryKernel};
    std::vector<double> r;
    std::vector<double> gamma0;
    std::vector<double> gamma;
    std::vector<double> n{0.0};
    double tau_end{20.0};
    std::size_t points{200};
    std::vector<std::string> analyses;
    std::string format{"csv"};
    std::uint64_t seed{0x5eed2010u};
    std::size_t budget{1000};
    std::size_t positivity_samples{1000};
    std::size_t divisibility_grid{200};
    std::size_t workers{0};

    // Throws std::invalid_argument on violated invariants.
    void validate() const;
    nlohmann::json echo() const;
};

struct SweepPoint {
    std::size_t index;
    EquationKind kind;
    MapParams params;
};

// Throws std::invalid_argument with the offending line or key.
SweepConfig parse_sweep_config(const std::string& text);
SweepConfig load_sweep_config(const std::filesystem::path& path);

std::vector<SweepPoint> expand(const SweepConfig& cfg);

struct SweepSummary {
    std::size_t points{0};
    std::size_t failures{0};
    std::vector<std::filesystem::path> files;
    double wall_seconds{0.0};
};

// Writes one table per analysis plus run_record.json into out_dir.
SweepSummary run_sweep(const SweepConfig& cfg, const std::filesystem::path& out_dir,
                       const std::string& version);

} // namespace memkernel::cli
