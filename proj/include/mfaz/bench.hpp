#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mfaz/server.hpp"

namespace mfaz {

struct PhaseStats {
    double median_us = 0;
    double p95_us = 0;
    double mean_us = 0;
};

/// Seven-phase timing decomposition of the grant-side (generation) and
/// check-side (verification) work, plus the storage figures for the default
/// filter parameters. Timings use the monotonic clock; absolute values are
/// hardware-specific, the decomposition shape is the point.
struct BenchReport {
    std::uint64_t runs = 0;
    std::map<std::string, PhaseStats> phases;
    std::uint64_t bf_bytes = 0;
    std::uint64_t header_bytes = 0;
    std::uint64_t bitarray_bytes = 0;
    std::uint64_t raw_vp_bytes_equivalent = 0;  // 32 bytes per planned entry
};

inline constexpr std::array<const char*, 7> kBenchPhases = {
    "vp_computation",     "vp_insertion",        "bf_store_to_ledger",
    "vp_generation_total", "bf_fetch_from_ledger", "vp_checking",
    "vp_verification_total"};

BenchReport run_bench(std::uint64_t runs = 50, const ServerConfig& config = {});

std::string format_bench_report(const BenchReport& report);
/// Stable single-line records for scripts: bench.phase / bench.storage.
std::string machine_bench_report(const BenchReport& report);

/// Loads n_members random VPs into a default filter and probes n_probes
/// non-members; returns the observed false-positive fraction.
double run_fpr_probe(std::uint64_t n_members = 1000,
                     std::uint64_t n_probes = 10000,
                     std::uint64_t seed = 1,
                     const ServerConfig& config = {});

struct CheckConstancy {
    double median_low_us = 0;   // few entries stored
    double median_high_us = 0;  // near capacity
    double ratio = 0;
};

/// Optional parallel-clients mode: N in-process client threads each running
/// a grant chain against one server, exercising the serialized filter-write
/// path under contention.
struct ParallelReport {
    std::uint64_t grants = 0;
    std::uint64_t denies = 0;
    std::uint64_t errors = 0;
};

ParallelReport run_parallel_grants(std::uint32_t clients,
                                   std::uint32_t requests_each,
                                   const ServerConfig& config = {});

/// Membership-check latency at 10 vs 900 stored entries; the filter promises
/// Θ(k) probes per check regardless of load.
CheckConstancy run_check_constancy(std::uint64_t probes_per_side = 2000,
                                   std::uint64_t seed = 7);

}  // namespace mfaz
