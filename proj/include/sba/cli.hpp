#pragma once

// Operator entry point. Exit codes are stable: 0 success, 2 configuration
// problem, 3 trace problem, 4 endpoint bind failure.

#include <string>
#include <vector>

#include "sba/nwdaf.hpp"

namespace sba::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitTrace = 3;
inline constexpr int kExitBind = 4;

/// Analytics thresholds with NWDAF_* environment overrides applied
/// (NWDAF_SPIKE_SIGMA, NWDAF_STEADY_FRACTION, NWDAF_PERIOD_CV_MAX,
/// NWDAF_BUCKET_WIDTH_S, NWDAF_PLACEMENT_LOW_BPS, NWDAF_PLACEMENT_HIGH_BPS,
/// NWDAF_BURST_RATIO).
nwdaf::AnalyticsOptions options_from_env();

/// Full argument-vector entry point (argv[0] excluded).
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace sba::cli
