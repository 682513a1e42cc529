#pragma once

#include "config.hpp"

namespace ncl::cli {

inline constexpr const char* kSchemaVersion = "1.0";

// each returns the process exit code: 0 ok, 1 asserted check failed
int cmd_verify(const RunConfig& c);
int cmd_spectrum(const RunConfig& c);
int cmd_solve(const RunConfig& c);
int cmd_metric(const RunConfig& c);

}  // namespace ncl::cli
