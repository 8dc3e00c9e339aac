#pragma once

#include "kdvnudge/config.hpp"

namespace kdv {

extern const char* artifact_version;
extern const char* build_id;

// Run one subcommand, writing CSVs and a manifest into out_dir. Returns the
// process exit code (0 ok, 1 blow-up, 2 non-convergence, 3 infeasible-m,
// 4 config error).
int dispatch(const std::string& subcommand, const RunConfig& cfg, const std::string& out_dir);

// Invariant battery behind the `selftest` subcommand; prints one line per
// check and returns the number of failures.
int selftest(bool verbose = true);

}  // namespace kdv
