#pragma once

#include <cstdint>
#include <string>

#include "statbridge/bridge.hpp"
#include "statbridge/guest/interp.hpp"
#include "statbridge/workspace.hpp"

namespace statbridge::bench {

struct XqxReport {
  std::size_t n = 0, m = 0;
  double guest_secs = 0;
  double oracle_secs = 0;
  double max_rel_diff = 0;  // against max(1, |oracle|) per row
};

// Guest source of the row-quadratic-form kernel the benchmark times.
const std::string& xqx_kernel_source();

// Row norms under the quadratic form Q: rowsum((X*Q).*X), computed with
// Eigen as the independent check on the guest triple loop.
std::vector<double> xqx_oracle(const std::vector<double>& x_colmajor, std::size_t n,
                               std::size_t m, const std::vector<double>& q_colmajor);

// Rebuilds the dataset as x1..xm standard normal draws plus a symmetric
// m-by-m host matrix Q, copies both to the guest, and times the guest
// kernel against the oracle.
XqxReport bench_xqx(Workspace& ws, guest::Scope& scope, GateSession& gate, std::size_t n,
                    std::size_t m, std::uint64_t seed);

// Rebuilds the dataset as n-by-m doubles and times put_vars_to_df.
bridge::TransferReport bench_copy(Workspace& ws, guest::Scope& scope, std::size_t n,
                                  std::size_t m, std::uint64_t seed,
                                  const bridge::CopyOptions& opts);

// Shared fixture builder: x1..xm standard normal SDouble columns.
void build_normal_dataset(Workspace& ws, std::size_t n, std::size_t m, std::uint64_t seed);

}  // namespace statbridge::bench
