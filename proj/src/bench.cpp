#include "statbridge/bench.hpp"

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <random>

#include "statbridge/errors.hpp"
#include "statbridge/guest/parser.hpp"

namespace statbridge::bench {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

constexpr std::uint64_t kMaxCells = 1u << 28;  // 256M doubles, 2 GB

void check_dims(std::size_t n, std::size_t m) {
  if (n < 1 || m < 1) fail("bench dimensions must be at least 1");
  if (static_cast<std::uint64_t>(n) * m > kMaxCells)
    fail("dimensions too large: " + std::to_string(n) + "x" + std::to_string(m));
}

}  // namespace

const std::string& xqx_kernel_source() {
  static const std::string src =
      "function XQX(Q, X)\n"
      "  N, M = size(X);\n"
      "  retval = zeros(N);\n"
      "  for i in 1:N\n"
      "    for j in 1:M\n"
      "      for k in 1:M\n"
      "        retval[i] += X[i,j] * Q[j,k] * X[i,k]\n"
      "      end\n"
      "    end\n"
      "  end;\n"
      "  return retval\n"
      "end\n";
  return src;
}

std::vector<double> xqx_oracle(const std::vector<double>& x_colmajor, std::size_t n,
                               std::size_t m, const std::vector<double>& q_colmajor) {
  using Eigen::MatrixXd;
  Eigen::Map<const MatrixXd> x(x_colmajor.data(), n, m);
  Eigen::Map<const MatrixXd> q(q_colmajor.data(), m, m);
  Eigen::VectorXd rowsum = ((x * q).cwiseProduct(x)).rowwise().sum();
  return std::vector<double>(rowsum.data(), rowsum.data() + n);
}

void build_normal_dataset(Workspace& ws, std::size_t n, std::size_t m, std::uint64_t seed) {
  check_dims(n, m);
  ws.clear_dataset();
  ws.set_obs(n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t c = 1; c <= m; ++c) {
    const std::string name = "x" + std::to_string(c);
    ws.create_variable(name, StorageType::SDouble);
    Variable& var = ws.dataset().var(ws.dataset().index_of(name));
    for (std::size_t i = 0; i < n; ++i) var.set_double(i, normal(rng));
  }
}

XqxReport bench_xqx(Workspace& ws, guest::Scope& scope, GateSession& gate, std::size_t n,
                    std::size_t m, std::uint64_t seed) {
  check_dims(n, m);
  build_normal_dataset(ws, n, m, seed);

  // Symmetric Q: uniform draws, lower triangle mirrored up.
  std::mt19937_64 rng(seed + 1);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  HostMatrix q;
  q.rows = q.cols = m;
  q.cells.assign(m * m, 0.0);
  for (std::size_t c = 1; c <= m; ++c)
    for (std::size_t r = c; r <= m; ++r) {
      const double v = uniform(rng);
      q.at(r, c) = v;
      q.at(c, r) = v;
    }
  ws.set_matrix("Q", q);

  // Stage the guest inputs: Q from the host matrix, X from the dataset.
  guest::evaluate(guest::parse(xqx_kernel_source()), scope, &gate);
  std::string stage = "Q = st_matrix(\"Q\");\nX = st_data(\"x\" .* string.(1:" +
                      std::to_string(m) + "));\n";
  guest::evaluate(guest::parse(stage), scope, &gate);

  XqxReport rep;
  rep.n = n;
  rep.m = m;

  auto t0 = Clock::now();
  guest::EvalResult run = guest::evaluate(guest::parse("y = XQX(Q, X);"), scope, &gate);
  rep.guest_secs = seconds_since(t0);

  std::vector<double> x_cells(n * m);
  for (std::size_t c = 0; c < m; ++c) {
    const Variable& var = ws.dataset().var(c + 1);
    for (std::size_t i = 0; i < n; ++i) x_cells[c * n + i] = var.as_double(i);
  }
  t0 = Clock::now();
  const std::vector<double> expected = xqx_oracle(x_cells, n, m, q.cells);
  rep.oracle_secs = seconds_since(t0);

  const auto* y = std::get_if<guest::VecPtr>(&run.value.v);
  if (!y) fail("guest kernel did not return a vector");
  if ((*y)->size() != n) fail("guest kernel returned the wrong length");
  for (std::size_t i = 0; i < n; ++i) {
    const double g = (**y)[i].as_number();
    const double rel = std::fabs(g - expected[i]) / std::max(1.0, std::fabs(expected[i]));
    rep.max_rel_diff = std::max(rep.max_rel_diff, rel);
  }
  return rep;
}

bridge::TransferReport bench_copy(Workspace& ws, guest::Scope& scope, std::size_t n,
                                  std::size_t m, std::uint64_t seed,
                                  const bridge::CopyOptions& opts) {
  check_dims(n, m);
  build_normal_dataset(ws, n, m, seed);
  std::vector<std::string> varlist;
  for (std::size_t c = 1; c <= m; ++c) varlist.push_back("x" + std::to_string(c));
  return bridge::put_vars_to_df(ws, scope, varlist, SampleRestriction::All(), opts);
}

}  // namespace statbridge::bench
