#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "statbridge/workspace.hpp"

namespace statbridge {

// Which observations a gate-mediated access may touch. Indices are always
// against the full dataset; the restriction is checked, not re-numbered.
struct SampleRestriction {
  enum class Mode { all, in_range, mask };
  Mode mode = Mode::all;
  std::size_t first = 1, last = 0;   // in_range, 1-based inclusive
  std::vector<char> mask;            // mask, length nobs

  static SampleRestriction All() { return {}; }
  static SampleRestriction InRange(std::size_t first, std::size_t last);
  static SampleRestriction Mask(std::vector<char> mask);

  bool selects(std::size_t j) const;              // 1-based
  std::vector<std::size_t> selected(std::size_t nobs) const;
  std::size_t count(std::size_t nobs) const;
  void validate(std::size_t nobs) const;
};

enum class MacroNamespace { local, global };

// Where gate output lands: (is_error, text) pairs in arrival order.
using OutputSink = std::function<void(bool is_error, const std::string& text)>;

// One gate invocation: the only path by which guest code touches the host.
// It can edit existing variables and matrices and create scalars and
// macros, but it exposes nothing that creates a variable or a matrix.
// All local-macro writes land in the frame that was on top of the stack
// when the session was constructed.
class GateSession {
 public:
  GateSession(Workspace& ws, OutputSink sink = {});

  void set_restriction(SampleRestriction r);
  const SampleRestriction& restriction() const { return restriction_; }

  // Numeric cells, double-precision only. Get surfaces host missing flavor
  // k as the SDouble ladder value for k; set preserves exact ladder values
  // and coerces out-of-range or non-integral input to generic missing.
  double cell_get(std::size_t j, std::size_t i);               // 1-based obs, var
  void cell_set(std::size_t j, std::size_t i, double v);

  std::string str_get(std::size_t j, std::size_t i);
  void str_set(std::size_t j, std::size_t i, const std::string& s);

  // Locals are one-way: save lands in the gate frame, use reads globals
  // only (a local read yields the empty string).
  void macro_save(MacroNamespace ns, const std::string& name, const std::string& value);
  std::string macro_use(MacroNamespace ns, const std::string& name);
  void add_pending_promotion(const std::string& name);

  void scalar_save(const std::string& name, double v);  // create-or-replace
  double scalar_use(const std::string& name);

  std::size_t mat_rows(const std::string& name);
  std::size_t mat_cols(const std::string& name);
  double mat_el(const std::string& name, std::size_t i, std::size_t j);
  void mat_store(const std::string& name, std::size_t i, std::size_t j, double v);

  std::size_t nobs() const;
  std::size_t nvar() const;
  bool var_is_string(std::size_t i) const;
  bool var_is_strl(std::size_t i) const;
  bool var_is_binary(std::size_t j, std::size_t i);
  std::size_t sdatalen(std::size_t j, std::size_t i);
  std::size_t varindex(const std::string& name) const;  // 1-based; error if unknown

  double missval() const { return encode_missing_double(0); }
  bool is_missing(double v) const { return v >= double_missing_base(); }

  void display(const std::string& s);
  void display_error(const std::string& s);

  std::size_t conversion_warnings() const { return conversion_warnings_; }
  Workspace& workspace() { return ws_; }
  std::size_t gate_frame_depth() const { return gate_frame_; }

 private:
  Variable& numeric_var(std::size_t j, std::size_t i);
  Variable& string_var(std::size_t j, std::size_t i);
  void check_obs(std::size_t j) const;

  Workspace& ws_;
  OutputSink sink_;
  SampleRestriction restriction_;
  std::size_t gate_frame_;  // 0-based depth of the frame bound to this session
  std::size_t conversion_warnings_ = 0;
};

}  // namespace statbridge
