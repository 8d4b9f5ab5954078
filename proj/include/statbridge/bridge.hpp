#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "statbridge/gate.hpp"
#include "statbridge/guest/interp.hpp"
#include "statbridge/workspace.hpp"

namespace statbridge::bridge {

// Knobs shared by the copy commands. destination/source default to "df";
// cols defaults to the host varlist.
struct CopyOptions {
  bool nolabel = false;
  bool nomissing = false;    // skip the missing scan/translation pass
  bool doubleonly = false;   // leave all numeric columns as F64
  bool replace = false;
  bool clear = false;
  std::string destination;
  std::string source;
  std::vector<std::string> cols;
  unsigned threads = 1;      // column-parallel worker cap
};

struct TransferReport {
  std::size_t rows = 0, cols = 0;
  std::uint64_t bytes = 0;
  double secs = 0;
  bool used_nomissing = false;
  bool used_doubleonly = false;

  std::string path() const;  // "default" | "nomissing" | "doubleonly" | "both"
  std::string line() const;  // "rows=<n> cols=<k> bytes=<b> secs=<t> path=<p>"
};

// Type map, host to guest: width-preserving, labeled integers become
// Categorical unless nolabel.
guest::ColumnType map_host_to_guest(StorageType t, bool labeled, bool nolabel);

// Type map, guest to host: widen whenever the guest valid range exceeds the
// host valid range. F32 needs the column's largest finite magnitude to pick
// between SFloat and SDouble.
StorageType map_guest_to_host(guest::BaseType base, std::optional<double> max_abs_finite = {});

TransferReport put_vars_to_df(Workspace& ws, guest::Scope& scope,
                              const std::vector<std::string>& varlist,
                              const SampleRestriction& restriction, const CopyOptions& opts);

TransferReport get_vars_from_df(Workspace& ws, guest::Scope& scope,
                                const std::vector<std::string>& varlist,
                                const SampleRestriction& restriction, const CopyOptions& opts);

TransferReport put_vars_to_mat(Workspace& ws, guest::Scope& scope,
                               const std::vector<std::string>& varlist,
                               const SampleRestriction& restriction, const CopyOptions& opts);

TransferReport get_vars_from_mat(Workspace& ws, guest::Scope& scope,
                                 const std::vector<std::string>& varlist,
                                 const SampleRestriction& restriction, const CopyOptions& opts);

TransferReport put_mat_to_mat(Workspace& ws, guest::Scope& scope, const std::string& host_name,
                              const CopyOptions& opts);

TransferReport get_mat_from_mat(Workspace& ws, guest::Scope& scope, const std::string& host_name,
                                const CopyOptions& opts);

// jl save: the whole dataset, in order, into a DataFrame (default "df").
TransferReport save_df(Workspace& ws, guest::Scope& scope, const std::string& dfname,
                       const CopyOptions& opts);

// jl use: replace the dataset with a DataFrame's contents. Refuses to drop
// unsaved data unless `clear` is set.
TransferReport use_df(Workspace& ws, guest::Scope& scope, const std::string& dfname,
                      const std::vector<std::string>& varlist, const CopyOptions& opts);

}  // namespace statbridge::bridge
