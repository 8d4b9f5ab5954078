#include "statbridge/bridge.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <mutex>
#include <set>
#include <thread>

#include "statbridge/errors.hpp"

namespace statbridge::bridge {

using guest::BaseType;
using guest::Column;
using guest::ColumnType;
using guest::DataFrame;
using guest::DfPtr;
using guest::Matrix;
using guest::Value;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Columns are independent work units; per-column work stays sequential, so
// output is bit-identical no matter the worker count.
void for_each_column(std::size_t ncols, unsigned threads, const std::function<void(std::size_t)>& fn) {
  const unsigned workers = std::min<unsigned>(std::max(1u, threads),
                                              static_cast<unsigned>(std::max<std::size_t>(ncols, 1)));
  if (workers <= 1 || ncols <= 1) {
    for (std::size_t c = 0; c < ncols; ++c) fn(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mu;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t c = next.fetch_add(1); c < ncols; c = next.fetch_add(1)) {
        try {
          fn(c);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::uint64_t guest_column_bytes(const Column& col) {
  std::size_t width = 0;
  switch (col.type.base) {
    case BaseType::I8: width = 1; break;
    case BaseType::I16: width = 2; break;
    case BaseType::I32: width = 4; break;
    case BaseType::I64: width = 8; break;
    case BaseType::F32: width = 4; break;
    case BaseType::F64: width = 8; break;
    case BaseType::Categorical: width = 4; break;
    case BaseType::Str: {
      std::uint64_t total = 0;
      for (const auto& s : std::get<std::vector<std::string>>(col.data)) total += s.size();
      return total;
    }
  }
  return static_cast<std::uint64_t>(width) * col.size();
}

DfPtr require_frame(guest::Scope& scope, const std::string& name) {
  auto it = scope.globals.find(name);
  if (it == scope.globals.end()) fail("no guest DataFrame named " + name);
  auto* df = std::get_if<DfPtr>(&it->second.v);
  if (!df) fail(name + " is not a DataFrame");
  return *df;
}

guest::MatPtr require_matrix(guest::Scope& scope, const std::string& name) {
  auto it = scope.globals.find(name);
  if (it == scope.globals.end()) fail("no guest matrix named " + name);
  auto* m = std::get_if<guest::MatPtr>(&it->second.v);
  if (!m) fail(name + " is not a matrix");
  return *m;
}

std::string dest_name(const CopyOptions& opts) {
  return opts.destination.empty() ? "df" : opts.destination;
}

std::string source_name(const CopyOptions& opts) {
  return opts.source.empty() ? "df" : opts.source;
}

std::vector<std::size_t> resolve_varlist(const Workspace& ws,
                                         const std::vector<std::string>& varlist) {
  std::vector<std::size_t> idx;
  for (const auto& name : varlist) {
    const std::size_t i = ws.dataset().index_of(name);
    if (i == 0) fail("variable not found: " + name);
    idx.push_back(i);
  }
  if (idx.empty()) fail("empty varlist");
  return idx;
}

// Level table for a labeled integer column: every mapped code in code
// order, then any observed unmapped codes, rendered in decimal.
struct LevelTable {
  std::vector<std::string> levels;
  std::map<std::int64_t, std::int32_t> code_to_level;
};

LevelTable build_levels(const Workspace& ws, const Variable& var,
                        const std::vector<std::size_t>& selected) {
  LevelTable t;
  const ValueLabelTable& table = ws.label_table(var.label_table());
  for (const auto& [code, text] : table.labels) {
    t.code_to_level[code] = static_cast<std::int32_t>(t.levels.size() + 1);
    t.levels.push_back(text);
  }
  std::set<std::int64_t> extras;
  for (std::size_t j : selected) {
    if (var.missing_code(j - 1)) continue;
    const std::int64_t code = var.raw_int(j - 1);
    if (!t.code_to_level.count(code)) extras.insert(code);
  }
  for (std::int64_t code : extras) {
    t.code_to_level[code] = static_cast<std::int32_t>(t.levels.size() + 1);
    t.levels.push_back(std::to_string(code));
  }
  return t;
}

template <typename T>
void copy_numeric_raw(const Variable& var, const std::vector<std::size_t>& selected,
                      std::vector<T>& out, std::vector<std::uint8_t>& missing, bool scan_missing) {
  out.resize(selected.size());
  for (std::size_t r = 0; r < selected.size(); ++r) {
    const std::size_t i = selected[r] - 1;
    if (scan_missing && var.missing_code(i)) {
      missing[r] = 1;
      out[r] = T{};
      continue;
    }
    out[r] = static_cast<T>(var.as_double(i));
  }
}

Column convert_column_to_guest(const Workspace& ws, const Variable& var,
                               const std::vector<std::size_t>& selected,
                               const CopyOptions& opts) {
  const bool labeled = !var.label_table().empty() && is_integer(var.stype());
  Column col;
  col.type = opts.doubleonly && is_numeric(var.stype())
                 ? ColumnType{BaseType::F64, true}
                 : map_host_to_guest(var.stype(), labeled, opts.nolabel);
  col.missing.assign(selected.size(), 0);
  const bool scan = !opts.nomissing;

  switch (col.type.base) {
    case BaseType::I8: {
      std::vector<std::int8_t> data;
      copy_numeric_raw(var, selected, data, col.missing, scan);
      col.data = std::move(data);
      break;
    }
    case BaseType::I16: {
      std::vector<std::int16_t> data;
      copy_numeric_raw(var, selected, data, col.missing, scan);
      col.data = std::move(data);
      break;
    }
    case BaseType::I32: {
      std::vector<std::int32_t> data;
      copy_numeric_raw(var, selected, data, col.missing, scan);
      col.data = std::move(data);
      break;
    }
    case BaseType::F32: {
      std::vector<float> data;
      copy_numeric_raw(var, selected, data, col.missing, scan);
      col.data = std::move(data);
      break;
    }
    case BaseType::F64: {
      std::vector<double> data(selected.size());
      for (std::size_t r = 0; r < selected.size(); ++r) {
        const std::size_t i = selected[r] - 1;
        if (scan && var.missing_code(i)) {
          col.missing[r] = 1;
          data[r] = 0.0;
          continue;
        }
        // Cells pass through the double-precision transport either way;
        // with nomissing, sentinel bit patterns ride along as data.
        data[r] = load_cell_as_double(var, i);
      }
      col.data = std::move(data);
      break;
    }
    case BaseType::Categorical: {
      const LevelTable levels = build_levels(ws, var, selected);
      col.levels = levels.levels;
      std::vector<std::int32_t> data(selected.size(), 0);
      for (std::size_t r = 0; r < selected.size(); ++r) {
        const std::size_t i = selected[r] - 1;
        if (scan && var.missing_code(i)) {
          col.missing[r] = 1;
          data[r] = 0;
          continue;
        }
        data[r] = levels.code_to_level.at(var.raw_int(i));
      }
      col.data = std::move(data);
      break;
    }
    case BaseType::Str: {
      std::vector<std::string> data(selected.size());
      for (std::size_t r = 0; r < selected.size(); ++r) {
        const StrCell& cell = var.str_cell(selected[r] - 1);
        data[r] = cell.bytes;
        // Host "" is the string missing; the guest tells them apart.
        if (scan && cell.bytes.empty()) col.missing[r] = 1;
      }
      col.data = std::move(data);
      break;
    }
    case BaseType::I64: fail("host columns never map to I64");
  }
  return col;
}

double guest_cell_to_double(const Column& col, std::size_t i) {
  return col.number_at(i);
}

// Write one guest column into a host variable at the selected observations.
void write_column_to_host(Workspace& ws, const Column& col, const std::string& varname,
                          const std::vector<std::size_t>& selected, bool nomissing) {
  Variable& var = ws.dataset().var(ws.dataset().index_of(varname));
  const std::size_t rows = col.size();
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t i = selected[r] - 1;
    if (!nomissing && col.is_missing(r)) {
      if (is_string(var.stype())) var.set_str(i, "");
      else var.set_missing(i, 0);
      continue;
    }
    switch (col.type.base) {
      case BaseType::Str: var.set_str(i, std::get<std::vector<std::string>>(col.data)[r]); break;
      case BaseType::Categorical:
        store_cell_from_double(var, i, std::get<std::vector<std::int32_t>>(col.data)[r]);
        break;
      default: store_cell_from_double(var, i, guest_cell_to_double(col, r)); break;
    }
  }
  ws.mark_dirty();
}

std::optional<double> column_max_abs_finite(const Column& col) {
  if (col.type.base != BaseType::F32) return std::nullopt;
  double max_abs = 0;
  const auto& data = std::get<std::vector<float>>(col.data);
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (col.is_missing(i)) continue;
    if (std::isfinite(data[i])) max_abs = std::max(max_abs, std::fabs(double(data[i])));
  }
  return max_abs;
}

// Create (or keep, under replace) the host variable receiving a column.
void ensure_target_variable(Workspace& ws, const std::string& varname, const Column& col,
                            bool replace) {
  const std::size_t existing = ws.dataset().index_of(varname);
  if (existing != 0) {
    if (!replace) fail("variable already exists: " + varname + " (specify replace)");
    return;  // replace writes into the existing variable, keeping its type
  }
  ws.create_variable(varname, map_guest_to_host(col.type.base, column_max_abs_finite(col)));
  if (col.type.base == BaseType::Categorical) {
    std::map<std::int32_t, std::string> labels;
    for (std::size_t k = 0; k < col.levels.size(); ++k)
      labels[static_cast<std::int32_t>(k + 1)] = col.levels[k];
    ws.label_define(varname, std::move(labels));
    ws.label_attach(varname, varname);
  }
}

}  // namespace

std::string TransferReport::path() const {
  if (used_nomissing && used_doubleonly) return "both";
  if (used_nomissing) return "nomissing";
  if (used_doubleonly) return "doubleonly";
  return "default";
}

std::string TransferReport::line() const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "rows=%zu cols=%zu bytes=%llu secs=%.6f path=%s", rows, cols,
                static_cast<unsigned long long>(bytes), secs, path().c_str());
  return buf;
}

ColumnType map_host_to_guest(StorageType t, bool labeled, bool nolabel) {
  if (labeled && !nolabel && is_integer(t)) return {BaseType::Categorical, true};
  switch (t) {
    case StorageType::SByte: return {BaseType::I8, true};
    case StorageType::SInt: return {BaseType::I16, true};
    case StorageType::SLong: return {BaseType::I32, true};
    case StorageType::SFloat: return {BaseType::F32, true};
    case StorageType::SDouble: return {BaseType::F64, true};
    case StorageType::SStr:
    case StorageType::SStrL: return {BaseType::Str, true};
  }
  fail("map_host_to_guest: bad storage type");
}

StorageType map_guest_to_host(BaseType base, std::optional<double> max_abs_finite) {
  switch (base) {
    case BaseType::I8: return StorageType::SInt;     // [-128,127] exceeds byte's [-128,100]
    case BaseType::I16: return StorageType::SLong;   // 32767 exceeds int's 32740
    case BaseType::I32: return StorageType::SDouble; // 2^31-1 exceeds long's 2147483620
    case BaseType::I64: return StorageType::SDouble;
    case BaseType::F32:
      return (max_abs_finite && *max_abs_finite <= double(float_valid_max())) ? StorageType::SFloat
                                                                              : StorageType::SDouble;
    case BaseType::F64: return StorageType::SDouble;
    case BaseType::Str: return StorageType::SStr;
    case BaseType::Categorical: return StorageType::SInt;
  }
  fail("map_guest_to_host: bad base type");
}

TransferReport put_vars_to_df(Workspace& ws, guest::Scope& scope,
                              const std::vector<std::string>& varlist,
                              const SampleRestriction& restriction, const CopyOptions& opts) {
  const auto t0 = Clock::now();
  const auto idx = resolve_varlist(ws, varlist);
  restriction.validate(ws.dataset().nobs);
  const auto selected = restriction.selected(ws.dataset().nobs);

  if (!opts.cols.empty() && opts.cols.size() != idx.size())
    fail("cols() must name one column per variable");

  auto df = std::make_shared<DataFrame>();
  df->names.resize(idx.size());
  df->columns.resize(idx.size());
  for (std::size_t c = 0; c < idx.size(); ++c)
    df->names[c] = opts.cols.empty() ? ws.dataset().var(idx[c]).name() : opts.cols[c];

  for_each_column(idx.size(), opts.threads, [&](std::size_t c) {
    df->columns[c] = convert_column_to_guest(ws, ws.dataset().var(idx[c]), selected, opts);
  });

  scope.globals[dest_name(opts)] = Value::frame(df);

  TransferReport rep;
  rep.rows = selected.size();
  rep.cols = idx.size();
  for (const auto& col : df->columns) rep.bytes += guest_column_bytes(col);
  rep.used_nomissing = opts.nomissing;
  rep.used_doubleonly = opts.doubleonly;
  rep.secs = seconds_since(t0);
  return rep;
}

TransferReport get_vars_from_df(Workspace& ws, guest::Scope& scope,
                                const std::vector<std::string>& varlist,
                                const SampleRestriction& restriction, const CopyOptions& opts) {
  const auto t0 = Clock::now();
  DfPtr df = require_frame(scope, source_name(opts));
  if (varlist.empty()) fail("empty varlist");
  const std::vector<std::string>& cols = opts.cols.empty() ? varlist : opts.cols;
  if (cols.size() != varlist.size()) fail("cols() must name one column per variable");

  restriction.validate(ws.dataset().nobs);
  const auto selected = restriction.selected(ws.dataset().nobs);
  if (selected.size() < df->nrows())
    fail("dataset too short: " + std::to_string(selected.size()) + " selected observations for " +
         std::to_string(df->nrows()) + " DataFrame rows");
  const std::vector<std::size_t> targets(selected.begin(),
                                         selected.begin() + static_cast<std::ptrdiff_t>(df->nrows()));

  TransferReport rep;
  rep.rows = df->nrows();
  rep.cols = varlist.size();
  for (std::size_t k = 0; k < varlist.size(); ++k) {
    const std::size_t ci = df->index_of(cols[k]);
    if (ci == 0) fail("no column named " + cols[k] + " in DataFrame " + source_name(opts));
    const Column& col = df->columns[ci - 1];
    ensure_target_variable(ws, varlist[k], col, opts.replace);
    write_column_to_host(ws, col, varlist[k], targets, opts.nomissing);
    const Variable& var = ws.dataset().var(ws.dataset().index_of(varlist[k]));
    if (is_string(var.stype())) {
      for (std::size_t r = 0; r < rep.rows; ++r) rep.bytes += var.str_cell(targets[r] - 1).bytes.size();
    } else {
      rep.bytes += cell_width(var.stype()) * rep.rows;
    }
  }
  rep.used_nomissing = opts.nomissing;
  rep.secs = seconds_since(t0);
  return rep;
}

TransferReport put_vars_to_mat(Workspace& ws, guest::Scope& scope,
                               const std::vector<std::string>& varlist,
                               const SampleRestriction& restriction, const CopyOptions& opts) {
  const auto t0 = Clock::now();
  const auto idx = resolve_varlist(ws, varlist);
  restriction.validate(ws.dataset().nobs);
  const auto selected = restriction.selected(ws.dataset().nobs);

  for (std::size_t i : idx)
    if (is_string(ws.dataset().var(i).stype()))
      fail(ws.dataset().var(i).name() + " is a string variable");

  auto m = std::make_shared<Matrix>(Matrix::zeros(selected.size(), idx.size()));
  for_each_column(idx.size(), opts.threads, [&](std::size_t c) {
    const Variable& var = ws.dataset().var(idx[c]);
    for (std::size_t r = 0; r < selected.size(); ++r)
      m->at(r, c) = load_cell_as_double(var, selected[r] - 1);  // sentinels pass through
  });

  scope.globals[dest_name(opts)] = Value::matrix(m);

  TransferReport rep;
  rep.rows = selected.size();
  rep.cols = idx.size();
  rep.bytes = static_cast<std::uint64_t>(8) * rep.rows * rep.cols;
  rep.secs = seconds_since(t0);
  return rep;
}

TransferReport get_vars_from_mat(Workspace& ws, guest::Scope& scope,
                                 const std::vector<std::string>& varlist,
                                 const SampleRestriction& restriction, const CopyOptions& opts) {
  const auto t0 = Clock::now();
  guest::MatPtr m = require_matrix(scope, source_name(opts));
  if (m->cols != varlist.size())
    fail("matrix has " + std::to_string(m->cols) + " columns for " +
         std::to_string(varlist.size()) + " variables");
  restriction.validate(ws.dataset().nobs);
  const auto selected = restriction.selected(ws.dataset().nobs);
  if (selected.size() < m->rows)
    fail("dataset too short: " + std::to_string(selected.size()) + " selected observations for " +
         std::to_string(m->rows) + " matrix rows");

  for (std::size_t k = 0; k < varlist.size(); ++k) {
    const std::size_t existing = ws.dataset().index_of(varlist[k]);
    if (existing != 0) {
      if (!opts.replace) fail("variable already exists: " + varlist[k] + " (specify replace)");
      if (is_string(ws.dataset().var(existing).stype()))
        fail(varlist[k] + " is a string variable");
    } else {
      ws.create_variable(varlist[k], StorageType::SDouble);
    }
    Variable& var = ws.dataset().var(ws.dataset().index_of(varlist[k]));
    for (std::size_t r = 0; r < m->rows; ++r)
      store_cell_from_double(var, selected[r] - 1, m->at(r, k));
  }
  ws.mark_dirty();

  TransferReport rep;
  rep.rows = m->rows;
  rep.cols = m->cols;
  for (std::size_t k = 0; k < varlist.size(); ++k)
    rep.bytes += cell_width(ws.dataset().var(ws.dataset().index_of(varlist[k])).stype()) * rep.rows;
  rep.secs = seconds_since(t0);
  return rep;
}

TransferReport put_mat_to_mat(Workspace& ws, guest::Scope& scope, const std::string& host_name,
                              const CopyOptions& opts) {
  const auto t0 = Clock::now();
  const HostMatrix& src = ws.matrix(host_name);
  auto m = std::make_shared<Matrix>(Matrix::zeros(src.rows, src.cols));
  m->cells = src.cells;
  scope.globals[dest_name(opts)] = Value::matrix(m);

  TransferReport rep;
  rep.rows = src.rows;
  rep.cols = src.cols;
  rep.bytes = static_cast<std::uint64_t>(8) * rep.rows * rep.cols;
  rep.secs = seconds_since(t0);
  return rep;
}

TransferReport get_mat_from_mat(Workspace& ws, guest::Scope& scope, const std::string& host_name,
                                const CopyOptions& opts) {
  const auto t0 = Clock::now();
  guest::MatPtr m = require_matrix(scope, source_name(opts));
  // Creation is legal here: the command starts on the host side.
  HostMatrix host;
  host.rows = m->rows;
  host.cols = m->cols;
  host.cells = m->cells;
  ws.set_matrix(host_name, std::move(host));

  TransferReport rep;
  rep.rows = m->rows;
  rep.cols = m->cols;
  rep.bytes = static_cast<std::uint64_t>(8) * rep.rows * rep.cols;
  rep.secs = seconds_since(t0);
  return rep;
}

TransferReport save_df(Workspace& ws, guest::Scope& scope, const std::string& dfname,
                       const CopyOptions& opts) {
  if (ws.dataset().nvar() == 0 || ws.dataset().nobs == 0) fail("dataset is empty");
  std::vector<std::string> all;
  for (const auto& v : ws.dataset().variables) all.push_back(v.name());
  CopyOptions o = opts;
  o.destination = dfname.empty() ? "df" : dfname;
  return put_vars_to_df(ws, scope, all, SampleRestriction::All(), o);
}

TransferReport use_df(Workspace& ws, guest::Scope& scope, const std::string& dfname,
                      const std::vector<std::string>& varlist, const CopyOptions& opts) {
  const auto t0 = Clock::now();
  DfPtr df = require_frame(scope, dfname);
  if (ws.dataset_dirty() && !opts.clear) fail("data in memory would be lost");

  std::vector<std::size_t> cols;
  if (varlist.empty()) {
    for (std::size_t c = 0; c < df->ncols(); ++c) cols.push_back(c);
  } else {
    for (const auto& name : varlist) {
      const std::size_t ci = df->index_of(name);
      if (ci == 0) fail("no column named " + name + " in DataFrame " + dfname);
      cols.push_back(ci - 1);
    }
  }

  Dataset ds;
  ds.nobs = df->nrows();
  Workspace staging;  // builds variables + label tables, then swapped in
  staging.set_obs(ds.nobs);
  for (std::size_t c : cols) {
    const Column& col = df->columns[c];
    ensure_target_variable(staging, df->names[c], col, /*replace=*/false);
  }
  std::vector<std::size_t> all_rows;
  for (std::size_t j = 1; j <= ds.nobs; ++j) all_rows.push_back(j);
  for (std::size_t k = 0; k < cols.size(); ++k)
    write_column_to_host(staging, df->columns[cols[k]], df->names[cols[k]], all_rows,
                         opts.nomissing);

  TransferReport rep;
  rep.rows = ds.nobs;
  rep.cols = cols.size();
  for (const auto& var : staging.dataset().variables) {
    if (is_string(var.stype())) {
      for (std::size_t i = 0; i < ds.nobs; ++i) rep.bytes += var.str_cell(i).bytes.size();
    } else {
      rep.bytes += cell_width(var.stype()) * ds.nobs;
    }
  }

  for (const auto& [name, table] : staging.label_tables())
    ws.label_define(name, table.labels);
  ws.replace_dataset(std::move(staging.dataset()));
  // replace_dataset clears the dirty flag: the dataset now mirrors the frame.

  rep.secs = seconds_since(t0);
  return rep;
}

}  // namespace statbridge::bridge
