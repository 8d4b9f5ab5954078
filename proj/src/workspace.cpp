#include "statbridge/workspace.hpp"

#include <cctype>
#include <cmath>

#include "statbridge/errors.hpp"

namespace statbridge {

namespace {

template <typename T>
std::vector<T> missing_filled(std::size_t n, StorageType t) {
  if constexpr (std::is_same_v<T, StrCell>) {
    (void)t;
    return std::vector<StrCell>(n);
  } else if constexpr (std::is_same_v<T, float>) {
    return std::vector<float>(n, encode_missing_float(0));
  } else if constexpr (std::is_same_v<T, double>) {
    return std::vector<double>(n, encode_missing_double(0));
  } else {
    return std::vector<T>(n, static_cast<T>(encode_missing_int(t, 0)));
  }
}

}  // namespace

Variable::Variable(std::string name, StorageType stype, std::size_t nobs)
    : name_(std::move(name)), stype_(stype) {
  switch (stype) {
    case StorageType::SByte: cells_ = missing_filled<std::int8_t>(nobs, stype); break;
    case StorageType::SInt: cells_ = missing_filled<std::int16_t>(nobs, stype); break;
    case StorageType::SLong: cells_ = missing_filled<std::int32_t>(nobs, stype); break;
    case StorageType::SFloat: cells_ = missing_filled<float>(nobs, stype); break;
    case StorageType::SDouble: cells_ = missing_filled<double>(nobs, stype); break;
    case StorageType::SStr:
    case StorageType::SStrL: cells_ = std::vector<StrCell>(nobs); break;
  }
}

std::size_t Variable::size() const {
  return std::visit([](const auto& v) { return v.size(); }, cells_);
}

void Variable::resize_with_missing(std::size_t n) {
  std::visit(
      [&](auto& v) {
        using T = typename std::decay_t<decltype(v)>::value_type;
        if constexpr (std::is_same_v<T, StrCell>) {
          v.resize(n);
        } else if constexpr (std::is_same_v<T, float>) {
          v.resize(n, encode_missing_float(0));
        } else if constexpr (std::is_same_v<T, double>) {
          v.resize(n, encode_missing_double(0));
        } else {
          v.resize(n, static_cast<T>(encode_missing_int(stype_, 0)));
        }
      },
      cells_);
}

std::optional<int> Variable::missing_code(std::size_t i) const {
  switch (stype_) {
    case StorageType::SByte:
      return decode_missing_int(stype_, std::get<std::vector<std::int8_t>>(cells_)[i]);
    case StorageType::SInt:
      return decode_missing_int(stype_, std::get<std::vector<std::int16_t>>(cells_)[i]);
    case StorageType::SLong:
      return decode_missing_int(stype_, std::get<std::vector<std::int32_t>>(cells_)[i]);
    case StorageType::SFloat:
      return decode_missing_float(std::get<std::vector<float>>(cells_)[i]);
    case StorageType::SDouble:
      return decode_missing_double(std::get<std::vector<double>>(cells_)[i]);
    default:
      fail("missing_code: string variable");
  }
}

double Variable::as_double(std::size_t i) const {
  switch (stype_) {
    case StorageType::SByte: return std::get<std::vector<std::int8_t>>(cells_)[i];
    case StorageType::SInt: return std::get<std::vector<std::int16_t>>(cells_)[i];
    case StorageType::SLong: return std::get<std::vector<std::int32_t>>(cells_)[i];
    case StorageType::SFloat: return std::get<std::vector<float>>(cells_)[i];
    case StorageType::SDouble: return std::get<std::vector<double>>(cells_)[i];
    default: fail("as_double: string variable");
  }
}

void Variable::set_missing(std::size_t i, int code) {
  switch (stype_) {
    case StorageType::SByte:
      std::get<std::vector<std::int8_t>>(cells_)[i] =
          static_cast<std::int8_t>(encode_missing_int(stype_, code));
      break;
    case StorageType::SInt:
      std::get<std::vector<std::int16_t>>(cells_)[i] =
          static_cast<std::int16_t>(encode_missing_int(stype_, code));
      break;
    case StorageType::SLong:
      std::get<std::vector<std::int32_t>>(cells_)[i] =
          static_cast<std::int32_t>(encode_missing_int(stype_, code));
      break;
    case StorageType::SFloat:
      std::get<std::vector<float>>(cells_)[i] = encode_missing_float(code);
      break;
    case StorageType::SDouble:
      std::get<std::vector<double>>(cells_)[i] = encode_missing_double(code);
      break;
    default:
      fail("set_missing: string variable");
  }
}

void Variable::set_integer(std::size_t i, std::int64_t v) {
  switch (stype_) {
    case StorageType::SByte:
      std::get<std::vector<std::int8_t>>(cells_)[i] = static_cast<std::int8_t>(v);
      break;
    case StorageType::SInt:
      std::get<std::vector<std::int16_t>>(cells_)[i] = static_cast<std::int16_t>(v);
      break;
    case StorageType::SLong:
      std::get<std::vector<std::int32_t>>(cells_)[i] = static_cast<std::int32_t>(v);
      break;
    default:
      fail("set_integer: not an integer variable");
  }
}

void Variable::set_float(std::size_t i, float v) {
  std::get<std::vector<float>>(cells_)[i] = v;
}

void Variable::set_double(std::size_t i, double v) {
  std::get<std::vector<double>>(cells_)[i] = v;
}

const StrCell& Variable::str_cell(std::size_t i) const {
  if (!is_string(stype_)) fail("str_cell: numeric variable");
  return std::get<std::vector<StrCell>>(cells_)[i];
}

void Variable::set_str(std::size_t i, std::string bytes, bool binary) {
  if (!is_string(stype_)) fail("set_str: numeric variable");
  auto& cell = std::get<std::vector<StrCell>>(cells_)[i];
  cell.bytes = std::move(bytes);
  cell.binary = stype_ == StorageType::SStrL && binary;
}

std::int64_t Variable::raw_int(std::size_t i) const {
  switch (stype_) {
    case StorageType::SByte: return std::get<std::vector<std::int8_t>>(cells_)[i];
    case StorageType::SInt: return std::get<std::vector<std::int16_t>>(cells_)[i];
    case StorageType::SLong: return std::get<std::vector<std::int32_t>>(cells_)[i];
    default: fail("raw_int: not an integer variable");
  }
}

StoreOutcome store_cell_from_double(Variable& var, std::size_t i, double v) {
  if (auto code = decode_missing_double(v)) {
    // Flavor preserved only for exact ladder values; anything else at or
    // above the base (e.g. +inf) already decoded to flavor 0.
    var.set_missing(i, *code);
    return StoreOutcome::stored_missing;
  }
  switch (var.stype()) {
    case StorageType::SByte:
    case StorageType::SInt:
    case StorageType::SLong: {
      if (!std::isfinite(v) || v != std::floor(v) || v < int_valid_min(var.stype()) ||
          v > int_valid_max(var.stype())) {
        var.set_missing(i, 0);
        return StoreOutcome::coerced_missing;
      }
      var.set_integer(i, static_cast<std::int64_t>(v));
      return StoreOutcome::stored;
    }
    case StorageType::SFloat: {
      if (!std::isfinite(v)) {
        var.set_missing(i, 0);
        return StoreOutcome::coerced_missing;
      }
      // Cast first: a double just below 2^127 may round up into the ladder.
      const float f = static_cast<float>(v);
      if (!(std::fabs(f) <= float_valid_max())) {
        var.set_missing(i, 0);
        return StoreOutcome::coerced_missing;
      }
      var.set_float(i, f);
      return StoreOutcome::stored;
    }
    case StorageType::SDouble: {
      if (!std::isfinite(v)) {
        var.set_missing(i, 0);
        return StoreOutcome::coerced_missing;
      }
      var.set_double(i, v);
      return StoreOutcome::stored;
    }
    default:
      fail("store_cell_from_double: string variable");
  }
}

double load_cell_as_double(const Variable& var, std::size_t i) {
  if (auto code = var.missing_code(i)) return encode_missing_double(*code);
  return var.as_double(i);
}

std::size_t Dataset::index_of(const std::string& name) const {
  for (std::size_t k = 0; k < variables.size(); ++k)
    if (variables[k].name() == name) return k + 1;
  return 0;
}

Variable& Dataset::var(std::size_t index1) {
  if (index1 < 1 || index1 > variables.size()) fail("variable index out of range");
  return variables[index1 - 1];
}

const Variable& Dataset::var(std::size_t index1) const {
  if (index1 < 1 || index1 > variables.size()) fail("variable index out of range");
  return variables[index1 - 1];
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

Workspace::Workspace() { frames_.emplace_back(); }

void Workspace::set_obs(std::size_t n) {
  if (!dataset_.variables.empty() && n < dataset_.nobs) fail("cannot reduce observations");
  dataset_.nobs = n;
  for (auto& v : dataset_.variables) v.resize_with_missing(n);
  dataset_dirty_ = true;
}

void Workspace::create_variable(const std::string& name, StorageType stype) {
  if (!is_identifier(name)) fail("invalid identifier '" + name + "'");
  if (dataset_.index_of(name) != 0) fail("name in use: " + name);
  dataset_.variables.emplace_back(name, stype, dataset_.nobs);
  dataset_dirty_ = true;
}

void Workspace::drop_variable(const std::string& name) {
  const std::size_t idx = dataset_.index_of(name);
  if (idx == 0) fail("variable not found: " + name);
  dataset_.variables.erase(dataset_.variables.begin() + static_cast<std::ptrdiff_t>(idx - 1));
  dataset_dirty_ = true;
}

void Workspace::clear_dataset() {
  dataset_ = Dataset{};
  dataset_dirty_ = false;
}

void Workspace::replace_dataset(Dataset ds) {
  dataset_ = std::move(ds);
  dataset_dirty_ = false;
}

void Workspace::define_matrix(const std::string& name, std::size_t rows, std::size_t cols) {
  if (!is_identifier(name)) fail("invalid identifier '" + name + "'");
  if (rows < 1 || cols < 1) fail("matrix dimensions must be at least 1x1");
  HostMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.cells.assign(rows * cols, encode_missing_double(0));
  matrices_[name] = std::move(m);
}

void Workspace::set_matrix(const std::string& name, HostMatrix m) {
  if (!is_identifier(name)) fail("invalid identifier '" + name + "'");
  if (m.rows < 1 || m.cols < 1 || m.cells.size() != m.rows * m.cols)
    fail("malformed matrix payload");
  matrices_[name] = std::move(m);
}

bool Workspace::has_matrix(const std::string& name) const { return matrices_.count(name) != 0; }

HostMatrix& Workspace::matrix(const std::string& name) {
  auto it = matrices_.find(name);
  if (it == matrices_.end()) fail("matrix not found: " + name);
  return it->second;
}

void Workspace::define_scalar(const std::string& name, double value) {
  if (!is_identifier(name)) fail("invalid identifier '" + name + "'");
  scalars_[name] = value;
}

bool Workspace::has_scalar(const std::string& name) const { return scalars_.count(name) != 0; }

double Workspace::scalar(const std::string& name) const {
  auto it = scalars_.find(name);
  if (it == scalars_.end()) fail("scalar not found: " + name);
  return it->second;
}

void Workspace::label_define(const std::string& table, std::map<std::int32_t, std::string> labels) {
  if (!is_identifier(table)) fail("invalid identifier '" + table + "'");
  for (const auto& [code, text] : labels)
    if (text.empty()) fail("empty label for code " + std::to_string(code));
  label_tables_[table] = ValueLabelTable{table, std::move(labels)};
}

void Workspace::label_attach(const std::string& varname, const std::string& table) {
  const std::size_t idx = dataset_.index_of(varname);
  if (idx == 0) fail("variable not found: " + varname);
  Variable& v = dataset_.var(idx);
  if (!is_integer(v.stype()))
    fail("value labels attach only to integer variables (" + varname + " is " +
         storage_name(v.stype()) + ")");
  if (!has_label_table(table)) fail("label table not found: " + table);
  v.attach_label_table(table);
}

std::string Workspace::label_lookup(const std::string& varname, std::int32_t code) const {
  const std::size_t idx = dataset_.index_of(varname);
  if (idx == 0) fail("variable not found: " + varname);
  const Variable& v = dataset_.var(idx);
  if (v.label_table().empty()) fail("no label table attached to " + varname);
  const auto& table = label_table(v.label_table());
  auto it = table.labels.find(code);
  // Unmapped codes fall back to their decimal rendering.
  return it != table.labels.end() ? it->second : std::to_string(code);
}

bool Workspace::has_label_table(const std::string& table) const {
  return label_tables_.count(table) != 0;
}

const ValueLabelTable& Workspace::label_table(const std::string& table) const {
  auto it = label_tables_.find(table);
  if (it == label_tables_.end()) fail("label table not found: " + table);
  return it->second;
}

void Workspace::set_global(const std::string& name, std::string value) {
  globals_[name] = std::move(value);
}

std::string Workspace::get_global(const std::string& name) const {
  auto it = globals_.find(name);
  return it != globals_.end() ? it->second : std::string();
}

void Workspace::push_frame() { frames_.emplace_back(); }

void Workspace::pop_frame() {
  if (frames_.size() < 2) fail("cannot pop root frame");
  frames_.pop_back();
}

void Workspace::promote_frame() {
  if (frames_.size() < 2) fail("cannot pop root frame");
  MacroFrame& child = frames_.back();
  MacroFrame& parent = frames_[frames_.size() - 2];
  for (const auto& name : child.pending_promotions) {
    auto it = child.locals.find(name);
    if (it != child.locals.end()) parent.locals[name] = it->second;
  }
  frames_.pop_back();
}

void Workspace::set_local(const std::string& name, std::string value) {
  frames_.back().locals[name] = std::move(value);
}

std::string Workspace::get_local(const std::string& name) const {
  const auto& locals = frames_.back().locals;
  auto it = locals.find(name);
  return it != locals.end() ? it->second : std::string();
}

}  // namespace statbridge
