#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "statbridge/missing.hpp"

namespace statbridge {

struct ValueLabelTable {
  std::string name;
  std::map<std::int32_t, std::string> labels;  // code -> nonempty label
};

// String cell; the binary flag is only meaningful for strL variables.
struct StrCell {
  std::string bytes;
  bool binary = false;
  bool operator==(const StrCell&) const = default;
};

// One host column. Numeric cells are stored at their native width; missing
// flavors live inside the cells as sentinel ladder values.
class Variable {
 public:
  Variable(std::string name, StorageType stype, std::size_t nobs);

  const std::string& name() const { return name_; }
  StorageType stype() const { return stype_; }
  const std::string& label_table() const { return label_table_; }
  void attach_label_table(std::string table) { label_table_ = std::move(table); }

  std::size_t size() const;
  void resize_with_missing(std::size_t n);

  // Numeric access (0-based). as_double widens valid cells exactly and is
  // undefined on missing cells; callers check missing_code first.
  std::optional<int> missing_code(std::size_t i) const;
  double as_double(std::size_t i) const;
  void set_missing(std::size_t i, int code);
  void set_integer(std::size_t i, std::int64_t v);  // must be in valid range
  void set_float(std::size_t i, float v);
  void set_double(std::size_t i, double v);

  // String access.
  const StrCell& str_cell(std::size_t i) const;
  void set_str(std::size_t i, std::string bytes, bool binary = false);

  // Raw integer cell including sentinels (integer kinds only).
  std::int64_t raw_int(std::size_t i) const;

  bool operator==(const Variable&) const = default;

 private:
  std::string name_;
  StorageType stype_;
  std::string label_table_;  // empty if none
  std::variant<std::vector<std::int8_t>, std::vector<std::int16_t>, std::vector<std::int32_t>,
               std::vector<float>, std::vector<double>, std::vector<StrCell>>
      cells_;
};

// Outcome of converting a double into a variable's storage type.
enum class StoreOutcome {
  stored,           // value representable, stored as data
  stored_missing,   // input was a sentinel ladder value; flavor preserved
  coerced_missing,  // out of range or non-integral for an integer kind
};

// The one conversion rule shared by the gate and the bridge: exact ladder
// sentinels keep their flavor; finite values out of the target's valid
// range (or non-integral for integer kinds) become generic missing.
StoreOutcome store_cell_from_double(Variable& var, std::size_t i, double v);

// Widen cell i to double, surfacing host missing flavor k as the SDouble
// ladder value for k. Numeric kinds only.
double load_cell_as_double(const Variable& var, std::size_t i);

struct Dataset {
  std::size_t nobs = 0;
  std::vector<Variable> variables;

  std::size_t nvar() const { return variables.size(); }
  // 1-based index of a named variable, 0 if absent.
  std::size_t index_of(const std::string& name) const;
  Variable& var(std::size_t index1);  // 1-based, throws on range
  const Variable& var(std::size_t index1) const;

  bool operator==(const Dataset&) const = default;
};

// Dense column-major double matrix with named identity in the workspace.
struct HostMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> cells;  // column-major

  double& at(std::size_t r, std::size_t c) { return cells[(c - 1) * rows + (r - 1)]; }  // 1-based
  double at(std::size_t r, std::size_t c) const { return cells[(c - 1) * rows + (r - 1)]; }
};

struct MacroFrame {
  std::map<std::string, std::string> locals;
  std::vector<std::string> pending_promotions;  // names to copy up on promote
};

bool is_identifier(std::string_view s);

// The host workspace: one dataset plus named matrices, scalars, globals,
// value-label tables, and the macro frame stack (never empty).
class Workspace {
 public:
  Workspace();

  // --- dataset shape ---
  void set_obs(std::size_t n);
  void create_variable(const std::string& name, StorageType stype);
  void drop_variable(const std::string& name);
  void clear_dataset();

  Dataset& dataset() { return dataset_; }
  const Dataset& dataset() const { return dataset_; }
  void replace_dataset(Dataset ds);  // wholesale swap (bridge use_df); clears dirty

  bool dataset_dirty() const { return dataset_dirty_; }
  void mark_dirty() { dataset_dirty_ = true; }
  void clear_dirty() { dataset_dirty_ = false; }

  // --- matrices and scalars ---
  void define_matrix(const std::string& name, std::size_t rows, std::size_t cols);
  void set_matrix(const std::string& name, HostMatrix m);
  bool has_matrix(const std::string& name) const;
  HostMatrix& matrix(const std::string& name);  // throws "matrix not found"
  const std::map<std::string, HostMatrix>& matrices() const { return matrices_; }

  void define_scalar(const std::string& name, double value);
  bool has_scalar(const std::string& name) const;
  double scalar(const std::string& name) const;
  const std::map<std::string, double>& scalars() const { return scalars_; }

  // --- value labels ---
  void label_define(const std::string& table, std::map<std::int32_t, std::string> labels);
  void label_attach(const std::string& varname, const std::string& table);
  std::string label_lookup(const std::string& varname, std::int32_t code) const;
  bool has_label_table(const std::string& table) const;
  const ValueLabelTable& label_table(const std::string& table) const;
  const std::map<std::string, ValueLabelTable>& label_tables() const { return label_tables_; }

  // --- globals ---
  void set_global(const std::string& name, std::string value);
  std::string get_global(const std::string& name) const;  // "" if unset

  // --- macro frames ---
  std::size_t frame_depth() const { return frames_.size(); }
  void push_frame();
  void pop_frame();      // discards the top frame; error at depth 1
  void promote_frame();  // copies pending names to parent, then pops
  void set_local(const std::string& name, std::string value);  // current frame
  std::string get_local(const std::string& name) const;        // current frame only
  MacroFrame& current_frame() { return frames_.back(); }
  const MacroFrame& current_frame() const { return frames_.back(); }
  MacroFrame& frame(std::size_t depth0) { return frames_[depth0]; }

  // --- on-disk format (see dataset_io.cpp for the layout) ---
  void store_dataset(const std::string& path) const;
  void load_dataset(const std::string& path);

 private:
  Dataset dataset_;
  std::map<std::string, HostMatrix> matrices_;
  std::map<std::string, double> scalars_;
  std::map<std::string, std::string> globals_;
  std::map<std::string, ValueLabelTable> label_tables_;
  std::vector<MacroFrame> frames_;
  bool dataset_dirty_ = false;
};

}  // namespace statbridge
