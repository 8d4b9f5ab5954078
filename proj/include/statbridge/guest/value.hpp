#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace statbridge {
class GateSession;
}

namespace statbridge::guest {

enum class BaseType : std::uint8_t { I8, I16, I32, I64, F32, F64, Str, Categorical };

struct ColumnType {
  BaseType base = BaseType::F64;
  bool allows_missing = false;

  // "Int16?", "Float32?", "String", "Categorical?", ...
  std::string name() const;
  bool is_numeric() const { return base != BaseType::Str && base != BaseType::Categorical; }
  bool operator==(const ColumnType&) const = default;
};

// One data-frame column with native-width storage. Categorical columns
// store 1-based level indices in the i32 slot plus an ordered level table.
struct Column {
  ColumnType type;
  std::variant<std::vector<std::int8_t>, std::vector<std::int16_t>, std::vector<std::int32_t>,
               std::vector<std::int64_t>, std::vector<float>, std::vector<double>,
               std::vector<std::string>>
      data;
  std::vector<std::uint8_t> missing;  // per-cell flag, always sized
  std::vector<std::string> levels;    // categorical only

  std::size_t size() const;
  bool is_missing(std::size_t i) const { return i < missing.size() && missing[i] != 0; }
  double number_at(std::size_t i) const;      // numeric bases, non-missing cells
  std::string text_at(std::size_t i) const;   // Str bytes or categorical label

  bool operator==(const Column&) const = default;
};

struct DataFrame {
  std::vector<std::string> names;
  std::vector<Column> columns;

  std::size_t nrows() const { return columns.empty() ? 0 : columns.front().size(); }
  std::size_t ncols() const { return columns.size(); }
  std::size_t index_of(const std::string& name) const;  // 1-based, 0 if absent

  bool operator==(const DataFrame&) const = default;
};

struct Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> cells;  // column-major

  static Matrix zeros(std::size_t r, std::size_t c) { return {r, c, std::vector<double>(r * c)}; }
  double& at(std::size_t r, std::size_t c) { return cells[c * rows + r]; }  // 0-based
  double at(std::size_t r, std::size_t c) const { return cells[c * rows + r]; }

  bool operator==(const Matrix&) const = default;
};

struct Value;

struct Missing {
  bool operator==(const Missing&) const = default;
};

struct Range {
  std::int64_t lo = 0, hi = 0;  // inclusive
  std::int64_t length() const { return hi >= lo ? hi - lo + 1 : 0; }
  bool operator==(const Range&) const = default;
};

struct Tuple {
  std::vector<Value> items;
};

// Write-through window onto numeric host variables: element [r, c] is the
// r-th selected observation of the c-th variable, read and written one
// cell at a time through the gate.
struct StView {
  GateSession* gate = nullptr;
  std::vector<std::size_t> obs;   // selected observation indices, 1-based
  std::vector<std::size_t> vars;  // variable indices, 1-based
};

// A data-frame column reached via df.name; shares the frame's storage.
struct ColumnRef {
  std::shared_ptr<DataFrame> df;
  std::size_t col = 0;  // 0-based

  Column& column() const { return df->columns[col]; }
};

using VecPtr = std::shared_ptr<std::vector<Value>>;
using MatPtr = std::shared_ptr<Matrix>;
using DfPtr = std::shared_ptr<DataFrame>;
using TuplePtr = std::shared_ptr<Tuple>;
using ViewPtr = std::shared_ptr<StView>;

// std::monostate is `nothing` (the only value the REPL never echoes).
struct Value {
  std::variant<std::monostate, Missing, std::int64_t, double, bool, std::string, VecPtr,
               TuplePtr, MatPtr, DfPtr, ColumnRef, Range, ViewPtr>
      v;

  Value() = default;

  static Value nothing() { return Value{}; }
  static Value missing() { return of(Missing{}); }
  static Value integer(std::int64_t i) { return of(i); }
  static Value number(double d) { return of(d); }
  static Value boolean(bool b) { return of(b); }
  static Value str(std::string s) { return of(std::move(s)); }
  static Value vec(std::vector<Value> items) {
    return of(std::make_shared<std::vector<Value>>(std::move(items)));
  }
  static Value tuple(std::vector<Value> items) {
    return of(std::make_shared<Tuple>(Tuple{std::move(items)}));
  }
  static Value matrix(Matrix m) { return of(std::make_shared<Matrix>(std::move(m))); }
  static Value matrix(MatPtr m) { return of(std::move(m)); }
  static Value frame(DfPtr df) { return of(std::move(df)); }
  static Value range(std::int64_t lo, std::int64_t hi) { return of(Range{lo, hi}); }
  static Value view(StView v) { return of(std::make_shared<StView>(std::move(v))); }
  static Value column(ColumnRef c) { return of(std::move(c)); }

  bool is_nothing() const { return std::holds_alternative<std::monostate>(v); }
  bool is_missing() const { return std::holds_alternative<Missing>(v); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(v); }
  bool is_float() const { return std::holds_alternative<double>(v); }
  bool is_bool() const { return std::holds_alternative<bool>(v); }
  bool is_number() const { return is_int() || is_float() || is_bool(); }
  bool is_str() const { return std::holds_alternative<std::string>(v); }

  std::int64_t as_int() const;
  double as_number() const;
  const std::string& as_str() const;

  // Rendered as the REPL would echo it.
  std::string display() const;

 private:
  template <typename T>
  static Value of(T x) {
    Value val;
    val.v = std::move(x);
    return val;
  }
};

// Shortest round-trip decimal for doubles, with ".0" appended to integral
// values so floats stay visibly floats.
std::string format_f64(double d);
std::string format_f32(float f);

}  // namespace statbridge::guest
