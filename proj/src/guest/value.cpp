#include "statbridge/guest/value.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "statbridge/errors.hpp"

namespace statbridge::guest {

std::string ColumnType::name() const {
  const char* base_name = nullptr;
  switch (base) {
    case BaseType::I8: base_name = "Int8"; break;
    case BaseType::I16: base_name = "Int16"; break;
    case BaseType::I32: base_name = "Int32"; break;
    case BaseType::I64: base_name = "Int64"; break;
    case BaseType::F32: base_name = "Float32"; break;
    case BaseType::F64: base_name = "Float64"; break;
    case BaseType::Str: base_name = "String"; break;
    case BaseType::Categorical: base_name = "Categorical"; break;
  }
  std::string n = base_name;
  if (allows_missing) n += "?";
  return n;
}

std::size_t Column::size() const {
  return std::visit([](const auto& v) { return v.size(); }, data);
}

double Column::number_at(std::size_t i) const {
  switch (type.base) {
    case BaseType::I8: return std::get<std::vector<std::int8_t>>(data)[i];
    case BaseType::I16: return std::get<std::vector<std::int16_t>>(data)[i];
    case BaseType::I32: return std::get<std::vector<std::int32_t>>(data)[i];
    case BaseType::I64: return static_cast<double>(std::get<std::vector<std::int64_t>>(data)[i]);
    case BaseType::F32: return std::get<std::vector<float>>(data)[i];
    case BaseType::F64: return std::get<std::vector<double>>(data)[i];
    default: fail("column is not numeric");
  }
}

std::string Column::text_at(std::size_t i) const {
  if (type.base == BaseType::Str) return std::get<std::vector<std::string>>(data)[i];
  if (type.base == BaseType::Categorical) {
    const auto idx = std::get<std::vector<std::int32_t>>(data)[i];
    if (idx < 1 || static_cast<std::size_t>(idx) > levels.size()) fail("level index out of range");
    return levels[static_cast<std::size_t>(idx) - 1];
  }
  fail("column is not textual");
}

std::size_t DataFrame::index_of(const std::string& name) const {
  for (std::size_t k = 0; k < names.size(); ++k)
    if (names[k] == name) return k + 1;
  return 0;
}

std::int64_t Value::as_int() const {
  if (is_int()) return std::get<std::int64_t>(v);
  if (is_bool()) return std::get<bool>(v) ? 1 : 0;
  if (is_float()) {
    const double d = std::get<double>(v);
    if (d == std::floor(d)) return static_cast<std::int64_t>(d);
  }
  fail("expected an integer, got " + display());
}

double Value::as_number() const {
  if (is_int()) return static_cast<double>(std::get<std::int64_t>(v));
  if (is_float()) return std::get<double>(v);
  if (is_bool()) return std::get<bool>(v) ? 1.0 : 0.0;
  fail("expected a number, got " + display());
}

const std::string& Value::as_str() const {
  if (!is_str()) fail("expected a string, got " + display());
  return std::get<std::string>(v);
}

namespace {

template <typename F>
std::string to_chars_str(F x) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string join_displays(const std::vector<Value>& items, char open, char close) {
  std::string out(1, open);
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (k) out += ", ";
    out += items[k].display();
  }
  out += close;
  return out;
}

std::string cell_display(const Column& col, std::size_t i) {
  if (col.is_missing(i)) return "missing";
  switch (col.type.base) {
    case BaseType::Str:
    case BaseType::Categorical: return col.text_at(i);
    case BaseType::F32: return format_f32(static_cast<float>(col.number_at(i)));
    case BaseType::F64: return format_f64(col.number_at(i));
    default: return std::to_string(static_cast<std::int64_t>(col.number_at(i)));
  }
}

// Type names wider than the column head get shortened, "CategoricalVector?"
// style, to an initial fragment plus "…?".
std::string fitted_type_name(const ColumnType& t, std::size_t width) {
  std::string n = t.name();
  if (n.size() <= width) return n;
  const bool q = !n.empty() && n.back() == '?';
  std::string out = n.substr(0, width > 2 ? width - (q ? 2 : 1) : 1);
  out += "…";
  if (q) out += "?";
  return out;
}

// Count the 3-byte UTF-8 ellipsis as a single display column.
std::string pad_display(const std::string& s, std::size_t w) {
  std::size_t vis = s.size();
  for (std::size_t p = s.find("…"); p != std::string::npos; p = s.find("…", p + 3))
    vis -= 2;
  return s + std::string(w > vis ? w - vis : 0, ' ');
}

std::string dataframe_display(const DataFrame& df) {
  const std::size_t head = 8, tail = 7, cutoff = 20;
  std::string out =
      std::to_string(df.nrows()) + "×" + std::to_string(df.ncols()) + " DataFrame";
  if (df.ncols() == 0) return out;

  const bool abridged = df.nrows() > cutoff;
  std::vector<std::size_t> rows;
  if (abridged) {
    for (std::size_t i = 0; i < head; ++i) rows.push_back(i);
    for (std::size_t i = df.nrows() - tail; i < df.nrows(); ++i) rows.push_back(i);
  } else {
    for (std::size_t i = 0; i < df.nrows(); ++i) rows.push_back(i);
  }

  std::vector<std::size_t> widths(df.ncols());
  std::vector<std::vector<std::string>> cells(df.ncols());
  std::vector<std::string> type_names(df.ncols());
  for (std::size_t c = 0; c < df.ncols(); ++c) {
    widths[c] = df.names[c].size();
    for (std::size_t r : rows) {
      cells[c].push_back(cell_display(df.columns[c], r));
      widths[c] = std::max(widths[c], cells[c].back().size());
    }
    type_names[c] = fitted_type_name(df.columns[c].type, std::max<std::size_t>(widths[c], 5));
  }

  const std::size_t row_w = std::max<std::size_t>(3, std::to_string(df.nrows()).size());
  std::string header = " " + pad_display("Row", row_w) + " ";
  std::string types = " " + std::string(row_w, ' ') + " ";
  for (std::size_t c = 0; c < df.ncols(); ++c) {
    header += "| " + pad_display(df.names[c], widths[c]) + " ";
    types += "| " + pad_display(type_names[c], widths[c]) + " ";
  }
  out += "\n" + header + "\n" + types;

  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (abridged && k == head) {
      out += "\n " + std::string(row_w - 1, ' ') + "⋮";
    }
    std::string num = std::to_string(rows[k] + 1);
    std::string line =
        " " + std::string(row_w > num.size() ? row_w - num.size() : 0, ' ') + num + " ";
    for (std::size_t c = 0; c < df.ncols(); ++c)
      line += "| " + pad_display(cells[c][k], widths[c]) + " ";
    out += "\n" + line;
  }
  if (abridged) out += "\n" + std::to_string(df.nrows() - head - tail) + " rows omitted";
  return out;
}

}  // namespace

std::string format_f64(double d) {
  if (std::isnan(d)) return "NaN";
  if (std::isinf(d)) return d > 0 ? "Inf" : "-Inf";
  std::string s = to_chars_str(d);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::string format_f32(float f) {
  if (std::isnan(f)) return "NaN";
  if (std::isinf(f)) return f > 0 ? "Inf" : "-Inf";
  std::string s = to_chars_str(f);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::string Value::display() const {
  struct Visitor {
    std::string operator()(std::monostate) const { return "nothing"; }
    std::string operator()(const Missing&) const { return "missing"; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const { return format_f64(d); }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(const std::string& s) const { return "\"" + s + "\""; }
    std::string operator()(const VecPtr& p) const { return join_displays(*p, '[', ']'); }
    std::string operator()(const TuplePtr& p) const { return join_displays(p->items, '(', ')'); }
    std::string operator()(const MatPtr& m) const {
      std::string out = std::to_string(m->rows) + "×" + std::to_string(m->cols) + " Matrix:";
      const std::size_t max_rows = 10;
      for (std::size_t r = 0; r < m->rows && r < max_rows; ++r) {
        out += "\n ";
        for (std::size_t c = 0; c < m->cols; ++c) out += " " + format_f64(m->at(r, c));
      }
      if (m->rows > max_rows)
        out += "\n  … " + std::to_string(m->rows - max_rows) + " rows omitted";
      return out;
    }
    std::string operator()(const DfPtr& df) const { return dataframe_display(*df); }
    std::string operator()(const ColumnRef& ref) const {
      const Column& col = ref.column();
      std::string out = std::to_string(col.size()) + "-element " + col.type.name() + " column:";
      const std::size_t max_rows = 10;
      for (std::size_t i = 0; i < col.size() && i < max_rows; ++i)
        out += "\n  " + cell_display(col, i);
      if (col.size() > max_rows)
        out += "\n  … " + std::to_string(col.size() - max_rows) + " rows omitted";
      return out;
    }
    std::string operator()(const Range& r) const {
      return std::to_string(r.lo) + ":" + std::to_string(r.hi);
    }
    std::string operator()(const ViewPtr& v) const {
      return std::to_string(v->obs.size()) + "×" + std::to_string(v->vars.size()) +
             " view onto host variables";
    }
  };
  return std::visit(Visitor{}, v);
}

}  // namespace statbridge::guest
