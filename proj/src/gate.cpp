#include "statbridge/gate.hpp"

#include "statbridge/errors.hpp"

namespace statbridge {

SampleRestriction SampleRestriction::InRange(std::size_t first, std::size_t last) {
  SampleRestriction r;
  r.mode = Mode::in_range;
  r.first = first;
  r.last = last;
  return r;
}

SampleRestriction SampleRestriction::Mask(std::vector<char> mask) {
  SampleRestriction r;
  r.mode = Mode::mask;
  r.mask = std::move(mask);
  return r;
}

bool SampleRestriction::selects(std::size_t j) const {
  switch (mode) {
    case Mode::all: return true;
    case Mode::in_range: return j >= first && j <= last;
    case Mode::mask: return j >= 1 && j <= mask.size() && mask[j - 1] != 0;
  }
  return false;
}

std::vector<std::size_t> SampleRestriction::selected(std::size_t nobs) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 1; j <= nobs; ++j)
    if (selects(j)) out.push_back(j);
  return out;
}

std::size_t SampleRestriction::count(std::size_t nobs) const {
  std::size_t n = 0;
  for (std::size_t j = 1; j <= nobs; ++j)
    if (selects(j)) ++n;
  return n;
}

void SampleRestriction::validate(std::size_t nobs) const {
  if (mode == Mode::in_range) {
    if (first < 1 || first > last || last > nobs) fail("in range out of bounds");
  } else if (mode == Mode::mask) {
    if (mask.size() != nobs) fail("mask length does not match observation count");
  }
}

GateSession::GateSession(Workspace& ws, OutputSink sink)
    : ws_(ws), sink_(std::move(sink)), gate_frame_(ws.frame_depth() - 1) {}

void GateSession::set_restriction(SampleRestriction r) {
  r.validate(ws_.dataset().nobs);
  restriction_ = std::move(r);
}

void GateSession::check_obs(std::size_t j) const {
  if (j < 1 || j > ws_.dataset().nobs) fail("observation index out of range");
  if (!restriction_.selects(j)) fail("observation index out of range");
}

Variable& GateSession::numeric_var(std::size_t j, std::size_t i) {
  check_obs(j);
  Variable& v = ws_.dataset().var(i);
  if (is_string(v.stype())) fail("type mismatch: " + v.name() + " is a string variable");
  return v;
}

Variable& GateSession::string_var(std::size_t j, std::size_t i) {
  check_obs(j);
  Variable& v = ws_.dataset().var(i);
  if (!is_string(v.stype())) fail("type mismatch: " + v.name() + " is a numeric variable");
  return v;
}

double GateSession::cell_get(std::size_t j, std::size_t i) {
  return load_cell_as_double(numeric_var(j, i), j - 1);
}

void GateSession::cell_set(std::size_t j, std::size_t i, double v) {
  Variable& var = numeric_var(j, i);
  if (store_cell_from_double(var, j - 1, v) == StoreOutcome::coerced_missing)
    ++conversion_warnings_;
  ws_.mark_dirty();
}

std::string GateSession::str_get(std::size_t j, std::size_t i) {
  return string_var(j, i).str_cell(j - 1).bytes;
}

void GateSession::str_set(std::size_t j, std::size_t i, const std::string& s) {
  string_var(j, i).set_str(j - 1, s);
  ws_.mark_dirty();
}

void GateSession::macro_save(MacroNamespace ns, const std::string& name,
                             const std::string& value) {
  if (ns == MacroNamespace::global) {
    ws_.set_global(name, value);
  } else {
    ws_.frame(gate_frame_).locals[name] = value;
  }
}

std::string GateSession::macro_use(MacroNamespace ns, const std::string& name) {
  // Locals cannot be read back through the gate.
  if (ns == MacroNamespace::local) return "";
  return ws_.get_global(name);
}

void GateSession::add_pending_promotion(const std::string& name) {
  auto& pending = ws_.frame(gate_frame_).pending_promotions;
  for (const auto& n : pending)
    if (n == name) return;
  pending.push_back(name);
}

void GateSession::scalar_save(const std::string& name, double v) { ws_.define_scalar(name, v); }

double GateSession::scalar_use(const std::string& name) { return ws_.scalar(name); }

std::size_t GateSession::mat_rows(const std::string& name) { return ws_.matrix(name).rows; }

std::size_t GateSession::mat_cols(const std::string& name) { return ws_.matrix(name).cols; }

double GateSession::mat_el(const std::string& name, std::size_t i, std::size_t j) {
  HostMatrix& m = ws_.matrix(name);
  if (i < 1 || i > m.rows || j < 1 || j > m.cols) fail("matrix subscript out of range");
  return m.at(i, j);
}

void GateSession::mat_store(const std::string& name, std::size_t i, std::size_t j, double v) {
  HostMatrix& m = ws_.matrix(name);
  if (i < 1 || i > m.rows || j < 1 || j > m.cols) fail("matrix subscript out of range");
  m.at(i, j) = v;
}

std::size_t GateSession::nobs() const { return ws_.dataset().nobs; }

std::size_t GateSession::nvar() const { return ws_.dataset().nvar(); }

bool GateSession::var_is_string(std::size_t i) const {
  return is_string(ws_.dataset().var(i).stype());
}

bool GateSession::var_is_strl(std::size_t i) const {
  return ws_.dataset().var(i).stype() == StorageType::SStrL;
}

bool GateSession::var_is_binary(std::size_t j, std::size_t i) {
  return string_var(j, i).str_cell(j - 1).binary;
}

std::size_t GateSession::sdatalen(std::size_t j, std::size_t i) {
  return string_var(j, i).str_cell(j - 1).bytes.size();
}

std::size_t GateSession::varindex(const std::string& name) const {
  const std::size_t idx = ws_.dataset().index_of(name);
  if (idx == 0) fail("variable not found: " + name);
  return idx;
}

void GateSession::display(const std::string& s) {
  if (sink_) sink_(false, s);
}

void GateSession::display_error(const std::string& s) {
  if (sink_) sink_(true, s);
}

}  // namespace statbridge
