#include "statbridge/shell.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "statbridge/bench.hpp"
#include "statbridge/bridge.hpp"
#include "statbridge/errors.hpp"
#include "statbridge/guest/parser.hpp"
#include "statbridge/guest/softscope.hpp"

namespace statbridge {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool starts_with(const std::string& s, const char* prefix) {
  return s.rfind(prefix, 0) == 0;
}

// First whitespace-delimited word and the remainder.
std::pair<std::string, std::string> split_word(const std::string& s) {
  const std::string t = trim(s);
  std::size_t e = 0;
  while (e < t.size() && !std::isspace(static_cast<unsigned char>(t[e]))) ++e;
  return {t.substr(0, e), trim(t.substr(e))};
}

// Stata command shape: everything before the first top-level comma is the
// body, everything after is the option list.
std::pair<std::string, std::string> split_options(const std::string& s) {
  int parens = 0;
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '"') quoted = !quoted;
    if (quoted) continue;
    if (c == '(') ++parens;
    if (c == ')') --parens;
    if (c == ',' && parens == 0) return {trim(s.substr(0, i)), trim(s.substr(i + 1))};
  }
  return {trim(s), ""};
}

struct Opt {
  std::string name;
  std::string arg;
  bool has_arg = false;
  bool consumed = false;
};

std::vector<Opt> parse_options(const std::string& s) {
  std::vector<Opt> opts;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i >= s.size()) break;
    std::size_t b = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != '(') ++i;
    Opt opt;
    opt.name = s.substr(b, i - b);
    if (i < s.size() && s[i] == '(') {
      int depth = 1;
      std::size_t ab = ++i;
      while (i < s.size() && depth > 0) {
        if (s[i] == '(') ++depth;
        if (s[i] == ')') --depth;
        if (depth > 0) ++i;
      }
      if (depth != 0) fail("unbalanced parentheses in options");
      opt.arg = trim(s.substr(ab, i - ab));
      opt.has_arg = true;
      ++i;  // ')'
    }
    if (!opt.name.empty()) opts.push_back(std::move(opt));
  }
  return opts;
}

// Stata-style minimum abbreviation: `given` must be a prefix of `full` at
// least `minlen` characters long.
bool opt_is(const Opt& opt, const char* full, std::size_t minlen) {
  const std::string& g = opt.name;
  if (g.size() < minlen || g.size() > std::string(full).size()) return false;
  return std::string(full).compare(0, g.size(), g) == 0;
}

void reject_unconsumed(const std::vector<Opt>& opts) {
  for (const auto& o : opts)
    if (!o.consumed) fail("option " + o.name + " not allowed");
}

std::int64_t parse_int(const std::string& s, const char* what) {
  std::int64_t v = 0;
  const std::string t = trim(s);
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size())
    fail(std::string("expected a number for ") + what + ", got '" + t + "'");
  return v;
}

double parse_double(const std::string& s, const char* what) {
  const std::string t = trim(s);
  if (t == ".") return encode_missing_double(0);
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used == t.size()) return v;
  } catch (...) {
  }
  fail(std::string("expected a number for ") + what + ", got '" + t + "'");
}

// Tokens for display/label commands: quoted strings or bare words.
std::vector<std::pair<std::string, bool>> tokenize_quoted(const std::string& s) {
  std::vector<std::pair<std::string, bool>> tokens;  // (text, was_quoted)
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i >= s.size()) break;
    if (s[i] == '"') {
      std::size_t b = ++i;
      while (i < s.size() && s[i] != '"') ++i;
      if (i >= s.size()) fail("unterminated quote");
      tokens.emplace_back(s.substr(b, i - b), true);
      ++i;
    } else {
      std::size_t b = i;
      while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      tokens.emplace_back(s.substr(b, i - b), false);
    }
  }
  return tokens;
}

std::vector<std::string> whitespace_tokens(const std::string& s) {
  std::istringstream ss(s);
  std::vector<std::string> out;
  std::string w;
  while (ss >> w) out.push_back(w);
  return out;
}

struct BodyParts {
  std::vector<std::string> varlist;
  SampleRestriction restriction = SampleRestriction::All();
  std::vector<std::string> leftovers;  // tokens after "using" etc.
};

}  // namespace

std::string format_host_double(double v) {
  if (auto code = decode_missing_double(v)) return missing_display(*code);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.8g", v);
  std::string s = buf;
  if (starts_with(s, "0.")) s.erase(0, 1);
  else if (starts_with(s, "-0.")) s.erase(1, 1);
  return s;
}

Shell::Shell(std::ostream& out, SessionConfig cfg)
    : out_(out), cfg_(std::move(cfg)), envman_(cfg_.env_root, cfg_.registry_root) {
  scope_.nthreads = cfg_.thread_limit;
}

std::string Shell::interpolate_locals(const std::string& line) const {
  std::string out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] == '`') {
      const std::size_t close = line.find('\'', i + 1);
      if (close != std::string::npos) {
        const std::string name = line.substr(i + 1, close - i - 1);
        if (is_identifier(name)) {
          out += ws_.get_local(name);  // unset locals read as empty
          i = close + 1;
          continue;
        }
      }
    }
    out += line[i];
    ++i;
  }
  return out;
}

void Shell::emit_error(const std::string& message) {
  out_ << "error: " << message << "\n";
  ++errors_;
}

void Shell::feed_line(const std::string& raw) {
  std::string line = raw;
  if (!line.empty() && line.back() == '\r') line.pop_back();

  if (guest_mode_) {
    feed_guest_line(line);
    return;
  }

  const std::string trimmed = trim(line);
  if (trimmed.empty() || trimmed[0] == '#') return;
  if (echo_input_) out_ << ". " << trimmed << "\n";

  const auto t0 = std::chrono::steady_clock::now();
  try {
    dispatch(interpolate_locals(trimmed));
    if (cfg_.timing) {
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      char buf[48];
      std::snprintf(buf, sizeof buf, "r; t=%.3f", secs);
      out_ << buf << "\n";
    }
  } catch (const error& e) {
    emit_error(e.what());
  }
}

void Shell::dispatch(const std::string& line) {
  if (starts_with(line, "_jl:")) {
    raw_eval(trim(line.substr(4)));
    return;
  }
  if (starts_with(line, "jl:")) {
    const std::string rest = trim(line.substr(3));
    if (rest.empty()) enter_guest_mode();
    else prefix_eval(rest);
    return;
  }
  auto [verb, rest] = split_word(line);
  if (verb == "jl") {
    if (rest.empty()) enter_guest_mode();
    else handle_jl_command(rest);
    return;
  }
  handle_host_command(verb, rest);
}

void Shell::handle_jl_command(const std::string& rest) {
  auto [sub, remainder] = split_word(rest);
  if (sub == "start") {
    cmd_start(remainder);
    return;
  }
  auto_start();
  if (sub == "GetEnv") cmd_get_env();
  else if (sub == "SetEnv") cmd_set_env(remainder);
  else if (sub == "AddPkg") cmd_add_pkg(remainder);
  else if (sub == "save") cmd_jl_save(remainder);
  else if (sub == "use") cmd_jl_use(remainder);
  else if (sub == "PutVarsToDF" || sub == "GetVarsFromDF" || sub == "PutVarsToMat" ||
           sub == "GetVarsFromMat" || sub == "PutMatToMat" || sub == "GetMatFromMat")
    cmd_transfer(sub, remainder);
  else
    fail("unknown jl subcommand '" + sub +
         "' (try start, GetEnv, SetEnv, AddPkg, save, use, PutVarsToDF, GetVarsFromDF, "
         "PutVarsToMat, GetVarsFromMat, PutMatToMat, GetMatFromMat)");
}

void Shell::handle_host_command(const std::string& verb, const std::string& rest) {
  if (verb == "obs") cmd_obs(rest);
  else if (verb == "genvar") cmd_genvar(rest);
  else if (verb == "matrix") cmd_matrix(rest);
  else if (verb == "scalar") cmd_scalar(rest);
  else if (verb == "local") cmd_local(rest);
  else if (verb == "global") cmd_global(rest);
  else if (verb == "label") cmd_label(rest);
  else if (verb == "use") cmd_use_dataset(rest);
  else if (verb == "save") cmd_save_dataset(rest);
  else if (verb == "list") cmd_list(rest);
  else if (verb == "describe") cmd_describe();
  else if (verb == "display") cmd_display(rest);
  else if (verb == "bench") cmd_bench(rest);
  else if (verb == "help") cmd_help();
  else if (verb == "exit") quit_ = true;
  else
    fail("unknown command '" + verb + "' (type help for the command list)");
}

void Shell::auto_start() {
  if (cfg_.started) return;
  cfg_.started = true;
  if (cfg_.thread_limit == 0) cfg_.thread_limit = std::max(1u, std::thread::hardware_concurrency());
  scope_.nthreads = cfg_.thread_limit;
}

void Shell::cmd_start(const std::string& rest) {
  if (cfg_.started) fail("thread limit already fixed");
  auto [body, optstr] = split_options(rest);
  if (!body.empty()) fail("jl start takes options only");
  unsigned limit = std::max(1u, std::thread::hardware_concurrency());
  auto opts = parse_options(optstr);
  for (auto& o : opts) {
    if (opt_is(o, "threads", 7)) {
      o.consumed = true;
      if (o.arg != "auto") {
        const std::int64_t n = parse_int(o.arg, "threads()");
        if (n < 1) fail("threads() must be at least 1");
        limit = static_cast<unsigned>(n);
      }
    }
  }
  reject_unconsumed(opts);
  cfg_.started = true;
  cfg_.thread_limit = limit;
  scope_.nthreads = limit;
  out_ << "guest started, thread limit " << limit << "\n";
}

void Shell::print_env_status(const envman::EnvStatus& status) {
  out_ << "Current environment: " << status.name << ", at " << status.path << "\n\n";
  out_ << "Status '" << status.path << "/Manifest.txt'\n";
  for (const auto& e : status.manifest) out_ << "  " << e.name << " v" << e.version.str() << "\n";
}

void Shell::cmd_get_env() {
  const auto status = envman_.get_env();
  print_env_status(status);
  std::string pkgs;
  for (const auto& e : status.manifest) {
    if (!pkgs.empty()) pkgs += "; ";
    pkgs += e.name + " " + e.version.str();
  }
  ws_.set_local("r(dir)", status.path);
  ws_.set_local("r(pkgs)", pkgs);
}

void Shell::cmd_set_env(const std::string& rest) {
  auto [body, optstr] = split_options(rest);
  if (!optstr.empty()) fail("SetEnv takes no options");
  const auto tokens = whitespace_tokens(body);
  if (tokens.size() > 1) fail("SetEnv takes at most one name");
  print_env_status(envman_.set_env(tokens.empty() ? "." : tokens[0]));
}

void Shell::cmd_add_pkg(const std::string& rest) {
  auto [body, optstr] = split_options(rest);
  const auto tokens = whitespace_tokens(body);
  if (tokens.size() != 1) fail("AddPkg needs exactly one package name");
  std::optional<envman::SemVer> minver;
  auto opts = parse_options(optstr);
  for (auto& o : opts) {
    if (opt_is(o, "minver", 6)) {
      o.consumed = true;
      minver = envman::SemVer::parse(o.arg);
      if (!minver) fail("minver() must look like X.Y.Z");
    }
  }
  reject_unconsumed(opts);
  envman_.add_pkg(tokens[0], minver);
}

namespace {

// Varlist with "*" and positional a-b ranges, plus if/in clauses.
BodyParts parse_body(const Workspace& ws, const std::string& body, bool expand_ranges) {
  BodyParts parts;
  const auto tokens = whitespace_tokens(body);
  std::size_t i = 0;
  for (; i < tokens.size(); ++i) {
    const std::string& tok = tokens[i];
    if (tok == "if" || tok == "in" || tok == "using") break;
    if (tok == "*") {
      for (const auto& v : ws.dataset().variables) parts.varlist.push_back(v.name());
      continue;
    }
    const auto dash = tok.find('-');
    if (expand_ranges && dash != std::string::npos && dash > 0 && dash + 1 < tok.size()) {
      const std::string a = tok.substr(0, dash), b = tok.substr(dash + 1);
      const std::size_t ia = ws.dataset().index_of(a), ib = ws.dataset().index_of(b);
      if (ia == 0 || ib == 0) fail("variable range " + tok + " has unknown endpoints");
      if (ib < ia) fail("variable range " + tok + " runs backwards");
      for (std::size_t k = ia; k <= ib; ++k)
        parts.varlist.push_back(ws.dataset().var(k).name());
      continue;
    }
    parts.varlist.push_back(tok);
  }
  for (; i < tokens.size(); ++i) {
    if (tokens[i] == "if") {
      if (i + 1 >= tokens.size()) fail("if needs a mask variable name");
      const std::string mask_var = tokens[++i];
      const std::size_t idx = ws.dataset().index_of(mask_var);
      if (idx == 0) fail("variable not found: " + mask_var);
      const Variable& mv = ws.dataset().var(idx);
      if (is_string(mv.stype())) fail("if needs a numeric mask variable");
      std::vector<char> mask(ws.dataset().nobs, 0);
      for (std::size_t j = 0; j < ws.dataset().nobs; ++j)
        mask[j] = !mv.missing_code(j) && mv.as_double(j) != 0.0;
      parts.restriction = SampleRestriction::Mask(std::move(mask));
    } else if (tokens[i] == "in") {
      if (i + 1 >= tokens.size()) fail("in needs a range like 5/20");
      const std::string spec = tokens[++i];
      const auto slash = spec.find('/');
      std::size_t first, last;
      if (slash == std::string::npos) {
        first = last = static_cast<std::size_t>(parse_int(spec, "in"));
      } else {
        first = static_cast<std::size_t>(parse_int(spec.substr(0, slash), "in"));
        last = static_cast<std::size_t>(parse_int(spec.substr(slash + 1), "in"));
      }
      parts.restriction = SampleRestriction::InRange(first, last);
    } else if (tokens[i] == "using") {
      for (++i; i < tokens.size(); ++i) parts.leftovers.push_back(tokens[i]);
      break;
    } else {
      fail("unexpected token '" + tokens[i] + "'");
    }
  }
  return parts;
}

bridge::CopyOptions parse_copy_options(const std::string& optstr, unsigned threads) {
  bridge::CopyOptions copy;
  copy.threads = threads;
  auto opts = parse_options(optstr);
  for (auto& o : opts) {
    if (opt_is(o, "destination", 4)) {
      o.consumed = true;
      copy.destination = o.arg;
    } else if (opt_is(o, "source", 6)) {
      o.consumed = true;
      copy.source = o.arg;
    } else if (opt_is(o, "cols", 4)) {
      o.consumed = true;
      copy.cols = whitespace_tokens(o.arg);
    } else if (opt_is(o, "nolabel", 5)) {
      o.consumed = true;
      copy.nolabel = true;
    } else if (opt_is(o, "nomissing", 6)) {
      o.consumed = true;
      copy.nomissing = true;
    } else if (opt_is(o, "doubleonly", 6)) {
      o.consumed = true;
      copy.doubleonly = true;
    } else if (opt_is(o, "replace", 7)) {
      o.consumed = true;
      copy.replace = true;
    } else if (opt_is(o, "clear", 5)) {
      o.consumed = true;
      copy.clear = true;
    }
  }
  reject_unconsumed(opts);
  return copy;
}

}  // namespace

void Shell::cmd_transfer(const std::string& verb, const std::string& rest) {
  auto [body, optstr] = split_options(rest);
  bridge::CopyOptions copy = parse_copy_options(optstr, cfg_.thread_limit);

  bridge::TransferReport rep;
  if (verb == "PutMatToMat" || verb == "GetMatFromMat") {
    const auto tokens = whitespace_tokens(body);
    if (tokens.size() != 1) fail(verb + " needs exactly one host matrix name");
    rep = verb == "PutMatToMat" ? bridge::put_mat_to_mat(ws_, scope_, tokens[0], copy)
                                : bridge::get_mat_from_mat(ws_, scope_, tokens[0], copy);
    out_ << rep.line() << "\n";
    return;
  }

  const bool put_side = verb == "PutVarsToDF" || verb == "PutVarsToMat";
  BodyParts parts = parse_body(ws_, body, /*expand_ranges=*/put_side);
  if (!parts.leftovers.empty()) fail(verb + " does not take 'using'");
  if (parts.varlist.empty()) {
    if (!put_side) fail(verb + " needs a varlist");
    for (const auto& v : ws_.dataset().variables) parts.varlist.push_back(v.name());
  }

  if (verb == "PutVarsToDF")
    rep = bridge::put_vars_to_df(ws_, scope_, parts.varlist, parts.restriction, copy);
  else if (verb == "GetVarsFromDF")
    rep = bridge::get_vars_from_df(ws_, scope_, parts.varlist, parts.restriction, copy);
  else if (verb == "PutVarsToMat")
    rep = bridge::put_vars_to_mat(ws_, scope_, parts.varlist, parts.restriction, copy);
  else
    rep = bridge::get_vars_from_mat(ws_, scope_, parts.varlist, parts.restriction, copy);
  out_ << rep.line() << "\n";
}

void Shell::cmd_jl_save(const std::string& rest) {
  auto [body, optstr] = split_options(rest);
  const auto tokens = whitespace_tokens(body);
  if (tokens.size() > 1) fail("jl save takes at most one DataFrame name");
  bridge::CopyOptions copy = parse_copy_options(optstr, cfg_.thread_limit);
  if (copy.replace || copy.clear || !copy.cols.empty() || !copy.source.empty() ||
      !copy.destination.empty())
    fail("jl save accepts only nolabel, nomissing, and doubleonly");
  const std::string name = tokens.empty() ? "df" : tokens[0];
  bridge::save_df(ws_, scope_, name, copy);
  out_ << "Data saved to DataFrame " << name << "\n";
}

void Shell::cmd_jl_use(const std::string& rest) {
  auto [body, optstr] = split_options(rest);
  bridge::CopyOptions copy = parse_copy_options(optstr, cfg_.thread_limit);

  // Forms: "jl use df[, clear]" and "jl use varlist using df[, clear]".
  std::vector<std::string> varlist;
  std::string dfname;
  const auto tokens = whitespace_tokens(body);
  const auto using_at = std::find(tokens.begin(), tokens.end(), std::string("using"));
  if (using_at == tokens.end()) {
    if (tokens.size() != 1) fail("jl use needs a DataFrame name");
    dfname = tokens[0];
  } else {
    varlist.assign(tokens.begin(), using_at);
    if (varlist.empty()) fail("jl use: varlist before 'using' is empty");
    if (using_at + 1 == tokens.end() || using_at + 2 != tokens.end())
      fail("jl use: expected exactly one DataFrame name after 'using'");
    dfname = *(using_at + 1);
  }
  bridge::use_df(ws_, scope_, dfname, varlist, copy);
  out_ << "(dataset replaced from DataFrame " << dfname << ")\n";
}

void Shell::cmd_obs(const std::string& rest) {
  const std::int64_t n = parse_int(rest, "obs");
  if (n < 0) fail("obs must be nonnegative");
  ws_.set_obs(static_cast<std::size_t>(n));
}

void Shell::cmd_genvar(const std::string& rest) {
  const auto eq = rest.find('=');
  if (eq == std::string::npos) fail("genvar syntax: genvar name type = rule");
  const auto head = whitespace_tokens(rest.substr(0, eq));
  if (head.size() != 2) fail("genvar syntax: genvar name type = rule");
  const auto stype = storage_from_name(head[1]);
  if (!stype) fail("unknown storage type '" + head[1] + "'");
  const auto rule = tokenize_quoted(trim(rest.substr(eq + 1)));
  if (rule.empty()) fail("genvar needs a fill rule (seq, const, normal, uniformint)");

  ws_.create_variable(head[0], *stype);
  Variable& var = ws_.dataset().var(ws_.dataset().index_of(head[0]));
  const std::size_t n = ws_.dataset().nobs;

  const std::string& kind = rule[0].first;
  if (is_string(*stype)) {
    if (kind != "const" || rule.size() != 2) fail("string genvar supports: const \"text\"");
    for (std::size_t i = 0; i < n; ++i) var.set_str(i, rule[1].first);
    return;
  }
  if (kind == "seq") {
    if (rule.size() != 1) fail("seq takes no arguments");
    for (std::size_t i = 0; i < n; ++i)
      store_cell_from_double(var, i, static_cast<double>(i + 1));
  } else if (kind == "const") {
    if (rule.size() != 2) fail("const takes one value");
    const double v = parse_double(rule[1].first, "const");
    for (std::size_t i = 0; i < n; ++i) store_cell_from_double(var, i, v);
  } else if (kind == "normal") {
    if (rule.size() != 2) fail("normal takes a seed");
    std::mt19937_64 rng(static_cast<std::uint64_t>(parse_int(rule[1].first, "seed")));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) store_cell_from_double(var, i, normal(rng));
  } else if (kind == "uniformint") {
    if (rule.size() != 4) fail("uniformint takes min, max, and a seed");
    const std::int64_t a = parse_int(rule[1].first, "min"), b = parse_int(rule[2].first, "max");
    if (b < a) fail("uniformint range runs backwards");
    std::mt19937_64 rng(static_cast<std::uint64_t>(parse_int(rule[3].first, "seed")));
    std::uniform_int_distribution<std::int64_t> dist(a, b);
    for (std::size_t i = 0; i < n; ++i)
      store_cell_from_double(var, i, static_cast<double>(dist(rng)));
  } else {
    fail("unknown fill rule '" + kind + "'");
  }
}

void Shell::cmd_matrix(const std::string& rest) {
  auto tokens = whitespace_tokens(rest);
  if (!tokens.empty() && tokens[0] == "define") tokens.erase(tokens.begin());
  if (tokens.size() == 3) {
    const auto rows = parse_int(tokens[1], "rows"), cols = parse_int(tokens[2], "cols");
    if (rows < 1 || cols < 1) fail("matrix dimensions must be at least 1x1");
    ws_.define_matrix(tokens[0], static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
    return;
  }
  if (tokens.size() == 5 && tokens[0] == "set") {
    HostMatrix& m = ws_.matrix(tokens[1]);
    const auto i = parse_int(tokens[2], "row"), j = parse_int(tokens[3], "col");
    if (i < 1 || static_cast<std::size_t>(i) > m.rows || j < 1 ||
        static_cast<std::size_t>(j) > m.cols)
      fail("matrix subscript out of range");
    m.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
        parse_double(tokens[4], "value");
    return;
  }
  fail("matrix syntax: matrix [define] name rows cols | matrix set name i j value");
}

void Shell::cmd_scalar(const std::string& rest) {
  const auto tokens = whitespace_tokens(rest);
  if (tokens.size() != 2) fail("scalar syntax: scalar name value");
  ws_.define_scalar(tokens[0], parse_double(tokens[1], "value"));
}

void Shell::cmd_local(const std::string& rest) {
  auto [name, value] = split_word(rest);
  if (name.empty()) fail("local needs a name");
  if (!is_identifier(name)) fail("invalid identifier '" + name + "'");
  if (value.empty()) ws_.current_frame().locals.erase(name);
  else ws_.set_local(name, value);
}

void Shell::cmd_global(const std::string& rest) {
  auto [name, value] = split_word(rest);
  if (name.empty()) fail("global needs a name");
  if (!is_identifier(name)) fail("invalid identifier '" + name + "'");
  ws_.set_global(name, value);
}

void Shell::cmd_label(const std::string& rest) {
  auto [sub, remainder] = split_word(rest);
  if (sub == "define") {
    auto tokens = tokenize_quoted(remainder);
    if (tokens.size() < 3 || tokens.size() % 2 == 0)
      fail("label define syntax: label define name code label [code label ...]");
    std::map<std::int32_t, std::string> labels;
    for (std::size_t k = 1; k + 1 < tokens.size(); k += 2) {
      const std::int64_t code = parse_int(tokens[k].first, "label code");
      labels[static_cast<std::int32_t>(code)] = tokens[k + 1].first;
    }
    ws_.label_define(tokens[0].first, std::move(labels));
    return;
  }
  if (sub == "values") {
    const auto tokens = whitespace_tokens(remainder);
    if (tokens.size() != 2) fail("label values syntax: label values varname tablename");
    ws_.label_attach(tokens[0], tokens[1]);
    return;
  }
  fail("label syntax: label define … | label values …");
}

void Shell::cmd_use_dataset(const std::string& rest) {
  auto [body, optstr] = split_options(rest);
  bool clear = false;
  auto opts = parse_options(optstr);
  for (auto& o : opts)
    if (opt_is(o, "clear", 5)) {
      o.consumed = true;
      clear = true;
    }
  reject_unconsumed(opts);
  if (body.empty()) fail("use needs a file path");
  if (ws_.dataset_dirty() && !clear) fail("data in memory would be lost");
  ws_.load_dataset(body);
}

void Shell::cmd_save_dataset(const std::string& rest) {
  const std::string path = trim(rest);
  if (path.empty()) fail("save needs a file path");
  ws_.store_dataset(path);
  ws_.clear_dirty();
  out_ << "file " << path << " saved\n";
}

void Shell::cmd_list(const std::string& rest) {
  BodyParts parts = parse_body(ws_, rest, /*expand_ranges=*/true);
  if (!parts.leftovers.empty()) fail("list does not take 'using'");
  if (parts.varlist.empty())
    for (const auto& v : ws_.dataset().variables) parts.varlist.push_back(v.name());
  if (parts.varlist.empty()) fail("no variables defined");

  std::vector<std::size_t> idx;
  for (const auto& name : parts.varlist) {
    const std::size_t i = ws_.dataset().index_of(name);
    if (i == 0) fail("variable not found: " + name);
    idx.push_back(i);
  }
  parts.restriction.validate(ws_.dataset().nobs);
  const auto selected = parts.restriction.selected(ws_.dataset().nobs);

  auto cell_text = [&](const Variable& v, std::size_t i) -> std::string {
    if (is_string(v.stype())) return v.str_cell(i).bytes;
    if (auto code = v.missing_code(i)) return missing_display(*code);
    if (!v.label_table().empty())
      return ws_.label_lookup(v.name(), static_cast<std::int32_t>(v.raw_int(i)));
    if (is_integer(v.stype())) return std::to_string(v.raw_int(i));
    return format_host_double(v.as_double(i));
  };

  std::vector<std::size_t> widths(idx.size());
  std::vector<std::vector<std::string>> cells(idx.size());
  for (std::size_t c = 0; c < idx.size(); ++c) {
    const Variable& v = ws_.dataset().var(idx[c]);
    widths[c] = v.name().size();
    for (std::size_t j : selected) {
      cells[c].push_back(cell_text(v, j - 1));
      widths[c] = std::max(widths[c], cells[c].back().size());
    }
  }

  const std::size_t obs_w = std::to_string(ws_.dataset().nobs).size() + 1;
  std::string header(obs_w + 1, ' ');
  for (std::size_t c = 0; c < idx.size(); ++c) {
    const std::string& name = ws_.dataset().var(idx[c]).name();
    header += "  " + std::string(widths[c] - name.size(), ' ') + name;
  }
  out_ << header << "\n";
  for (std::size_t r = 0; r < selected.size(); ++r) {
    std::string num = std::to_string(selected[r]) + ".";
    std::string line = std::string(obs_w + 1 - num.size(), ' ') + num;
    for (std::size_t c = 0; c < idx.size(); ++c)
      line += "  " + std::string(widths[c] - cells[c][r].size(), ' ') + cells[c][r];
    out_ << line << "\n";
  }
}

void Shell::cmd_describe() {
  out_ << "Observations: " << ws_.dataset().nobs << "\n";
  out_ << "Variables:    " << ws_.dataset().nvar() << "\n";
  for (const auto& v : ws_.dataset().variables) {
    out_ << "  " << v.name() << "  " << storage_name(v.stype());
    if (!v.label_table().empty()) out_ << "  labels:" << v.label_table();
    out_ << "\n";
  }
}

void Shell::cmd_display(const std::string& rest) {
  std::string line;
  for (const auto& [text, quoted] : tokenize_quoted(rest)) {
    if (quoted) {
      line += text;
      continue;
    }
    try {
      line += format_host_double(parse_double(text, "display"));
      continue;
    } catch (const error&) {
    }
    if (ws_.has_scalar(text)) {
      line += format_host_double(ws_.scalar(text));
      continue;
    }
    fail("display: unknown name '" + text + "'");
  }
  out_ << line << "\n";
}

void Shell::cmd_bench(const std::string& rest) {
  auto_start();
  auto [body, optstr] = split_options(rest);
  const auto tokens = whitespace_tokens(body);
  if (tokens.size() != 1 || (tokens[0] != "xqx" && tokens[0] != "copy"))
    fail("bench syntax: bench xqx|copy, n(#) m(#) seed(#) [copy options]");

  std::size_t n = 0, m = 0;
  std::uint64_t seed = 1;
  std::string optrest;
  auto opts = parse_options(optstr);
  std::string passthrough;
  for (auto& o : opts) {
    if (o.name == "n") {
      o.consumed = true;
      n = static_cast<std::size_t>(parse_int(o.arg, "n()"));
    } else if (o.name == "m") {
      o.consumed = true;
      m = static_cast<std::size_t>(parse_int(o.arg, "m()"));
    } else if (o.name == "seed") {
      o.consumed = true;
      seed = static_cast<std::uint64_t>(parse_int(o.arg, "seed()"));
    } else {
      passthrough += o.name;
      if (o.has_arg) passthrough += "(" + o.arg + ")";
      passthrough += " ";
      o.consumed = true;
    }
  }
  if (n == 0 || m == 0) fail("bench needs n() and m() of at least 1");

  if (tokens[0] == "xqx") {
    if (!trim(passthrough).empty()) fail("bench xqx takes only n(), m(), and seed()");
    ws_.push_frame();
    try {
      GateSession gate(ws_);
      const auto rep = bench::bench_xqx(ws_, scope_, gate, n, m, seed);
      char buf[192];
      std::snprintf(buf, sizeof buf,
                    "bench xqx: n=%zu m=%zu guest_secs=%.6f oracle_secs=%.6f max_rel=%.3e",
                    rep.n, rep.m, rep.guest_secs, rep.oracle_secs, rep.max_rel_diff);
      out_ << buf << "\n";
    } catch (...) {
      ws_.pop_frame();
      throw;
    }
    ws_.pop_frame();
    return;
  }

  const auto copy = parse_copy_options(trim(passthrough), cfg_.thread_limit);
  const auto rep = bench::bench_copy(ws_, scope_, n, m, seed, copy);
  out_ << "bench copy: " << rep.line() << "\n";
}

void Shell::cmd_help() {
  out_ << "host commands: obs N | genvar name type = rule | matrix [define] name r c |\n"
          "  matrix set name i j v | scalar name v | local name [value] | global name value |\n"
          "  label define name code label ... | label values var name | use path[, clear] |\n"
          "  save path | list [varlist] [if var] [in a/b] | describe | display ... |\n"
          "  bench xqx|copy, n() m() seed() | help | exit\n"
          "guest commands: jl: expr | _jl: expr | jl (interactive) |\n"
          "  jl start[, threads(#|auto)] | jl GetEnv | jl SetEnv [name] |\n"
          "  jl AddPkg name[, minver(X.Y.Z)] | jl save [df][, nolabel nomissing doubleonly] |\n"
          "  jl use [varlist using] df[, clear] | jl PutVarsToDF/GetVarsFromDF/PutVarsToMat/\n"
          "  GetVarsFromMat/PutMatToMat/GetMatFromMat ...\n";
}

void Shell::prefix_eval(const std::string& text) {
  auto_start();
  const std::string trimmed = trim(text);
  if (trimmed.empty()) fail("empty expression");
  if (trimmed[0] == '?') {
    out_ << guest::help_doc(trim(trimmed.substr(1))) << "\n";
    return;
  }
  if (guest::check_complete(trimmed) == guest::Completeness::incomplete)
    fail("expression is incomplete (continuation is only available in the interactive session)");
  auto ast = guest::parse(trimmed);
  scope_.mode = guest::ScopingMode::soft;
  guest::softscope_transform(ast, scope_.global_names());

  ws_.push_frame();
  guest::EvalResult result;
  try {
    GateSession gate(ws_);
    result = guest::evaluate(ast, scope_, &gate);
  } catch (...) {
    ws_.pop_frame();
    throw;
  }
  if (!result.out.empty()) {
    out_ << result.out;
    if (result.out.back() != '\n') out_ << "\n";
  }
  if (!result.suppress && !result.value.is_nothing()) out_ << result.value.display() << "\n";
  ws_.promote_frame();
}

void Shell::raw_eval(const std::string& text) {
  auto_start();
  const std::string trimmed = trim(text);
  if (trimmed.empty()) fail("empty expression");
  if (guest::check_complete(trimmed) == guest::Completeness::incomplete)
    fail("expression is incomplete (continuation is only available in the interactive session)");
  auto ast = guest::parse(trimmed);
  scope_.mode = guest::ScopingMode::strict;

  ws_.push_frame();
  guest::EvalResult result;
  try {
    GateSession gate(ws_);
    result = guest::evaluate(ast, scope_, &gate);
  } catch (...) {
    ws_.pop_frame();
    throw;
  }
  if (!result.out.empty()) {
    out_ << result.out;
    if (result.out.back() != '\n') out_ << "\n";
  }
  ws_.pop_frame();  // locals written through the gate are discarded, not promoted
}

void Shell::enter_guest_mode() {
  auto_start();
  ws_.push_frame();
  guest_mode_ = true;
  continuing_ = false;
  pending_.clear();
  out_ << std::string(24, '-') << " guest session (type exit() to exit) " << std::string(24, '-')
       << "\n";
}

void Shell::leave_guest_mode() {
  ws_.promote_frame();  // pending st_local names land in the caller frame
  guest_mode_ = false;
  continuing_ = false;
  pending_.clear();
  out_ << std::string(86, '-') << "\n";
}

void Shell::feed_guest_line(const std::string& line) {
  if (echo_input_) out_ << (continuing_ ? "... " : "jl> . ") << line << "\n";
  const std::string trimmed = trim(line);
  if (!continuing_ && trimmed.empty()) return;

  if (!continuing_ && trimmed[0] == '?') {
    out_ << guest::help_doc(trim(trimmed.substr(1))) << "\n";
    return;
  }

  pending_ = continuing_ ? pending_ + "\n" + line : line;
  const auto completeness = guest::check_complete(pending_);
  if (completeness == guest::Completeness::incomplete) {
    continuing_ = true;
    return;
  }
  const std::string src = pending_;
  pending_.clear();
  continuing_ = false;
  try {
    run_guest_program(src);
  } catch (const error& e) {
    emit_error(e.what());
  }
}

void Shell::run_guest_program(const std::string& src) {
  auto ast = guest::parse(src);  // no local interpolation in interactive mode
  scope_.mode = guest::ScopingMode::soft;
  guest::softscope_transform(ast, scope_.global_names());
  GateSession gate(ws_);  // bound to the session frame pushed at entry
  guest::EvalResult result = guest::evaluate(ast, scope_, &gate);
  if (!result.out.empty()) {
    out_ << result.out;
    if (result.out.back() != '\n') out_ << "\n";
  }
  if (!result.suppress && !result.value.is_nothing()) out_ << result.value.display() << "\n";
  if (result.exit_requested) leave_guest_mode();
}

int Shell::run_script(std::istream& in) {
  echo_input_ = true;
  std::string line;
  while (std::getline(in, line) && !quit_) feed_line(line);
  if (guest_mode_) leave_guest_mode();
  return errors_ == 0 ? 0 : 1;
}

void Shell::run_interactive(std::istream& in) {
  echo_input_ = false;
  std::string line;
  while (!quit_) {
    out_ << (guest_mode_ ? (continuing_ ? "... " : "jl> . ") : ". ") << std::flush;
    if (!std::getline(in, line)) break;
    feed_line(line);
  }
  if (guest_mode_) leave_guest_mode();
}

}  // namespace statbridge
