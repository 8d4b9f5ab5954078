#pragma once

#include <iosfwd>
#include <string>

#include "statbridge/envman.hpp"
#include "statbridge/gate.hpp"
#include "statbridge/guest/interp.hpp"
#include "statbridge/workspace.hpp"

namespace statbridge {

struct SessionConfig {
  bool started = false;
  unsigned thread_limit = 1;  // fixed once started
  bool timing = false;        // append "r; t=…" after each command
  std::string env_root = "jlenv";
  std::string registry_root = "registry";
};

// The human-facing command layer: host plumbing commands, the jl family,
// the simulated guest REPL, and the bench harness. One shell owns one
// workspace and one guest scope.
class Shell {
 public:
  Shell(std::ostream& out, SessionConfig cfg);

  // One command or guest line, transcript-echoed when echo_input is on.
  void feed_line(const std::string& line);

  // Replays a script (one command per line, '#' comments); returns the
  // process exit code: 0 clean, 1 if any error line was emitted.
  int run_script(std::istream& in);

  // Terminal loop with prompts; input echo off.
  void run_interactive(std::istream& in);

  bool in_guest_mode() const { return guest_mode_; }
  Workspace& workspace() { return ws_; }
  guest::Scope& scope() { return scope_; }
  const SessionConfig& config() const { return cfg_; }
  std::size_t error_count() const { return errors_; }

 private:
  void dispatch(const std::string& line);
  void dispatch_host(const std::string& line);
  void handle_jl_command(const std::string& rest);
  void handle_host_command(const std::string& verb, const std::string& rest);

  void cmd_start(const std::string& rest);
  void cmd_get_env();
  void cmd_set_env(const std::string& rest);
  void cmd_add_pkg(const std::string& rest);
  void cmd_transfer(const std::string& verb, const std::string& rest);
  void cmd_jl_save(const std::string& rest);
  void cmd_jl_use(const std::string& rest);
  void cmd_obs(const std::string& rest);
  void cmd_genvar(const std::string& rest);
  void cmd_matrix(const std::string& rest);
  void cmd_scalar(const std::string& rest);
  void cmd_local(const std::string& rest);
  void cmd_global(const std::string& rest);
  void cmd_label(const std::string& rest);
  void cmd_use_dataset(const std::string& rest);
  void cmd_save_dataset(const std::string& rest);
  void cmd_list(const std::string& rest);
  void cmd_describe();
  void cmd_display(const std::string& rest);
  void cmd_bench(const std::string& rest);
  void cmd_help();

  void prefix_eval(const std::string& text);
  void raw_eval(const std::string& text);
  void enter_guest_mode();
  void leave_guest_mode();
  void feed_guest_line(const std::string& line);
  void run_guest_program(const std::string& src);

  void auto_start();
  void print_env_status(const envman::EnvStatus& status);
  void emit_error(const std::string& message);
  std::string interpolate_locals(const std::string& line) const;

  std::ostream& out_;
  SessionConfig cfg_;
  Workspace ws_;
  guest::Scope scope_;
  envman::EnvManager envman_;
  bool echo_input_ = true;
  bool guest_mode_ = false;
  std::string pending_;        // accumulated incomplete guest input
  bool continuing_ = false;
  bool quit_ = false;
  std::size_t errors_ = 0;
};

// Stata-flavored rendering of a host double: %.8g with the bare leading
// zero dropped, missing sentinels as "." / ".a" … ".z".
std::string format_host_double(double v);

}  // namespace statbridge
