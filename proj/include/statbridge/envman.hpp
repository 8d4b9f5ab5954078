#pragma once

#include <optional>
#include <string>
#include <vector>

namespace statbridge::envman {

struct SemVer {
  unsigned major = 0, minor = 0, patch = 0;

  auto operator<=>(const SemVer&) const = default;
  std::string str() const;
  static std::optional<SemVer> parse(const std::string& text);  // "X.Y.Z"
};

struct ManifestEntry {
  std::string name;
  SemVer version;
  bool operator==(const ManifestEntry&) const = default;
};

struct EnvStatus {
  std::string name;  // "." for the default environment
  std::string path;
  std::vector<ManifestEntry> manifest;  // sorted by name
};

// Directory-backed package environments over a local file registry.
//
// Layout: the default environment is the env root itself; named
// environments are subdirectories of it. Each environment holds a
// Manifest.txt of "name major.minor.patch" lines, sorted by name.
// The registry maps package name -> file of available versions, one per
// line. "Installing" records the manifest entry and creates an empty
// marker directory; no code is fetched.
class EnvManager {
 public:
  EnvManager(std::string env_root, std::string registry_root);

  // Switch environments, creating and seeding new ones with the two
  // default packages. name absent or "." means the default environment.
  EnvStatus set_env(const std::string& name);
  EnvStatus get_env() const;

  // Install name at the registry's highest version, or upgrade when the
  // installed version falls below minver. No-op when already satisfied.
  EnvStatus add_pkg(const std::string& name, std::optional<SemVer> minver);

  std::vector<SemVer> registry_versions(const std::string& package) const;
  const std::string& current_name() const { return current_; }
  std::string current_path() const;

  static const char* const kDefaultPackages[2];

 private:
  void ensure_current_exists();
  std::vector<ManifestEntry> read_manifest(const std::string& env_path) const;
  void write_manifest(const std::string& env_path, const std::vector<ManifestEntry>&) const;
  std::string env_path_for(const std::string& name) const;

  std::string env_root_;
  std::string registry_root_;
  std::string current_ = ".";
};

}  // namespace statbridge::envman
