#include "statbridge/envman.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>

#include "statbridge/errors.hpp"

namespace statbridge::envman {

namespace fs = std::filesystem;

const char* const EnvManager::kDefaultPackages[2] = {"categorical-arrays", "dataframes-core"};

std::string SemVer::str() const {
  return std::to_string(major) + "." + std::to_string(minor) + "." + std::to_string(patch);
}

std::optional<SemVer> SemVer::parse(const std::string& text) {
  SemVer v;
  unsigned* parts[3] = {&v.major, &v.minor, &v.patch};
  const char* p = text.data();
  const char* end = text.data() + text.size();
  for (int k = 0; k < 3; ++k) {
    auto [next, ec] = std::from_chars(p, end, *parts[k]);
    if (ec != std::errc() || next == p) return std::nullopt;
    p = next;
    if (k < 2) {
      if (p == end || *p != '.') return std::nullopt;
      ++p;
    }
  }
  if (p != end) return std::nullopt;
  return v;
}

EnvManager::EnvManager(std::string env_root, std::string registry_root)
    : env_root_(std::move(env_root)), registry_root_(std::move(registry_root)) {}

std::string EnvManager::env_path_for(const std::string& name) const {
  if (name == ".") return env_root_;
  return (fs::path(env_root_) / name).string();
}

std::string EnvManager::current_path() const { return env_path_for(current_); }

std::vector<SemVer> EnvManager::registry_versions(const std::string& package) const {
  const fs::path file = fs::path(registry_root_) / package;
  std::ifstream in(file);
  if (!in) fail("package not in registry: " + package);
  std::vector<SemVer> versions;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    auto v = SemVer::parse(line);
    if (!v) fail("bad version '" + line + "' in registry entry " + package);
    versions.push_back(*v);
  }
  if (versions.empty()) fail("package not in registry: " + package);
  std::sort(versions.begin(), versions.end());
  return versions;
}

std::vector<ManifestEntry> EnvManager::read_manifest(const std::string& env_path) const {
  std::ifstream in(fs::path(env_path) / "Manifest.txt");
  if (!in) fail("no manifest in " + env_path);
  std::vector<ManifestEntry> entries;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    const auto space = line.find(' ');
    if (space == std::string::npos) fail("malformed manifest line: " + line);
    auto v = SemVer::parse(line.substr(space + 1));
    if (!v) fail("malformed manifest line: " + line);
    entries.push_back({line.substr(0, space), *v});
  }
  std::sort(entries.begin(), entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.name < b.name; });
  return entries;
}

void EnvManager::write_manifest(const std::string& env_path,
                                const std::vector<ManifestEntry>& entries) const {
  std::vector<ManifestEntry> sorted = entries;
  std::sort(sorted.begin(), sorted.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.name < b.name; });
  std::ofstream out(fs::path(env_path) / "Manifest.txt", std::ios::trunc);
  if (!out) fail("cannot write manifest in " + env_path);
  for (const auto& e : sorted) out << e.name << " " << e.version.str() << "\n";
}

void EnvManager::ensure_current_exists() {
  const std::string path = current_path();
  if (fs::exists(fs::path(path) / "Manifest.txt")) return;
  fs::create_directories(path);
  std::vector<ManifestEntry> seeded;
  for (const char* pkg : kDefaultPackages) {
    SemVer v{1, 0, 0};
    try {
      v = registry_versions(pkg).back();
    } catch (const error&) {
      // Default packages fall back to 1.0.0 when the registry lacks them.
    }
    seeded.push_back({pkg, v});
    fs::create_directories(fs::path(path) / pkg);
  }
  write_manifest(path, seeded);
}

EnvStatus EnvManager::set_env(const std::string& name) {
  std::string target = name.empty() ? "." : name;
  if (target != ".") {
    for (char c : target)
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-')
        fail("invalid environment name: " + target);
  }
  current_ = target;
  ensure_current_exists();
  return get_env();
}

EnvStatus EnvManager::get_env() const {
  EnvStatus status;
  status.name = current_;
  status.path = current_path();
  if (fs::exists(fs::path(status.path) / "Manifest.txt"))
    status.manifest = read_manifest(status.path);
  return status;
}

EnvStatus EnvManager::add_pkg(const std::string& name, std::optional<SemVer> minver) {
  ensure_current_exists();
  const auto versions = registry_versions(name);
  const SemVer newest = versions.back();
  if (minver && newest < *minver)
    fail("no registry version of " + name + " satisfies " + minver->str());

  auto manifest = read_manifest(current_path());
  auto it = std::find_if(manifest.begin(), manifest.end(),
                         [&](const ManifestEntry& e) { return e.name == name; });
  if (it == manifest.end()) {
    manifest.push_back({name, newest});
    fs::create_directories(fs::path(current_path()) / name);
    write_manifest(current_path(), manifest);
  } else if (minver && it->version < *minver) {
    it->version = newest;
    write_manifest(current_path(), manifest);
  }
  // Installed and satisfying the minimum (or no minimum): nothing to do.
  return get_env();
}

}  // namespace statbridge::envman
