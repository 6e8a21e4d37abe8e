// SPDX-License-Identifier: Apache-2.0

#ifndef MOFGCN_RUN_CONFIG_HPP
#define MOFGCN_RUN_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace mofgcn {

/// Flat `key = value` run configuration ('#' starts a comment). Flag
/// overrides are applied on top of the file values; the merged map is
/// snapshotted into the run manifest.
class RunConfig {
 public:
  RunConfig() = default;
  static RunConfig from_file(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) != 0u; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  std::size_t get_size(const std::string& key, std::size_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  /// Comma-separated list; empty value -> empty list.
  std::vector<std::string> get_list(const std::string& key) const;
  std::vector<std::size_t> get_size_list(const std::string& key,
                                         const std::vector<std::size_t>& fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// Writes out_dir/manifest.json describing the run (command, version, seed,
/// resolved config) before any result files are produced.
void write_manifest(const std::filesystem::path& out_dir, const std::string& command,
                    std::uint64_t seed, const std::filesystem::path& config_path,
                    const RunConfig& config, const std::vector<std::string>& argv_tail);

extern const char* const kToolVersion;

}  // namespace mofgcn

#endif  // MOFGCN_RUN_CONFIG_HPP
