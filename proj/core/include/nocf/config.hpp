#pragma once

// YAML configuration: topology, check parameters and scenario parameters all
// live in one document. Loading collects every validation problem and
// reports each with the config path that caused it.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "nocf/bus.hpp"
#include "nocf/policy.hpp"
#include "nocf/system.hpp"

namespace nocf {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

struct ConfigDocument {
  YAML::Node root;
  std::string source = "<string>";
};

ConfigDocument parse_config(const std::string& text, std::string source = "<string>");
/// Throws ConfigError when the file cannot be read or parsed.
ConfigDocument load_config_file(const std::string& path);

/// Applies "dotted.path=value". Sequence elements are addressed by index
/// ("masters.0.name"). Missing map keys are created.
void apply_override(ConfigDocument& doc, std::string_view assignment);

std::string dump(const ConfigDocument& doc);

Topology load_topology(const ConfigDocument& doc);
Topology load_topology(const std::string& text);

/// Field reader that records located errors instead of throwing, so one load
/// reports every problem at once.
class ConfigReader {
 public:
  void error(const std::string& path, const std::string& message);
  bool ok() const { return errors_.empty(); }
  /// Throws ConfigError if any error was recorded.
  void finish() const;

  std::uint64_t u64(const YAML::Node& n, const std::string& path, std::uint64_t fallback = 0);
  Address address(const YAML::Node& n, const std::string& path, Address fallback = 0);
  bool boolean(const YAML::Node& n, const std::string& path, bool fallback = false);
  double real(const YAML::Node& n, const std::string& path, double fallback = 0.0);
  std::string string(const YAML::Node& n, const std::string& path, const std::string& fallback = {});
  std::vector<std::uint8_t> hex_bytes(const YAML::Node& n, const std::string& path);

  std::optional<SizeCode> size_code(const YAML::Node& n, const std::string& path);
  std::optional<PolicyRule> rule(const YAML::Node& n, const std::string& path);
  std::optional<AddressRequest> request(const YAML::Node& n, const std::string& path,
                                        std::optional<AccessKind> kind = std::nullopt);
  ReadyPattern ready(const YAML::Node& n, const std::string& path, std::uint64_t seed);
  std::optional<FilterVariant> variant(const YAML::Node& n, const std::string& path);

 private:
  std::vector<std::string> errors_;
};

/// Stable 64-bit string hash (FNV-1a) for deriving per-component seeds.
std::uint64_t stable_hash(std::string_view s);

}  // namespace nocf
