#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace selfint {

// Sectioned key-value experiment config (INI syntax). Keys are addressed as
// "section.key"; file paths are resolved against the config's directory.
//
//   [experiment] name, plus fixture paths (landscape, chain, game, interaction)
//   [kernel]     family-specific parameters (shape, epsilon, observation, ...)
//   [schedule]   beta0, rate (a number or "admissible")
//   [weights]    alpha
//   [run]        horizon, replicas, seed, checkpoints, output
class ExperimentConfig {
 public:
  // A config that only names the experiment; every parameter takes its default.
  static ExperimentConfig defaults(const std::string& name);
  // Throws ParseError (with the line for syntax errors) on malformed input.
  static ExperimentConfig parse(std::istream& in, const std::filesystem::path& base_dir);
  static ExperimentConfig load(const std::filesystem::path& path);

  const std::string& name() const { return name_; }

  std::optional<std::string> text(const std::string& key) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key, double fallback) const;
  long integer(const std::string& key, long fallback) const;
  // Resolved path; ParseError if the key is set but the file does not exist.
  std::optional<std::filesystem::path> file(const std::string& key) const;
  void set(const std::string& key, const std::string& value);

  long horizon(long fallback) const;
  int replicas() const;  // default 8
  std::uint64_t seed() const;  // default 1
  // "dyadic" (the default), explicit indices, or a comma-separated mix such
  // as "dyadic, 1000"; clipped to [2, horizon] and sorted.
  std::vector<long> checkpoints(long horizon) const;
  std::filesystem::path output() const;  // default "out/<name>"

 private:
  std::string name_;
  std::filesystem::path base_;
  std::map<std::string, std::string> values_;
};

}  // namespace selfint
