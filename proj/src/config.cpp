#include "selfint/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "selfint/errors.hpp"
#include "selfint/process.hpp"

namespace selfint {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults(const std::string& name) {
  ExperimentConfig c;
  c.name_ = name;
  c.base_ = std::filesystem::current_path();
  c.values_["experiment.name"] = name;
  return c;
}

ExperimentConfig ExperimentConfig::parse(std::istream& in, const std::filesystem::path& base_dir) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ParseError(e.message(), static_cast<int>(e.line()));
  }
  ExperimentConfig c;
  c.base_ = base_dir;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ParseError("key '" + section + "' outside a section", 0);
    for (const auto& [key, value] : body) c.values_[section + "." + key] = trim(value.data());
  }
  auto name = c.text("experiment.name");
  if (!name || name->empty()) throw ParseError("[experiment] name is required", 0);
  c.name_ = *name;
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'", 0);
  auto dir = path.parent_path();
  if (dir.empty()) dir = ".";
  return parse(in, dir);
}

std::optional<std::string> ExperimentConfig::text(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string ExperimentConfig::text(const std::string& key, const std::string& fallback) const {
  return text(key).value_or(fallback);
}

double ExperimentConfig::number(const std::string& key, double fallback) const {
  auto v = text(key);
  if (!v) return fallback;
  char* end = nullptr;
  const double out = std::strtod(v->c_str(), &end);
  if (end == v->c_str() || *end != '\0') throw ParseError(key + ": not a number: '" + *v + "'", 0);
  return out;
}

long ExperimentConfig::integer(const std::string& key, long fallback) const {
  auto v = text(key);
  if (!v) return fallback;
  char* end = nullptr;
  const double d = std::strtod(v->c_str(), &end);  // accepts 1e6
  if (end == v->c_str() || *end != '\0' || d != static_cast<double>(static_cast<long>(d)))
    throw ParseError(key + ": not an integer: '" + *v + "'", 0);
  return static_cast<long>(d);
}

std::optional<std::filesystem::path> ExperimentConfig::file(const std::string& key) const {
  auto v = text(key);
  if (!v) return std::nullopt;
  std::filesystem::path p(*v);
  if (p.is_relative()) p = base_ / p;
  if (!std::filesystem::exists(p)) throw ParseError(key + ": no such file '" + p.string() + "'", 0);
  return p;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  values_[key] = value;
  if (key == "experiment.name") name_ = value;
}

long ExperimentConfig::horizon(long fallback) const {
  const long h = integer("run.horizon", fallback);
  if (h < 1) throw ParseError("run.horizon must be at least 1", 0);
  return h;
}

int ExperimentConfig::replicas() const {
  const long r = integer("run.replicas", 8);
  if (r < 1) throw ParseError("run.replicas must be at least 1", 0);
  return static_cast<int>(r);
}

std::uint64_t ExperimentConfig::seed() const {
  const long s = integer("run.seed", 1);
  if (s < 0) throw ParseError("run.seed must be nonnegative", 0);
  return static_cast<std::uint64_t>(s);
}

std::vector<long> ExperimentConfig::checkpoints(long horizon) const {
  const std::string rule = text("run.checkpoints", "dyadic");
  std::vector<long> out;
  std::stringstream parts(rule);
  for (std::string item; std::getline(parts, item, ',');) {
    item = trim(item);
    if (item.empty()) continue;
    if (item == "dyadic") {
      const auto d = dyadic_checkpoints(horizon);
      out.insert(out.end(), d.begin(), d.end());
      continue;
    }
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end == item.c_str() || *end != '\0' || v != static_cast<double>(static_cast<long>(v)))
      throw ParseError("run.checkpoints: bad entry '" + item + "'", 0);
    out.push_back(static_cast<long>(v));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  std::erase_if(out, [&](long n) { return n < 2 || n > horizon; });
  return out;
}

std::filesystem::path ExperimentConfig::output() const {
  auto v = text("run.output");
  if (!v) return std::filesystem::path("out") / name_;
  std::filesystem::path p(*v);
  return p.is_relative() ? base_ / p : p;
}

}  // namespace selfint
