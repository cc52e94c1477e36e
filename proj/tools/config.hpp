#pragma once

#include "isolump/lumping.hpp"
#include "isolump/types.hpp"

#include "json.hpp"

#include <memory>
#include <set>
#include <string>
#include <vector>

namespace isolump::cli {

using Json = nlohmann::json;

/// Raw config text, kept for line references in error messages.
struct ConfigSource {
  std::string file;
  std::string text;
};

/// A JSON object inside a config file together with its key path.
/// Every accessor validates type and range and throws Error(config) with
/// "file:line: key.path: message" on failure.
class ConfigNode {
 public:
  ConfigNode(std::shared_ptr<const ConfigSource> source, std::shared_ptr<const Json> root, const Json* json,
             std::string path, std::size_t offset);

  static ConfigNode load(const std::string& file);

  bool has(const std::string& key) const;
  ConfigNode child(const std::string& key) const;
  const Json& raw() const { return *json_; }

  /// Fails on any key outside `allowed`.
  void allow_only(const std::set<std::string>& allowed) const;

  int get_int(const std::string& key, int fallback, int lo, int hi) const;
  double get_double(const std::string& key, double fallback, double lo, double hi) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback,
                         const std::vector<std::string>& choices = {}) const;
  /// A scalar or an array of integers.
  std::vector<Index> get_index_list(const std::string& key, const std::vector<Index>& fallback, Index lo,
                                    Index hi) const;
  std::vector<double> get_double_list(const std::string& key, const std::vector<double>& fallback, double lo,
                                      double hi) const;
  /// Lumping labels M, P<i>, H<k>, rowsum (one string or an array). H levels are checked against `dim`.
  std::vector<LumpSpec> get_lumps(const std::string& key, const std::vector<std::string>& fallback, int dim) const;

  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

 private:
  std::string key_path(const std::string& key) const;
  std::size_t find_key(const std::string& key) const;
  int line_of(const std::string& key) const;
  const Json& at(const std::string& key) const;

  std::shared_ptr<const ConfigSource> source_;
  std::shared_ptr<const Json> root_;
  const Json* json_;
  std::string path_;
  std::size_t offset_;  ///< where this object's key appears in the text
};

}  // namespace isolump::cli
