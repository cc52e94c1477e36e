#include "config.hpp"

#include "isolump/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace isolump::cli {

ConfigNode::ConfigNode(std::shared_ptr<const ConfigSource> source, std::shared_ptr<const Json> root, const Json* json,
                       std::string path, std::size_t offset)
    : source_(std::move(source)), root_(std::move(root)), json_(json), path_(std::move(path)), offset_(offset) {}

ConfigNode ConfigNode::load(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::config, file + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  auto source = std::make_shared<ConfigSource>(ConfigSource{file, ss.str()});
  std::shared_ptr<Json> root;
  try {
    root = std::make_shared<Json>(Json::parse(source->text));
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::config, file + ": " + e.what());
  }
  if (!root->is_object()) throw Error(ErrorKind::config, file + ":1: top level must be an object");
  const Json* ptr = root.get();
  return ConfigNode(source, root, ptr, "", 0);
}

std::string ConfigNode::key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

std::size_t ConfigNode::find_key(const std::string& key) const {
  const std::string quoted = "\"" + key.substr(0, key.find_first_of("[.")) + "\"";
  std::size_t pos = source_->text.find(quoted, offset_);
  if (pos == std::string::npos) pos = source_->text.find(quoted);
  return pos;
}

int ConfigNode::line_of(const std::string& key) const {
  std::size_t pos = find_key(key);
  if (pos == std::string::npos) pos = offset_;
  return 1 + static_cast<int>(std::count(source_->text.begin(), source_->text.begin() + static_cast<long>(pos), '\n'));
}

void ConfigNode::fail(const std::string& key, const std::string& message) const {
  throw Error(ErrorKind::config,
              source_->file + ":" + std::to_string(line_of(key)) + ": " + key_path(key) + ": " + message);
}

bool ConfigNode::has(const std::string& key) const { return json_->contains(key); }

const Json& ConfigNode::at(const std::string& key) const { return json_->at(key); }

ConfigNode ConfigNode::child(const std::string& key) const {
  if (!has(key)) fail(key, "missing section");
  const Json& j = at(key);
  if (!j.is_object()) fail(key, "expected an object");
  const std::size_t pos = find_key(key);
  return ConfigNode(source_, root_, &j, key_path(key), pos == std::string::npos ? offset_ : pos);
}

void ConfigNode::allow_only(const std::set<std::string>& allowed) const {
  for (const auto& item : json_->items()) {
    if (!allowed.count(item.key())) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      fail(item.key(), "unknown key (expected one of: " + list + ")");
    }
  }
}

int ConfigNode::get_int(const std::string& key, int fallback, int lo, int hi) const {
  if (!has(key)) return fallback;
  const Json& j = at(key);
  if (!j.is_number_integer()) fail(key, "expected an integer");
  const auto v = j.get<long long>();
  if (v < lo || v > hi) fail(key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(v);
}

double ConfigNode::get_double(const std::string& key, double fallback, double lo, double hi) const {
  if (!has(key)) return fallback;
  const Json& j = at(key);
  if (!j.is_number()) fail(key, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v) || v < lo || v > hi) {
    std::ostringstream os;
    os << "must lie in [" << lo << ", " << hi << "]";
    fail(key, os.str());
  }
  return v;
}

bool ConfigNode::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const Json& j = at(key);
  if (!j.is_boolean()) fail(key, "expected true or false");
  return j.get<bool>();
}

std::string ConfigNode::get_string(const std::string& key, const std::string& fallback,
                                   const std::vector<std::string>& choices) const {
  if (!has(key)) return fallback;
  const Json& j = at(key);
  if (!j.is_string()) fail(key, "expected a string");
  const auto v = j.get<std::string>();
  if (!choices.empty() && std::find(choices.begin(), choices.end(), v) == choices.end()) {
    std::string list;
    for (const auto& c : choices) list += (list.empty() ? "" : ", ") + c;
    fail(key, "\"" + v + "\" is not one of: " + list);
  }
  return v;
}

std::vector<Index> ConfigNode::get_index_list(const std::string& key, const std::vector<Index>& fallback, Index lo,
                                              Index hi) const {
  if (!has(key)) return fallback;
  const Json& j = at(key);
  std::vector<Index> out;
  auto take = [&](const Json& v, const std::string& where) {
    if (!v.is_number_integer()) fail(where, "expected an integer");
    const auto x = v.get<long long>();
    if (x < lo || x > hi) fail(where, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    out.push_back(static_cast<Index>(x));
  };
  if (j.is_array()) {
    if (j.empty()) fail(key, "must not be empty");
    for (std::size_t i = 0; i < j.size(); ++i) take(j[i], key + "[" + std::to_string(i) + "]");
  } else {
    take(j, key);
  }
  return out;
}

std::vector<double> ConfigNode::get_double_list(const std::string& key, const std::vector<double>& fallback,
                                                double lo, double hi) const {
  if (!has(key)) return fallback;
  const Json& j = at(key);
  if (!j.is_array() || j.empty()) fail(key, "expected a non-empty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string where = key + "[" + std::to_string(i) + "]";
    if (!j[i].is_number()) fail(where, "expected a number");
    const double v = j[i].get<double>();
    if (!std::isfinite(v) || v < lo || v > hi) fail(where, "out of range");
    out.push_back(v);
  }
  return out;
}

std::vector<LumpSpec> ConfigNode::get_lumps(const std::string& key, const std::vector<std::string>& fallback,
                                            int dim) const {
  std::vector<std::string> labels = fallback;
  if (has(key)) {
    const Json& j = at(key);
    labels.clear();
    if (j.is_string()) {
      labels.push_back(j.get<std::string>());
    } else if (!j.is_array() || j.empty()) {
      fail(key, "expected a label or a non-empty array of labels");
    }
    for (std::size_t i = 0; j.is_array() && i < j.size(); ++i) {
      if (!j[i].is_string()) fail(key + "[" + std::to_string(i) + "]", "expected a label string");
      labels.push_back(j[i].get<std::string>());
    }
  }
  std::vector<LumpSpec> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::string where = key + "[" + std::to_string(i) + "]";
    LumpSpec spec;
    try {
      spec = LumpSpec::parse(labels[i]);
    } catch (const Error&) {
      fail(where, "\"" + labels[i] + "\" is not a lumping label (M, P<i>, H<k>, rowsum)");
    }
    if (spec.kind == LumpSpec::Kind::hierarchical && spec.index > dim) {
      fail(where, "hierarchical level " + std::to_string(spec.index) + " exceeds the dimension " +
                      std::to_string(dim));
    }
    out.push_back(spec);
  }
  return out;
}

}  // namespace isolump::cli
