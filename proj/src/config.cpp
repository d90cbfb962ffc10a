#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace almd {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open config file: " + path);
  return parse(in, path);
}

Config Config::parse(std::istream& in, const std::string& name) {
  Config cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::Parse, name + ":" + std::to_string(line_no) +
                                 ": expected `key = value`, got `" + line + "`");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      fail(ErrorKind::Parse,
           name + ":" + std::to_string(line_no) + ": empty key");
    cfg.set(key, value);
  }
  return cfg;
}

void Config::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

std::optional<std::string> Config::get(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return v;
  return std::nullopt;
}

bool Config::has_prefix(const std::string& prefix) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const auto& kv) {
    return kv.first.rfind(prefix, 0) == 0;
  });
}

std::string Config::get_string(const std::string& key,
                               const std::string& dflt) const {
  auto v = get(key);
  return v ? *v : dflt;
}

double Config::get_double(const std::string& key, double dflt) const {
  auto v = get(key);
  if (!v) return dflt;
  try {
    std::size_t used = 0;
    double d = std::stod(*v, &used);
    if (used != v->size()) throw std::invalid_argument(*v);
    return d;
  } catch (const std::exception&) {
    fail(ErrorKind::Config, "config key " + key + ": bad number `" + *v + "`");
  }
}

int Config::get_int(const std::string& key, int dflt) const {
  auto v = get(key);
  if (!v) return dflt;
  try {
    std::size_t used = 0;
    int i = std::stoi(*v, &used);
    if (used != v->size()) throw std::invalid_argument(*v);
    return i;
  } catch (const std::exception&) {
    fail(ErrorKind::Config, "config key " + key + ": bad integer `" + *v + "`");
  }
}

std::uint64_t Config::get_uint64(const std::string& key,
                                 std::uint64_t dflt) const {
  auto v = get(key);
  if (!v) return dflt;
  try {
    std::size_t used = 0;
    unsigned long long u = std::stoull(*v, &used);
    if (used != v->size()) throw std::invalid_argument(*v);
    return u;
  } catch (const std::exception&) {
    fail(ErrorKind::Config, "config key " + key + ": bad integer `" + *v + "`");
  }
}

bool Config::get_bool(const std::string& key, bool dflt) const {
  auto v = get(key);
  if (!v) return dflt;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  fail(ErrorKind::Config, "config key " + key + ": bad boolean `" + *v + "`");
}

namespace {

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

std::vector<std::uint64_t> Config::get_uint64_list(
    const std::string& key, const std::vector<std::uint64_t>& dflt) const {
  auto v = get(key);
  if (!v) return dflt;
  std::vector<std::uint64_t> out;
  for (const auto& item : split_commas(*v)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoull(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      fail(ErrorKind::Config,
           "config key " + key + ": bad list element `" + item + "`");
    }
  }
  if (out.empty())
    fail(ErrorKind::Config, "config key " + key + ": empty list");
  return out;
}

std::vector<std::string> Config::get_string_list(
    const std::string& key, const std::vector<std::string>& dflt) const {
  auto v = get(key);
  if (!v) return dflt;
  auto out = split_commas(*v);
  if (out.empty())
    fail(ErrorKind::Config, "config key " + key + ": empty list");
  return out;
}

std::vector<std::pair<std::string, std::string>> Config::items() const {
  return entries_;
}

std::vector<std::pair<std::string, std::string>> Config::items_with_prefix(
    const std::string& prefix) const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& kv : entries_)
    if (kv.first.rfind(prefix, 0) == 0) out.push_back(kv);
  return out;
}

}  // namespace almd
