#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"

namespace almd {

// Line-oriented `key = value` configuration with dotted keys. `#` starts
// a comment; later assignments to the same key win.
class Config {
 public:
  static Config load(const std::string& path);
  static Config parse(std::istream& in, const std::string& name);

  void set(const std::string& key, const std::string& value);
  std::optional<std::string> get(const std::string& key) const;
  bool has(const std::string& key) const { return get(key).has_value(); }
  bool has_prefix(const std::string& prefix) const;

  // Typed access; throws ErrorKind::Config on unparseable values.
  std::string get_string(const std::string& key, const std::string& dflt) const;
  double get_double(const std::string& key, double dflt) const;
  int get_int(const std::string& key, int dflt) const;
  std::uint64_t get_uint64(const std::string& key, std::uint64_t dflt) const;
  bool get_bool(const std::string& key, bool dflt) const;
  std::vector<std::uint64_t> get_uint64_list(
      const std::string& key, const std::vector<std::uint64_t>& dflt) const;
  std::vector<std::string> get_string_list(
      const std::string& key, const std::vector<std::string>& dflt) const;

  // Keys in first-assignment order, with last-wins values applied.
  std::vector<std::pair<std::string, std::string>> items() const;
  std::vector<std::pair<std::string, std::string>> items_with_prefix(
      const std::string& prefix) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;  // ordered, unique keys
};

}  // namespace almd
