#pragma once

#include <map>
#include <string>

namespace textdet {

// Flat key=value configuration: one assignment per line, '#' starts a
// comment, blank lines ignored, duplicate keys rejected. Typed getters fall
// back to the given default when the key is absent and throw input_error on
// values that fail to parse.
class Config {
 public:
  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace textdet
