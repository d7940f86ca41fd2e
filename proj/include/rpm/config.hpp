// Experiment configuration: a sectioned key = value document with typed
// getters and a canonical hash for report provenance.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace rpm {

class Config {
 public:
  static Config parse(std::istream& in);
  static Config parse_string(const std::string& text);
  static Config parse_file(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback = "") const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  std::vector<double> get_doubles(const std::string& section, const std::string& key) const;
  std::vector<std::uint64_t> get_seeds(const std::string& section,
                                       const std::string& key) const;
  std::vector<std::string> get_list(const std::string& section,
                                    const std::string& key) const;

  void set(const std::string& section, const std::string& key, const std::string& value);

  // Sorted "section.key = value" rendering; hashing this makes the
  // provenance hash independent of formatting and comment noise.
  std::string canonical() const;
  std::uint64_t hash() const;

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

}  // namespace rpm
