#ifndef GMSFEM_CONFIG_HPP
#define GMSFEM_CONFIG_HPP

#include <map>
#include <string>
#include <vector>

namespace gmsfem {

/// Key-value config file with [section] tables. '#' starts a comment,
/// values are whitespace-separated tokens, repeated keys append a new entry.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text,
                             const std::string& origin = "<string>");

  bool has(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  long long get_int(const std::string& section, const std::string& key,
                    long long fallback) const;
  std::vector<double> get_list(const std::string& section,
                               const std::string& key) const;
  std::vector<long long> get_int_list(const std::string& section,
                                      const std::string& key) const;
  /// All entries recorded for a repeated key, one token list per occurrence.
  std::vector<std::vector<std::string>> get_entries(const std::string& section,
                                                    const std::string& key) const;

  /// Deterministic flattened view, for provenance headers.
  std::vector<std::pair<std::string, std::string>> flattened() const;

 private:
  // section -> key -> occurrences -> tokens
  std::map<std::string, std::map<std::string, std::vector<std::vector<std::string>>>>
      data_;
};

}  // namespace gmsfem

#endif
