#include "gmsfem/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gmsfem {

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str(), path);
}

Config Config::parse_string(const std::string& text, const std::string& origin) {
  Config cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                 ": malformed section header");
      section = line.substr(1, line.size() - 2);
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                               ": expected 'key = value'");
    std::string key = line.substr(0, eq);
    key.erase(key.find_last_not_of(" \t") + 1);
    std::istringstream vs(line.substr(eq + 1));
    std::vector<std::string> tokens;
    for (std::string tok; vs >> tok;) tokens.push_back(tok);
    cfg.data_[section][key].push_back(std::move(tokens));
  }
  return cfg;
}

bool Config::has(const std::string& section, const std::string& key) const {
  auto s = data_.find(section);
  return s != data_.end() && s->second.count(key) > 0;
}

std::vector<std::vector<std::string>> Config::get_entries(
    const std::string& section, const std::string& key) const {
  auto s = data_.find(section);
  if (s == data_.end()) return {};
  auto k = s->second.find(key);
  if (k == s->second.end()) return {};
  return k->second;
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  auto e = get_entries(section, key);
  if (e.empty() || e.back().empty()) return fallback;
  return e.back()[0];
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
  auto e = get_entries(section, key);
  if (e.empty() || e.back().empty()) return fallback;
  return std::stod(e.back()[0]);
}

long long Config::get_int(const std::string& section, const std::string& key,
                          long long fallback) const {
  auto e = get_entries(section, key);
  if (e.empty() || e.back().empty()) return fallback;
  return std::stoll(e.back()[0]);
}

std::vector<double> Config::get_list(const std::string& section,
                                     const std::string& key) const {
  std::vector<double> out;
  auto e = get_entries(section, key);
  if (e.empty()) return out;
  for (const std::string& t : e.back()) out.push_back(std::stod(t));
  return out;
}

std::vector<long long> Config::get_int_list(const std::string& section,
                                            const std::string& key) const {
  std::vector<long long> out;
  auto e = get_entries(section, key);
  if (e.empty()) return out;
  for (const std::string& t : e.back()) out.push_back(std::stoll(t));
  return out;
}

std::vector<std::pair<std::string, std::string>> Config::flattened() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [section, keys] : data_) {
    for (const auto& [key, entries] : keys) {
      for (const auto& tokens : entries) {
        std::string value;
        for (const std::string& t : tokens) {
          if (!value.empty()) value += ' ';
          value += t;
        }
        out.emplace_back(section.empty() ? key : section + "." + key, value);
      }
    }
  }
  return out;
}

}  // namespace gmsfem
