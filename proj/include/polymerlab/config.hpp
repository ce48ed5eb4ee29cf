#pragma once

// Key-value config files with [section] headers, plus the canonical-string /
// hash machinery the run manifests use.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace polymerlab {

using ConfigSection = std::map<std::string, std::string>;
using Config = std::map<std::string, ConfigSection>;

// parses "[section]\nkey = value" text; '#' and ';' start comments;
// keys outside any section land in ""
Config parse_config_text(const std::string& text);
Config parse_config_file(const std::string& path);

std::string canonical_config_string(const Config& c);

uint64_t fnv1a64(const std::string& s);

std::vector<double> parse_double_list(const std::string& csv);

}  // namespace polymerlab
