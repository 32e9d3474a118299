#pragma once
// Plain-text model configuration: "key = value" lines, '#' comments.
// Keys: d11, d22, d21, tau, ell, kinetics.name, kinetics.a, kinetics.b, kinetics.c
#include <map>
#include <string>

#include "memdiff/kinetics.hpp"

namespace memdiff {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> parse_config_file(const std::string& path);

// build a validated model from parsed keys; throws ConfigError on missing or
// unknown kinetics
ModelParams model_from_config(const std::map<std::string, std::string>& kv);

}  // namespace memdiff
