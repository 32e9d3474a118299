#include "memdiff/config.hpp"

#include <fstream>
#include <sstream>

namespace memdiff {

namespace {
std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
        if (!section.empty()) key = section + "." + key;
        kv[key] = val;
    }
    return kv;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

ModelParams model_from_config(const std::map<std::string, std::string>& kv) {
    auto get = [&](const std::string& key) -> double {
        auto it = kv.find(key);
        if (it == kv.end()) throw ConfigError("missing config key: " + key);
        size_t pos = 0;
        double v = std::stod(it->second, &pos);
        if (pos != it->second.size())
            throw ConfigError("bad numeric value for " + key + ": " + it->second);
        return v;
    };
    ModelParams mp;
    mp.d11 = get("d11");
    mp.d22 = get("d22");
    mp.d21 = get("d21");
    mp.tau = get("tau");
    mp.ell = get("ell");
    auto it = kv.find("kinetics.name");
    if (it == kv.end()) throw ConfigError("missing config key: kinetics.name");
    if (it->second != "holling2")
        throw ConfigError("unknown kinetics: " + it->second);
    mp.ka = get("kinetics.a");
    mp.kb = get("kinetics.b");
    mp.kc = get("kinetics.c");
    mp.kinetics = holling2(mp.ka, mp.kb, mp.kc);
    mp.validate();
    return mp;
}

}  // namespace memdiff
