#pragma once
// Key-value tree config files:
//   [section]
//   key = value            # comment
//   key = v1 v2 v3         (lists are whitespace-separated)
// Repeated keys accumulate, which is how explicit interaction lists are given.

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "model.hpp"

namespace spinflip {

class ConfigTree {
public:
    static ConfigTree parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("config: cannot open " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return parse(ss.str());
    }

    static ConfigTree parse(const std::string& text) {
        ConfigTree t;
        std::istringstream in(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw std::runtime_error("config: bad section header at line " +
                                             std::to_string(lineno));
                section = trim(line.substr(1, line.size() - 2));
                continue;
            }
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("config: expected key = value at line " +
                                         std::to_string(lineno));
            std::string key = trim(line.substr(0, eq));
            std::string val = trim(line.substr(eq + 1));
            if (key.empty()) throw std::runtime_error("config: empty key at line " +
                                                      std::to_string(lineno));
            t.kv_[section.empty() ? key : section + "." + key].push_back(val);
        }
        return t;
    }

    bool has(const std::string& key) const { return kv_.count(key) > 0; }

    std::string get(const std::string& key) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) throw std::runtime_error("config: missing key " + key);
        return it->second.back();
    }
    std::string get(const std::string& key, const std::string& dflt) const {
        auto it = kv_.find(key);
        return it == kv_.end() ? dflt : it->second.back();
    }
    const std::vector<std::string>& get_all(const std::string& key) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) throw std::runtime_error("config: missing key " + key);
        return it->second;
    }

    double get_double(const std::string& key) const { return to_double(get(key), key); }
    double get_double(const std::string& key, double dflt) const {
        return has(key) ? get_double(key) : dflt;
    }
    long get_int(const std::string& key) const { return to_int(get(key), key); }
    long get_int(const std::string& key, long dflt) const {
        return has(key) ? get_int(key) : dflt;
    }
    bool get_bool(const std::string& key, bool dflt) const {
        if (!has(key)) return dflt;
        std::string v = get(key);
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw std::runtime_error("config: bad boolean for " + key + ": " + v);
    }
    std::vector<double> get_doubles(const std::string& key) const {
        std::vector<double> out;
        for (const auto& tok : split(get(key))) out.push_back(to_double(tok, key));
        return out;
    }
    std::vector<long> get_ints(const std::string& key) const {
        std::vector<long> out;
        for (const auto& tok : split(get(key))) out.push_back(to_int(tok, key));
        return out;
    }
    std::vector<std::string> get_words(const std::string& key) const { return split(get(key)); }

    static std::vector<std::string> split(const std::string& s) {
        std::istringstream in(s);
        std::vector<std::string> out;
        std::string tok;
        while (in >> tok) out.push_back(tok);
        return out;
    }

private:
    static std::string trim(const std::string& s) {
        auto a = s.find_first_not_of(" \t\r\n");
        if (a == std::string::npos) return "";
        auto b = s.find_last_not_of(" \t\r\n");
        return s.substr(a, b - a + 1);
    }
    static double to_double(const std::string& s, const std::string& key) {
        try {
            std::size_t pos;
            double v = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (...) {
            throw std::runtime_error("config: bad number for " + key + ": " + s);
        }
    }
    static long to_int(const std::string& s, const std::string& key) {
        try {
            std::size_t pos;
            long v = std::stol(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (...) {
            throw std::runtime_error("config: bad integer for " + key + ": " + s);
        }
    }
    std::map<std::string, std::vector<std::string>> kv_;
};

/// Build a model from the [model] section. Types: chain | ea2d | explicit.
/// Explicit interactions are repeated keys:  interaction = 0 1 0.3 1.0
/// (site indices, then mean, then variance; last two tokens are mu, delta2).
inline InteractionModel model_from_config(const ConfigTree& c, const std::string& sec = "model") {
    auto key = [&](const std::string& k) { return sec + "." + k; };
    std::string type = c.get(key("type"));
    std::vector<int> region;
    if (c.has(key("region_sites")))
        for (long s : c.get_ints(key("region_sites"))) region.push_back((int)s);
    if (type == "chain") {
        ChainOptions o;
        o.n = (int)c.get_int(key("n"));
        o.bond_mu = c.get_double(key("bond_mu"), 0.0);
        o.bond_delta2 = c.get_double(key("bond_delta2"), 1.0);
        o.fields = c.get_bool(key("fields"), false);
        o.field_mu = c.get_double(key("field_mu"), 0.0);
        o.field_delta2 = c.get_double(key("field_delta2"), 0.0);
        o.periodic = c.get_bool(key("periodic"), false);
        o.region_first = (int)c.get_int(key("region_first"), -1);
        o.region_sites = region;
        return chain_model(o);
    }
    if (type == "ea2d") {
        Ea2dOptions o;
        o.side = (int)c.get_int(key("side"));
        o.mu = c.get_double(key("mu"), 0.0);
        o.delta2 = c.get_double(key("delta2"), 1.0);
        o.periodic = c.get_bool(key("periodic"), true);
        o.region_sites = region;
        return InteractionModel(ea2d_model(o));
    }
    if (type == "explicit") {
        int n = (int)c.get_int(key("n"));
        std::vector<Interaction> is;
        for (const auto& row : c.get_all(key("interaction"))) {
            auto toks = ConfigTree::split(row);
            if (toks.size() < 3)
                throw std::runtime_error("config: interaction row needs sites mu delta2");
            Interaction it;
            for (std::size_t i = 0; i + 2 < toks.size(); ++i)
                it.sites.push_back((int)std::stol(toks[i]));
            it.mu = std::stod(toks[toks.size() - 2]);
            it.delta2 = std::stod(toks[toks.size() - 1]);
            is.push_back(std::move(it));
        }
        if (region.empty())
            for (int i = 0; i < n; ++i) region.push_back(i);
        return InteractionModel(n, std::move(is), std::move(region));
    }
    throw std::runtime_error("config: unknown model type " + type);
}

}  // namespace spinflip
