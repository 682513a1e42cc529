#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ncl::cli {

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys{"geometry", "tau", "N",   "theta",  "spin",    "R",       "S",
                                               "L",        "q",   "Jcut", "r",     "out",     "report",  "formal",
                                               "reality",  "tol", "operator"};
    return keys;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& s, const std::string& key) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (trim(s.substr(pos)).empty() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(key + ": not a number: '" + s + "'");
}

int to_int(const std::string& s, const std::string& key) {
    double v = to_double(s, key);
    if (v != std::floor(v) || std::abs(v) > 1e6) throw ConfigError(key + ": not an integer: '" + s + "'");
    return static_cast<int>(v);
}

bool to_bool(const std::string& s, const std::string& key) {
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError(key + ": expected true/false, got '" + s + "'");
}

}  // namespace

RawConfig read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    RawConfig out;
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
        ++no;
        if (auto h = line.find('#'); h != std::string::npos) line = line.substr(0, h);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(path + ":" + std::to_string(no) + ": expected key=value");
        std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
        if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
        const auto& keys = known_keys();
        if (std::find(keys.begin(), keys.end(), k) == keys.end())
            throw ConfigError(path + ":" + std::to_string(no) + ": unknown key '" + k + "'");
        out[k] = v;
    }
    return out;
}

RawConfig merge(const RawConfig& flags, const RawConfig& file) {
    RawConfig out = file;
    for (auto& [k, v] : flags) out[k] = v;
    return out;
}

int parse_doubled(const std::string& s0) {
    const std::string s = trim(s0);
    if (auto sl = s.find('/'); sl != std::string::npos) {
        if (trim(s.substr(sl + 1)) != "2") throw ConfigError("half-integer expected: '" + s + "'");
        return to_int(s.substr(0, sl), "half-integer");
    }
    double v = to_double(s, "half-integer") * 2.0;
    if (v != std::floor(v)) throw ConfigError("half-integer expected: '" + s + "'");
    return static_cast<int>(v);
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item), "list"));
    return out;
}

std::complex<double> parse_complex(const std::string& s0) {
    const std::string s = trim(s0);
    if (s.find(',') != std::string::npos) {
        auto v = parse_list(s);
        if (v.size() != 2) throw ConfigError("complex expected as re,im: '" + s + "'");
        return {v[0], v[1]};
    }
    if (!s.empty() && s.back() == 'i') {
        const std::string body = s.substr(0, s.size() - 1);
        // split at the last sign that is not an exponent sign or the leading one
        size_t cut = std::string::npos;
        for (size_t k = body.size(); k-- > 1;)
            if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
                cut = k;
                break;
            }
        auto im_of = [](const std::string& t) {
            if (t.empty() || t == "+") return 1.0;
            if (t == "-") return -1.0;
            return to_double(t, "complex");
        };
        if (cut == std::string::npos) return {0.0, im_of(body)};
        return {to_double(body.substr(0, cut), "complex"), im_of(body.substr(cut))};
    }
    return {to_double(s, "complex"), 0.0};
}

RunConfig parse_config(const RawConfig& raw) {
    RunConfig c;
    c.raw = raw;
    auto get = [&](const std::string& k) -> const std::string* {
        auto it = raw.find(k);
        return it == raw.end() ? nullptr : &it->second;
    };
    for (auto& [k, v] : raw) {
        const auto& keys = known_keys();
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) throw ConfigError("unknown key '" + k + "'");
    }
    if (auto v = get("geometry")) c.geometry = *v;
    if (c.geometry != "torus" && c.geometry != "sphere" && c.geometry != "suq2")
        throw ConfigError("geometry must be torus, sphere or suq2");
    if (auto v = get("theta")) c.theta = to_double(*v, "theta");
    if (auto v = get("tau")) {
        auto t = parse_list(*v);
        if (t.size() != 4) throw ConfigError("tau expects four numbers tau1+,tau2+,tau1-,tau2-");
        std::copy(t.begin(), t.end(), c.tau.begin());
    }
    if (auto v = get("N")) c.N = to_int(*v, "N");
    if (auto v = get("spin")) {
        std::stringstream ss(*v);
        std::string item;
        std::vector<int> s;
        while (std::getline(ss, item, ',')) s.push_back(parse_doubled(item));
        if (s.size() != 2 || (s[0] != 0 && s[0] != 1) || (s[1] != 0 && s[1] != 1))
            throw ConfigError("spin expects two entries from {0, 1/2}");
        c.spin = {s[0], s[1]};
    }
    if (auto v = get("R")) c.R = to_double(*v, "R");
    if (auto v = get("S")) c.S = parse_complex(*v);
    if (auto v = get("L")) c.L2 = parse_doubled(*v);
    if (auto v = get("q")) c.q = to_double(*v, "q");
    if (auto v = get("Jcut")) c.J2 = parse_doubled(*v);
    if (auto v = get("r")) c.r = to_double(*v, "r");
    if (auto v = get("out")) c.out = *v;
    if (auto v = get("report")) c.report = *v;
    if (auto v = get("formal")) c.formal = to_bool(*v, "formal");
    if (auto v = get("reality")) c.reality = to_bool(*v, "reality");
    if (auto v = get("tol")) {
        c.tol = to_double(*v, "tol");
        if (!(*c.tol > 0.0)) throw ConfigError("tol must be positive");
    }
    if (auto v = get("operator")) c.op = *v;
    if (c.op != "D" && c.op != "absD2") throw ConfigError("operator must be D or absD2");
    if (c.N < 1) throw ConfigError("N must be positive");
    if (c.L2 < 1) throw ConfigError("L must be at least 1/2");
    if (c.J2 < 1) throw ConfigError("Jcut must be at least 1/2");
    if (!(c.q > 0.0 && c.q < 1.0)) throw ConfigError("q must lie in (0, 1)");
    return c;
}

}  // namespace ncl::cli
