// Run configuration: flat key=value parameters from flags and an optional file.
#pragma once

#include <array>
#include <complex>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ncl::cli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// every key accepted on the command line (as --key) and in config files
const std::vector<std::string>& known_keys();

using RawConfig = std::map<std::string, std::string>;

// key=value lines, '#' starts a comment; unknown keys throw
RawConfig read_config_file(const std::string& path);
// values from `flags` win over values from `file`
RawConfig merge(const RawConfig& flags, const RawConfig& file);

struct RunConfig {
    std::string geometry;
    double theta = 0.6180339887498949;
    std::array<double, 4> tau{1.0, 0.0, 0.0, 1.0};
    int N = 6;
    std::array<int, 2> spin{0, 0};  // doubled
    double R = 1.0;
    std::complex<double> S = 1.0;
    int L2 = 8;
    double q = 0.5;
    int J2 = 12;
    double r = 1.0;
    std::string out;     // empty: stdout
    std::string report;  // spectrum: optional JSON summary path
    bool formal = false;
    bool reality = true;
    std::optional<double> tol;
    std::string op = "D";  // spectrum: D or absD2
    RawConfig raw;         // what was given, for the report
};

RunConfig parse_config(const RawConfig& raw);

// parsing helpers, exposed for tests
int parse_doubled(const std::string& s);  // "7/2", "3.5", "4"
std::complex<double> parse_complex(const std::string& s);  // "x", "x,y", "x+yi", "yi"
std::vector<double> parse_list(const std::string& s);

}  // namespace ncl::cli
