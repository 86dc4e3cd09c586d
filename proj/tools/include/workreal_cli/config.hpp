#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "workreal/entropy.hpp"
#include "workreal/tpm.hpp"

namespace workreal::cli {

enum class Experiment { TlsTheta, SqueezeGrid, SqueezeBeta, JarzynskiCheck, McCrosscheck };

std::string_view experiment_name(Experiment e);
std::optional<Experiment> parse_experiment(std::string_view name);

/// Bad configuration. `line` is 0 for problems found on the command line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::size_t line, std::string field, const std::string& message);
    std::size_t line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::size_t line_;
    std::string field_;
};

/// Axis name -> values, from "theta=0:2pi:721;r1=0.01,0.02".
/// `lo:hi:n` is n evenly spaced values including both ends. Numbers may carry
/// a trailing "pi".
std::map<std::string, std::vector<double>> parse_grid_spec(std::string_view spec);

struct SweepConfig {
    Experiment experiment = Experiment::TlsTheta;
    std::optional<double> beta;
    std::size_t n_max = 0;
    std::optional<std::uint64_t> seed;
    std::map<std::string, std::vector<double>> grids;
    WorkView view = WorkView::FineGrained;
    EntropyBase base = EntropyBase::Natural;
    std::size_t threads = 0;
    std::filesystem::path out = ".";

    double alpha = 0.0;
    double beta_angle = 0.0;
    double theta = 1.0471975511965976;
    bool incommensurate = false;
    double r1 = 0.02;
    double r2 = 0.02;
    std::uint64_t samples = 100000;
    std::size_t draws = 100;
    bool auto_extend = true;

    /// Key/value pairs in the order they were set, echoed into outputs.
    std::vector<std::pair<std::string, std::string>> echo;

    /// Applies one key. Throws ConfigError naming `line` and the key.
    void set(const std::string& key, const std::string& value, std::size_t line = 0);

    /// Grid for `axis` if given, else `fallback`.
    std::vector<double> grid_or(const std::string& axis, std::vector<double> fallback) const;

    /// Cross-field checks; throws ConfigError.
    void validate() const;
};

/// Reads `key = value` lines; '#' starts a comment, blank lines are ignored.
void load_config_file(const std::filesystem::path& path, SweepConfig& config);
void load_config_text(std::string_view text, SweepConfig& config);

}  // namespace workreal::cli
