#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "oflm/limits.hpp"

namespace oflm::lab {

inline constexpr int kSchemaVersion = 1;

enum class Representation { moving_average, harmonizable };

struct SimulationSection {
    std::size_t replications = 0;
    SimOptions options{};
    bool binary = false;
};

struct TimerevSection {
    std::size_t replications = 0;  // 0: parametric checks only
    std::vector<double> times;
    std::vector<std::vector<Vec>> u;
};

struct LimitsSection {
    LimitKind kind = LimitKind::ma_large;
    std::vector<double> scales{1.0, 4.0, 16.0, 64.0};
    std::size_t replications = 0;
    std::vector<double> times;
    std::vector<std::vector<Vec>> u;
    bool direct = false;
};

struct ExperimentConfig {
    std::string digest;  // SHA-256 of the canonical JSON text
    Representation representation = Representation::moving_average;
    Mat H;
    std::optional<TimeKernelParams> time;
    std::optional<FourierKernelParams> fourier;
    std::optional<LevyMeasure> mu;          // moving average
    std::optional<ComplexLevyView> mu_c;    // harmonizable
    bool normalized = false;
    std::vector<double> grid;
    std::optional<SimulationSection> simulation;
    std::vector<std::pair<double, double>> cov_pairs;
    std::optional<TimerevSection> timerev;
    std::optional<LimitsSection> limits;
    std::vector<std::pair<double, double>> parseval_pairs;

    Eigen::Index p() const { return H.rows(); }
    MaModel ma_model() const { return {*time, *mu}; }
    RhModel rh_model() const { return {*fourier, *mu_c}; }
};

// SchemaError for structural problems (unknown or missing fields, wrong types),
// ValidationError for values the library rejects. Messages start with a JSON pointer.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig parse_config_file(const std::string& path);

std::string canonical_digest(const nlohmann::json& doc);

}  // namespace oflm::lab
