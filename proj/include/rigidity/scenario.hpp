#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rigidity/media.hpp"
#include "rigidity/rigidity_suite.hpp"

namespace rigidity {

struct DomainSpec {
  std::string type = "disc";  // "disc" or "star"
  std::vector<double> fourier_coeffs;
};

// A reproducible experiment description. Paths inside it (grid_spline CSVs) resolve against
// base_dir.
struct Scenario {
  DomainSpec domain;
  std::vector<MediumSpec> media;
  std::optional<MediumSpec> perturbation;
  GridSpec grid{32, 64, 64};
  GridSpec fine_grid{64, 128, 128};
  std::uint64_t seed = 1;
  nlohmann::json options = nlohmann::json::object();
  std::filesystem::path base_dir;
};

Domain make_domain(const DomainSpec& spec);

// All of these throw ConfigError naming the offending key.
DomainSpec parse_domain(const nlohmann::json& j);
MediumSpec parse_medium(const nlohmann::json& j, const std::filesystem::path& base_dir = {},
                        const std::string& where = "medium");
GridSpec parse_grid(const nlohmann::json& j);
// "Nx,Nphi,Ns"
GridSpec parse_grid_flag(const std::string& text);
Scenario parse_scenario(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

nlohmann::json to_json(const DomainSpec& spec);
nlohmann::json to_json(const MediumSpec& spec);
nlohmann::json to_json(const GridSpec& grid);
nlohmann::json to_json(const Scenario& scenario);

// Angle in radians, or degrees with a trailing "deg" or "d" ("30deg"). Throws ConfigError.
double parse_angle(const std::string& text);

}  // namespace rigidity
