#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include "nullsteer/charge.hpp"
#include "nullsteer/evolution.hpp"
#include "nullsteer/perturbation.hpp"
#include "nullsteer/survival.hpp"

namespace nullsteer {

/// 17 significant digits, scientific notation; round-trips doubles.
std::string format_double(double x);

using CsvCell = std::variant<std::string, double, std::int64_t>;

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  void row(const std::vector<CsvCell>& cells);

 private:
  std::ofstream out_;
  std::size_t columns_;
};

void write_spectrum_csv(const std::filesystem::path& path, const SurvivalSpectrum& spectrum);
void write_charges_csv(const std::filesystem::path& path, const ChargeConfiguration& config);
void write_roots_csv(const std::filesystem::path& path, const StationaryPoints& roots);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory,
                          const std::vector<std::string>& labels, bool dump_states);

struct EstimateRow {
  PerturbationEstimate estimate;
  std::vector<std::optional<cplx>> exact;  // matched to xi_estimates
};

void write_estimates_csv(const std::filesystem::path& path, const std::vector<EstimateRow>& rows);

}  // namespace nullsteer
