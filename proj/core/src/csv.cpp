#include "nullsteer/csv.hpp"

#include <cstdio>

#include "nullsteer/error.hpp"

namespace nullsteer {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary), columns_(header.size()) {
  if (!out_) fail(ErrorCode::invalid_input, "cannot open " + path.string() + " for writing");
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<CsvCell>& cells) {
  if (cells.size() != columns_) fail(ErrorCode::invalid_input, "CSV row width does not match header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>) {
            out_ << format_double(v);
          } else {
            out_ << v;
          }
        },
        cells[i]);
  }
  out_ << '\n';
}

void write_spectrum_csv(const std::filesystem::path& path, const SurvivalSpectrum& spectrum) {
  CsvWriter w(path, {"class", "re_xi", "im_xi", "abs_xi", "source_level", "biorthogonal_overlap"});
  for (const auto& t : spectrum.triples) {
    const std::string level = t.source_level ? std::to_string(*t.source_level) : "";
    w.row({std::string(to_string(t.cls)), t.xi.real(), t.xi.imag(), std::abs(t.xi), level, t.biorthogonal_overlap()});
  }
}

void write_charges_csv(const std::filesystem::path& path, const ChargeConfiguration& config) {
  CsvWriter w(path, {"E_k", "p_k", "re_phase", "im_phase"});
  for (const auto& c : config.charges) w.row({c.energy, c.p, c.phase.real(), c.phase.imag()});
}

void write_roots_csv(const std::filesystem::path& path, const StationaryPoints& roots) {
  CsvWriter w(path, {"re_xi", "im_xi", "abs_xi", "arg_xi", "residual"});
  for (std::size_t i = 0; i < roots.roots.size(); ++i) {
    const cplx r = roots.roots[i];
    w.row({r.real(), r.imag(), std::abs(r), std::arg(r), roots.residuals[i]});
  }
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory,
                          const std::vector<std::string>& labels, bool dump_states) {
  std::vector<std::string> header{"n", "mean_energy", "survival_amplitude", "cumulative_no_detection_probability",
                                  "phase"};
  if (dump_states) {
    for (const auto& l : labels) {
      header.push_back("re_" + l);
      header.push_back("im_" + l);
    }
  }
  CsvWriter w(path, header);
  for (const auto& r : trajectory.records) {
    std::vector<CsvCell> cells{r.n, r.mean_energy, r.survival_amplitude, r.cumulative_no_detection_probability,
                               r.phase};
    if (dump_states) {
      if (r.state.size() != static_cast<Eigen::Index>(labels.size())) {
        fail(ErrorCode::invalid_input, "trajectory was computed without stored states");
      }
      for (Eigen::Index i = 0; i < r.state.size(); ++i) {
        cells.emplace_back(r.state[i].real());
        cells.emplace_back(r.state[i].imag());
      }
    }
    w.row(cells);
  }
}

void write_estimates_csv(const std::filesystem::path& path, const std::vector<EstimateRow>& rows) {
  CsvWriter w(path, {"scheme", "small_parameter", "index", "re_xi_estimate", "im_xi_estimate", "re_xi_exact",
                     "im_xi_exact", "abs_error"});
  for (const auto& row : rows) {
    const auto& e = row.estimate;
    for (std::size_t i = 0; i < e.xi_estimates.size(); ++i) {
      const cplx x = e.xi_estimates[i];
      const auto exact = i < row.exact.size() ? row.exact[i] : std::nullopt;
      const double nan = std::numeric_limits<double>::quiet_NaN();
      w.row({std::string(to_string(e.scheme)), e.small_parameter, static_cast<std::int64_t>(i), x.real(), x.imag(),
             exact ? exact->real() : nan, exact ? exact->imag() : nan, exact ? std::abs(x - *exact) : nan});
    }
  }
}

}  // namespace nullsteer
