// Copyright 2026 the sobis authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SOBIS_GIVENDATA_HPP
#define SOBIS_GIVENDATA_HPP

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sobis/dataset.hpp"
#include "sobis/density.hpp"
#include "sobis/estimators.hpp"
#include "sobis/subset.hpp"

namespace sobis {

/// A product-Beta perturbation of the reference input law: one Beta(alpha_j,
/// beta_j) per standardized input. (1, 1) on every coordinate is the
/// unperturbed baseline.
struct ThetaConfig {
  std::vector<BetaParams> shapes;

  explicit ThetaConfig(std::vector<BetaParams> s) : shapes(std::move(s)) {
    if (shapes.empty()) {
      throw std::invalid_argument("ThetaConfig: at least one coordinate required");
    }
  }

  static ThetaConfig baseline(std::size_t k) {
    return ThetaConfig(std::vector<BetaParams>(k, BetaParams(1.0, 1.0)));
  }

  std::size_t k() const { return shapes.size(); }

  bool is_baseline() const {
    for (const auto& s : shapes) {
      if (s.alpha != 1.0 || s.beta != 1.0) {
        return false;
      }
    }
    return true;
  }
};

/// Product-Beta density value at a standardized point.
inline double theta_pdf(const ThetaConfig& theta, const Point& x_std) {
  if (x_std.size() != theta.k()) {
    throw std::invalid_argument("theta_pdf: point dimension mismatch");
  }
  double v = 1.0;
  for (std::size_t j = 0; j < theta.k(); ++j) {
    v *= beta_pdf_unit(theta.shapes[j].alpha, theta.shapes[j].beta, x_std[j]);
  }
  return v;
}

/// Reweight the outputs of a dataset (already standardized to the unit cube)
/// toward the perturbed law: Z = sqrt(prod_{j in u} b_j) * prod_{j not in u}
/// b_j * y with b_j the per-coordinate Beta pdf. Direction is target/baseline
/// here: the data were drawn under the uniform baseline, and the Beta pdf is
/// exactly the likelihood ratio. At the baseline Z = y bit for bit.
struct ThetaReweightResult {
  std::vector<double> z;
  std::vector<double> w;  // full-product weights, for the ESS diagnostic
};

inline ThetaReweightResult reweighted_theta_outputs(const Dataset& data, const SubsetIndex& u,
                                                    const ThetaConfig& theta) {
  if (theta.k() != data.k) {
    throw std::invalid_argument("reweighted_theta_outputs: theta dimension mismatch");
  }
  if (u.k() != static_cast<int>(data.k)) {
    throw std::invalid_argument("reweighted_theta_outputs: subset ambient dimension mismatch");
  }
  ThetaReweightResult out;
  out.z.resize(data.n);
  out.w.resize(data.n);
  const bool base = theta.is_baseline();
  for (std::size_t i = 0; i < data.n; ++i) {
    if (base) {
      out.z[i] = data.y[i];
      out.w[i] = 1.0;
      continue;
    }
    double wu = 1.0, wbar = 1.0;
    for (std::size_t j = 0; j < data.k; ++j) {
      const double b = beta_pdf_unit(theta.shapes[j].alpha, theta.shapes[j].beta, data.xat(i, j));
      if (u.contains(static_cast<int>(j) + 1)) {
        wu *= b;
      } else {
        wbar *= b;
      }
    }
    out.z[i] = std::sqrt(wu) * wbar * data.y[i];
    out.w[i] = wu * wbar;
  }
  return out;
}

/// A sweep over perturbation parameters. `marginal` varies one input's Beta
/// shapes and leaves the rest at the baseline; `global` applies the same
/// shapes to every input.
struct SweepSpec {
  enum class Mode { marginal, global };
  Mode mode = Mode::marginal;
  int target_input = 1;  // 1-based; used in marginal mode
  std::vector<double> alpha_grid;
  std::vector<double> beta_grid;
};

struct SweepEntry {
  std::vector<double> alpha;  // per input, size k
  std::vector<double> beta;
  double eta_hat = 0.0;
  double stderr_ = 0.0;
  double ess = 0.0;
  bool baseline = false;
  bool low_ess = false;
};

struct SweepResult {
  std::vector<SweepEntry> entries;
  double baseline_eta = 0.0;
  double baseline_stderr = 0.0;
  std::size_t n = 0;
};

/// Rank-based eta estimate of every grid point of the sweep, plus the
/// baseline. Entries with ESS below 5% of n are flagged, not suppressed.
inline SweepResult eta_sweep(const Dataset& data, const SubsetIndex& u, const SweepSpec& spec) {
  if (spec.alpha_grid.empty() || spec.beta_grid.empty()) {
    throw std::invalid_argument("eta_sweep: empty parameter grid");
  }
  if (spec.mode == SweepSpec::Mode::marginal &&
      (spec.target_input < 1 || spec.target_input > static_cast<int>(data.k))) {
    throw std::invalid_argument("eta_sweep: target input out of range");
  }
  const auto xu_rows = data.rows_subset(u);
  std::optional<std::vector<double>> xu_scalar;
  if (u.size() == 1) {
    xu_scalar = data.column(u.axes()[0]);
  }
  auto estimate = [&](const ThetaConfig& theta) {
    const auto rw = reweighted_theta_outputs(data, u, theta);
    const EstimateReport rep =
        xu_scalar ? rank_eta(rw.z, *xu_scalar) : nn_rank_eta(rw.z, xu_rows);
    SweepEntry e;
    e.eta_hat = rep.value;
    e.stderr_ = rep.stderr_;
    e.ess = effective_sample_size(rw.w);
    e.baseline = theta.is_baseline();
    e.low_ess = e.ess < 0.05 * static_cast<double>(data.n);
    e.alpha.resize(data.k);
    e.beta.resize(data.k);
    for (std::size_t j = 0; j < data.k; ++j) {
      e.alpha[j] = theta.shapes[j].alpha;
      e.beta[j] = theta.shapes[j].beta;
    }
    return e;
  };

  SweepResult result;
  result.n = data.n;
  {
    // The baseline estimate is always reported, whether or not (1, 1) is a
    // grid point; the row count stays exactly |alpha_grid| * |beta_grid|.
    const auto base = estimate(ThetaConfig::baseline(data.k));
    result.baseline_eta = base.eta_hat;
    result.baseline_stderr = base.stderr_;
  }
  for (double alpha : spec.alpha_grid) {
    for (double beta : spec.beta_grid) {
      std::vector<BetaParams> shapes;
      shapes.reserve(data.k);
      for (std::size_t j = 0; j < data.k; ++j) {
        const bool hit = spec.mode == SweepSpec::Mode::global ||
                         static_cast<int>(j) + 1 == spec.target_input;
        shapes.push_back(hit ? BetaParams(alpha, beta) : BetaParams(1.0, 1.0));
      }
      result.entries.push_back(estimate(ThetaConfig(std::move(shapes))));
    }
  }
  return result;
}

/// Sweep CSV schema: alpha_1..alpha_k, beta_1..beta_k, eta_hat, stderr, ess,
/// baseline (0/1), low_ess (0/1). Values use 17 significant digits.
inline void write_sweep(const SweepResult& result, std::size_t k, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_sweep: cannot open '" + path + "' for writing");
  }
  for (std::size_t j = 0; j < k; ++j) {
    out << (j ? "," : "") << "alpha_" << (j + 1);
  }
  for (std::size_t j = 0; j < k; ++j) {
    out << ",beta_" << (j + 1);
  }
  out << ",eta_hat,stderr,ess,baseline,low_ess\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
  };
  for (const auto& e : result.entries) {
    for (std::size_t j = 0; j < k; ++j) {
      if (j) {
        out << ",";
      }
      put(e.alpha[j]);
    }
    for (std::size_t j = 0; j < k; ++j) {
      out << ",";
      put(e.beta[j]);
    }
    out << ",";
    put(e.eta_hat);
    out << ",";
    put(e.stderr_);
    out << ",";
    put(e.ess);
    out << "," << (e.baseline ? 1 : 0) << "," << (e.low_ess ? 1 : 0) << "\n";
  }
  if (!out) {
    throw std::runtime_error("write_sweep: I/O failure writing '" + path + "'");
  }
}

inline SweepResult read_sweep(const std::string& path, std::size_t k) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("read_sweep: cannot open '" + path + "'");
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("read_sweep: empty file '" + path + "'");
  }
  SweepResult result;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != 2 * k + 5) {
      throw std::runtime_error("read_sweep: malformed row at line " + std::to_string(line_no));
    }
    SweepEntry e;
    e.alpha.resize(k);
    e.beta.resize(k);
    std::size_t c = 0;
    for (std::size_t j = 0; j < k; ++j) {
      e.alpha[j] = detail::parse_double(cells[c++], line_no);
    }
    for (std::size_t j = 0; j < k; ++j) {
      e.beta[j] = detail::parse_double(cells[c++], line_no);
    }
    e.eta_hat = detail::parse_double(cells[c++], line_no);
    e.stderr_ = detail::parse_double(cells[c++], line_no);
    e.ess = detail::parse_double(cells[c++], line_no);
    e.baseline = detail::parse_double(cells[c++], line_no) != 0.0;
    e.low_ess = detail::parse_double(cells[c++], line_no) != 0.0;
    if (e.baseline) {
      result.baseline_eta = e.eta_hat;
      result.baseline_stderr = e.stderr_;
    }
    result.entries.push_back(std::move(e));
  }
  return result;
}

}  // namespace sobis

#endif  // SOBIS_GIVENDATA_HPP
