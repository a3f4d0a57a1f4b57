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

// Command-line front end: estimation, variance analysis, sweeps, and a
// self-validating demo. Exit codes: 0 success, 2 config error, 3 numerical
// or support error, 4 validation failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sobis/sobis.hpp"

namespace {

using nlohmann::json;
using namespace sobis;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitValidation = 4;

/// Grid syntax lo:hi:count, inclusive on both ends.
std::vector<double> parse_grid(const std::string& s) {
  double lo = 0.0, hi = 0.0;
  long count = 0;
  char extra = 0;
  if (std::sscanf(s.c_str(), "%lf:%lf:%ld%c", &lo, &hi, &count, &extra) != 3 || count < 1) {
    throw std::invalid_argument("grid '" + s + "' is not lo:hi:count with count >= 1");
  }
  std::vector<double> grid;
  if (count == 1) {
    if (lo != hi) {
      throw std::invalid_argument("grid '" + s + "': count 1 requires lo == hi");
    }
    grid.push_back(lo);
    return grid;
  }
  for (long i = 0; i < count; ++i) {
    grid.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  return grid;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t pos = 0;
    out.push_back(std::stod(cell, &pos));
    if (pos != cell.size()) {
      throw std::invalid_argument("malformed number list '" + s + "'");
    }
  }
  if (out.empty()) {
    throw std::invalid_argument("empty number list");
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (double v : parse_double_list(s)) {
    if (v != std::floor(v)) {
      throw std::invalid_argument("non-integer in index list '" + s + "'");
    }
    out.push_back(static_cast<int>(v));
  }
  return out;
}

json report_to_json(const EstimateReport& r) {
  json j{{"eta_hat", r.value}, {"stderr", r.stderr_}, {"n", r.n}, {"estimator", r.estimator}};
  if (r.weights_ess) {
    j["ess"] = *r.weights_ess;
  }
  if (!r.note.empty()) {
    j["note"] = r.note;
  }
  return j;
}

struct EstimateArgs {
  std::string model, data_path;
  std::string a_list = "1,2,3";
  std::string u_list;
  std::string q_beta;     // alpha,beta applied to every u coordinate
  std::string theta_all;  // alpha,beta applied to every input (data route)
  std::size_t n = 100000;
  long long seed = -1;
  bool have_seed = false;
};

int cmd_estimate(const EstimateArgs& args) {
  if (!args.model.empty() && !args.data_path.empty()) {
    throw std::invalid_argument("pass either --model or --data, not both");
  }
  json out;
  if (!args.model.empty()) {
    if (args.model != "gfun") {
      throw std::invalid_argument("unknown model '" + args.model + "' (available: gfun)");
    }
    if (!args.have_seed) {
      throw std::invalid_argument("--seed is required when sampling from a model");
    }
    const GFunctionSpec spec(parse_double_list(args.a_list));
    const SubsetIndex u(parse_int_list(args.u_list), spec.dim());
    const Model model = gfunction_model(spec);
    const Density p = uniform_density(Box::unit_cube(spec.dim()));
    Rng rng(static_cast<std::uint64_t>(args.seed));

    Density q_u = p.marginal(u);
    if (!args.q_beta.empty()) {
      const auto ab = parse_double_list(args.q_beta);
      if (ab.size() != 2) {
        throw std::invalid_argument("--q-beta expects alpha,beta");
      }
      std::vector<Density> factors;
      for (std::size_t j = 0; j < u.size(); ++j) {
        factors.push_back(beta_density(BetaParams(ab[0], ab[1]), 0.0, 1.0));
      }
      q_u = factors.size() == 1 ? factors[0] : product_density(std::move(factors));
    }
    // Sample x_u from q_u, the complement from p, evaluate, then reweight.
    const Density q = [&] {
      if (u.is_full()) {
        return q_u;
      }
      std::vector<Density> factors;
      std::size_t iu = 0;
      for (int j = 1; j <= spec.dim(); ++j) {
        if (u.contains(j)) {
          factors.push_back(q_u.box.dim() == 1 ? q_u : (*q_u.factors)[iu]);
          ++iu;
        } else {
          factors.push_back(uniform_density(Box::unit_cube(1)));
        }
      }
      return product_density(std::move(factors));
    }();
    const Dataset data = synthetic_dataset(model, q, args.n, rng);
    const auto z = reweighted_outputs(data, u, p, q_u, nullptr);
    EstimateReport rep;
    if (u.size() == 1) {
      rep = rank_eta(z, data.column(u.axes()[0]));
    } else {
      rep = nn_rank_eta(z, data.rows_subset(u));
    }
    out = report_to_json(rep);
    out["eta_exact"] = gfunction_eta(spec, u);
    if (args.q_beta.empty()) {
      // Samples are from p, so the dataset variance is usable directly.
      out["s_u"] = sobol_from_eta(rep.value, data.y);
      out["s_u_exact"] = (gfunction_eta(spec, u) - 1.0) / gfunction_variance(spec);
    }
  } else if (!args.data_path.empty()) {
    const Dataset raw = load_dataset(args.data_path);
    const Dataset data = standardize(raw, raw.box);
    const SubsetIndex u(parse_int_list(args.u_list), static_cast<int>(data.k));
    ThetaConfig theta = ThetaConfig::baseline(data.k);
    if (!args.theta_all.empty()) {
      const auto ab = parse_double_list(args.theta_all);
      if (ab.size() != 2) {
        throw std::invalid_argument("--theta-all expects alpha,beta");
      }
      theta = ThetaConfig(std::vector<BetaParams>(data.k, BetaParams(ab[0], ab[1])));
    }
    const auto rw = reweighted_theta_outputs(data, u, theta);
    EstimateReport rep;
    if (u.size() == 1) {
      rep = rank_eta(rw.z, data.column(u.axes()[0]));
    } else {
      rep = nn_rank_eta(rw.z, data.rows_subset(u));
    }
    rep.weights_ess = effective_sample_size(rw.w);
    out = report_to_json(rep);
    if (theta.is_baseline()) {
      out["s_u"] = sobol_from_eta(rep.value, data.y);
    }
  } else {
    throw std::invalid_argument("pass --model or --data");
  }
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

struct VarianceArgs {
  std::string model = "gfun";
  std::string a_list = "1,2,3";
  std::string u_list;
  std::string dist = "p";
  std::string case_sel;  // A | B | zero
  std::string beta_shapes;
  int order = 64;
  long long seed = 0;
  bool have_seed = false;
};

json variance_report_to_json(const VarianceReport& r) {
  json j{{"sigma_sq", r.sigma_sq}, {"eta", r.eta}, {"cv", r.cv}, {"method", r.method}};
  if (r.stderr_) {
    j["stderr"] = *r.stderr_;
  }
  if (r.clamped) {
    j["clamped"] = true;
  }
  return j;
}

int cmd_variance(const VarianceArgs& args) {
  if (args.model != "gfun") {
    throw std::invalid_argument("unknown model '" + args.model + "' (available: gfun)");
  }
  const GFunctionSpec spec(parse_double_list(args.a_list));
  const SubsetIndex u(parse_int_list(args.u_list), spec.dim());
  const Density p = uniform_density(Box::unit_cube(spec.dim()));
  const double eta = gfunction_eta(spec, u);
  json out;

  if (!args.case_sel.empty()) {
    const ConditionalMoments det = gfunction_moments_deterministic(spec, u);
    if (args.case_sel == "zero") {
      if (!args.have_seed) {
        throw std::invalid_argument("--seed is required for --case zero (Monte Carlo check)");
      }
      const Model model = gfunction_model(spec);
      const Density q = zero_variance_density(model, det, p, u, eta, args.order);
      // Pointwise constancy of w_u w_bar f m_u on a grid.
      const Density q_u_star = [&] {
        auto nd = normalize_density([&](const Point& xu) {
          const double m = det.m(xu);
          return p.marginal(u).pdf(xu) * m * m;
        }, p.marginal(u).box, args.order);
        return nd.density;
      }();
      double max_rel_dev = 0.0;
      const auto grid = tensor_gauss_legendre(p.box, 11);
      const Density p_u = p.marginal(u);
      for (const auto& x : grid.nodes) {
        const Point xu = u.extract(x);
        const double f = model.eval(x, {});
        const double qx = q.pdf(x);
        const double w = p.pdf(x) / qx;  // full-weight product check
        const double product = w * f * det.m(xu);
        max_rel_dev = std::max(max_rel_dev, std::abs(product - eta) / eta);
        (void)p_u;
        (void)q_u_star;
      }
      Rng rng(static_cast<std::uint64_t>(args.seed));
      const std::size_t n_mc = 10000;
      std::vector<double> vs(n_mc);
      double sum = 0.0;
      for (std::size_t i = 0; i < n_mc; ++i) {
        const Point x = q.draw(rng);
        vs[i] = (p.pdf(x) / q.pdf(x)) * model.eval(x, {}) * det.m(u.extract(x));
        sum += vs[i];
      }
      const double mean = sum / static_cast<double>(n_mc);
      // Two-pass variance: the products cluster at eta to machine
      // precision, so the shortcut formula would cancel catastrophically.
      double var = 0.0;
      for (double v : vs) {
        var += (v - mean) * (v - mean);
      }
      var /= static_cast<double>(n_mc) - 1.0;
      out = {{"eta", eta},
             {"sigma_sq", 0.0},
             {"method", "zero-variance"},
             {"max_pointwise_rel_dev", max_rel_dev},
             {"mc_rel_variance", var / (eta * eta)},
             {"mc_n", n_mc}};
    } else if (args.case_sel == "A" || args.case_sel == "B") {
      const auto which = args.case_sel == "A" ? SFunction::Case::A : SFunction::Case::B;
      const SFunction s = s_function(det, p, u, which, args.order);
      const auto [q_star, report] = optimal_marginal(p.marginal(u), s, eta, args.order);
      out = variance_report_to_json(report);
      out["case"] = args.case_sel;
      out["negative_s_seen"] = *s.negative_seen;
    } else {
      throw std::invalid_argument("--case must be A, B, or zero");
    }
  } else if (!args.beta_shapes.empty()) {
    const auto ab = parse_double_list(args.beta_shapes);
    if (ab.size() != 2) {
      throw std::invalid_argument("--beta expects alpha,beta");
    }
    const ConditionalMoments moments = gfunction_moments(spec, u);
    std::vector<Density> factors;
    for (std::size_t j = 0; j < u.size(); ++j) {
      factors.push_back(beta_density(BetaParams(ab[0], ab[1]), 0.0, 1.0));
    }
    const Density q_u = factors.size() == 1 ? factors[0] : product_density(std::move(factors));
    const auto at_q = sigma_opt_q(moments, p, q_u, nullptr, u, args.order);
    const auto at_p = sigma_opt_p(moments, p, u, args.order);
    out = variance_report_to_json(at_q);
    out["sigma_sq_uniform"] = at_p.sigma_sq;
    out["reduction_vs_uniform"] = 1.0 - at_q.sigma_sq / at_p.sigma_sq;
  } else if (args.dist == "p") {
    const ConditionalMoments moments = gfunction_moments(spec, u);
    out = variance_report_to_json(sigma_opt_p(moments, p, u, args.order));
  } else {
    throw std::invalid_argument("--dist must be p (or pass --beta / --case)");
  }
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

struct SweepArgs {
  std::string data_path;
  std::string model;
  std::string a_list = "1,2,3";
  std::string u_list;
  int marginal_input = 0;
  bool global_mode = false;
  bool surface = false;
  bool cv_curve_mode = false;
  std::string alpha_grid, beta_grid, grid, t_grid;
  std::string out_path = "sweep.csv";
  std::size_t n = 20000;
  int order = 32;
  long long seed = 0;
  bool have_seed = false;
};

int cmd_sweep(const SweepArgs& args) {
  json summary;
  if (!args.data_path.empty()) {
    const Dataset raw = load_dataset(args.data_path);
    const Dataset data = standardize(raw, raw.box);
    const SubsetIndex u(parse_int_list(args.u_list), static_cast<int>(data.k));
    SweepSpec spec;
    if (args.global_mode) {
      spec.mode = SweepSpec::Mode::global;
    } else if (args.marginal_input >= 1) {
      spec.mode = SweepSpec::Mode::marginal;
      spec.target_input = args.marginal_input;
    } else {
      throw std::invalid_argument("pass --marginal <input> or --global");
    }
    if (args.alpha_grid.empty() || args.beta_grid.empty()) {
      throw std::invalid_argument("pass --alpha-grid and --beta-grid");
    }
    spec.alpha_grid = parse_grid(args.alpha_grid);
    spec.beta_grid = parse_grid(args.beta_grid);
    const SweepResult result = eta_sweep(data, u, spec);
    write_sweep(result, data.k, args.out_path);
    std::size_t flagged = 0;
    for (const auto& e : result.entries) {
      flagged += e.low_ess ? 1 : 0;
    }
    summary = {{"rows", result.entries.size()},
               {"baseline_eta", result.baseline_eta},
               {"baseline_stderr", result.baseline_stderr},
               {"low_ess_rows", flagged},
               {"out", args.out_path}};
  } else if (args.model == "gfun") {
    const GFunctionSpec spec(parse_double_list(args.a_list));
    const SubsetIndex u(parse_int_list(args.u_list), spec.dim());
    const Density p = uniform_density(Box::unit_cube(spec.dim()));
    if (args.surface) {
      if (args.grid.empty()) {
        throw std::invalid_argument("--surface needs --grid lo:hi:count");
      }
      const auto g = parse_grid(args.grid);
      const ConditionalMoments moments = gfunction_moments(spec, u);
      const BetaSurface surf = beta_variance_surface(moments, p, u, g, g, args.order);
      std::ofstream out(args.out_path);
      if (!out) {
        throw std::runtime_error("cannot open '" + args.out_path + "' for writing");
      }
      out << "alpha,beta,sigma_sq,argmin\n";
      char buf[128];
      for (std::size_t ia = 0; ia < surf.alphas.size(); ++ia) {
        for (std::size_t ib = 0; ib < surf.betas.size(); ++ib) {
          std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g", surf.alphas[ia], surf.betas[ib],
                        surf.sigma_sq[ia][ib]);
          out << buf << "," << ((ia == surf.argmin_a && ib == surf.argmin_b) ? 1 : 0) << "\n";
        }
      }
      summary = {{"argmin_alpha", surf.alphas[surf.argmin_a]},
                 {"argmin_beta", surf.betas[surf.argmin_b]},
                 {"sigma_sq_min", surf.sigma_min},
                 {"sigma_sq_uniform", surf.sigma_ref},
                 {"reduction_vs_uniform", surf.reduction},
                 {"eta", surf.eta},
                 {"out", args.out_path}};
    } else if (args.cv_curve_mode) {
      if (args.t_grid.empty()) {
        throw std::invalid_argument("--cv-curve needs --t-grid lo:hi:count");
      }
      if (!args.have_seed) {
        throw std::invalid_argument("--seed is required for --cv-curve (Monte Carlo check)");
      }
      const ConditionalMoments moments = gfunction_moments(spec, u);
      const double eta = gfunction_eta(spec, u);
      const SFunction s = s_function(moments, p, u, SFunction::Case::A, args.order);
      const Density p_u = p.marginal(u);
      const auto [q_star, opt_report] = optimal_marginal(p_u, s, eta, args.order);
      Rng rng(static_cast<std::uint64_t>(args.seed));
      const auto curve =
          cv_curve(p_u, q_star, s, eta, parse_grid(args.t_grid), args.n, args.order, rng);
      std::ofstream out(args.out_path);
      if (!out) {
        throw std::runtime_error("cannot open '" + args.out_path + "' for writing");
      }
      out << "t,sigma_sq_quad,cv_quad,sigma_sq_mc,sigma_sq_mc_stderr,cv_mc\n";
      char buf[160];
      for (const auto& pt : curve) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", pt.t, pt.sigma_sq_quad,
                      pt.cv_quad, pt.sigma_sq_mc, pt.sigma_sq_mc_stderr, pt.cv_mc);
        out << buf << "\n";
      }
      bool monotone = true;
      for (std::size_t i = 1; i < curve.size(); ++i) {
        monotone = monotone && curve[i].cv_quad < curve[i - 1].cv_quad;
      }
      summary = {{"rows", curve.size()},
                 {"cv_first", curve.front().cv_quad},
                 {"cv_last", curve.back().cv_quad},
                 {"monotone_decreasing", monotone},
                 {"out", args.out_path}};
    } else {
      throw std::invalid_argument("model sweep needs --surface or --cv-curve");
    }
  } else {
    throw std::invalid_argument("pass --data or --model gfun");
  }
  std::cout << summary.dump(2) << "\n";
  return kExitOk;
}

struct ValidateArgs {
  bool quick = false;
  std::string report_path;
  long long seed = 20260826;
};

int cmd_validate(const ValidateArgs& args) {
  const std::size_t n = args.quick ? 20000 : 100000;
  const double band = args.quick ? 6.0 : 5.0;
  Rng rng(static_cast<std::uint64_t>(args.seed));
  json checks = json::array();
  bool all_pass = true;
  auto record = [&](const std::string& name, bool pass, json detail) {
    detail["name"] = name;
    detail["pass"] = pass;
    checks.push_back(detail);
    all_pass = all_pass && pass;
    std::cout << "[" << (pass ? "PASS" : "FAIL") << "] " << name << "\n";
  };

  const GFunctionSpec spec({1.0, 2.0, 3.0});
  const Model model = gfunction_model(spec);
  const Density p = uniform_density(Box::unit_cube(3));
  const SubsetIndex u1({1}, 3);
  const SubsetIndex u12({1, 2}, 3);
  const double eta1 = gfunction_eta(spec, u1);
  const double eta12 = gfunction_eta(spec, u12);

  // Reweighted estimation under a shifted marginal recovers eta.
  {
    const Density q1 = beta_density(BetaParams(2.0, 2.0), 0.0, 1.0);
    const Density q = product_density(
        {q1, uniform_density(Box::unit_cube(1)), uniform_density(Box::unit_cube(1))});
    const Dataset data = synthetic_dataset(model, q, n, rng);
    const auto z = reweighted_outputs(data, u1, p, q1, nullptr);
    const auto rep = rank_eta(z, data.column(0));
    const double dev = std::abs(rep.value - eta1) / rep.stderr_;
    record("reweighted-moment-consistency", dev < band,
           {{"eta_hat", rep.value}, {"eta_exact", eta1}, {"stderr_multiples", dev}});
  }

  // Reweighting a q-sample and resampling under p agree.
  {
    const Density q1 = beta_density(BetaParams(0.8, 0.8), 0.0, 1.0);
    const Density q = product_density(
        {q1, uniform_density(Box::unit_cube(1)), uniform_density(Box::unit_cube(1))});
    const Dataset dq = synthetic_dataset(model, q, n, rng);
    const auto zq = reweighted_outputs(dq, u1, p, q1, nullptr);
    const auto rep_q = rank_eta(zq, dq.column(0));
    const Dataset dp = synthetic_dataset(model, p, n, rng);
    const auto rep_p = rank_eta(dp.y, dp.column(0));
    const double gap = std::abs(rep_q.value - rep_p.value);
    const double comb = std::hypot(rep_q.stderr_, rep_p.stderr_);
    record("reweighting-vs-resampling", gap < band * comb,
           {{"eta_reweighted", rep_q.value}, {"eta_resampled", rep_p.value},
            {"gap_stderr_multiples", gap / comb}});
  }

  // Quadratic-mean minimality: min over q of the integral of g^2/q is at
  // q = g, with value 1 after normalizing g to unit mass.
  {
    auto g_raw = [](const Point& x) { return gfunction_factor(x[0], 1.0); };
    const Box unit = Box::unit_cube(1);
    const auto nd = normalize_density(g_raw, unit, 64, {{0.5}});
    const Density g_density = nd.density;
    std::vector<Density> trials = {g_density, uniform_density(unit),
                                   beta_density(BetaParams(2.0, 2.0), 0.0, 1.0),
                                   beta_density(BetaParams(0.8, 0.8), 0.0, 1.0),
                                   interpolate_density(uniform_density(unit), g_density, 0.5),
                                   beta_density(BetaParams(2.0, 1.0), 0.0, 1.0)};
    const auto rule = tensor_gauss_legendre(unit, 96, {{0.5}});
    std::vector<double> values;
    for (const auto& q : trials) {
      double acc = 0.0;
      for (std::size_t i = 0; i < rule.size(); ++i) {
        const double gv = g_density.pdf(rule.nodes[i]);
        acc += rule.weights[i] * gv * gv / q.pdf(rule.nodes[i]);
      }
      values.push_back(acc);
    }
    bool pass = values[0] <= 1.0 + 1e-10;
    for (std::size_t i = 0; i < values.size(); ++i) {
      pass = pass && values[i] >= 1.0 - 1e-10 && values[i] >= values[0] - 1e-12;
    }
    record("second-moment-minimality", pass, {{"values", values}});
  }

  // Ordered variances: optimal joint <= optimal marginal with reference
  // conditional <= reference.
  {
    const int order = args.quick ? 32 : 64;
    const ConditionalMoments det = gfunction_moments_deterministic(spec, u12);
    const auto at_p = sigma_opt_p(det, p, u12, order);
    const SFunction sa = s_function(det, p, u12, SFunction::Case::A, order);
    const auto [qa, rep_a] = optimal_marginal(p.marginal(u12), sa, eta12, order);
    const SFunction sb = s_function(det, p, u12, SFunction::Case::B, order);
    const auto [qb, rep_b] = optimal_marginal(p.marginal(u12), sb, eta12, order);
    const bool pass = rep_b.sigma_sq <= rep_a.sigma_sq + 1e-9 && rep_a.sigma_sq <= at_p.sigma_sq + 1e-9;
    record("variance-ordering", pass,
           {{"sigma_p", at_p.sigma_sq}, {"sigma_case_a", rep_a.sigma_sq}, {"sigma_case_b", rep_b.sigma_sq}});
  }

  // Zero-variance construction: the weighted product is constant.
  {
    const ConditionalMoments det = gfunction_moments_deterministic(spec, u12);
    const Density q = zero_variance_density(model, det, p, u12, eta12, 64);
    double max_rel = 0.0;
    const auto grid = tensor_gauss_legendre(p.box, 9);
    for (const auto& x : grid.nodes) {
      const double v = (p.pdf(x) / q.pdf(x)) * model.eval(x, {}) * det.m(u12.extract(x));
      max_rel = std::max(max_rel, std::abs(v - eta12) / eta12);
    }
    record("zero-variance-constancy", max_rel < 1e-10, {{"max_rel_dev", max_rel}});
  }

  if (!args.report_path.empty()) {
    std::ofstream out(args.report_path);
    if (!out) {
      throw std::runtime_error("cannot open '" + args.report_path + "' for writing");
    }
    out << json{{"pass", all_pass}, {"checks", checks}}.dump(2) << "\n";
  }
  std::cout << (all_pass ? "all checks passed" : "validation FAILED") << "\n";
  return all_pass ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sobol' index estimation with importance sampling"};
  app.require_subcommand(1);

  EstimateArgs est;
  auto* sub_est = app.add_subcommand("estimate", "Estimate eta_u and the Sobol' index");
  sub_est->add_option("--model", est.model, "Built-in model name (gfun)");
  sub_est->add_option("--data", est.data_path, "Input CSV (header, k inputs, one output)");
  sub_est->add_option("--a", est.a_list, "g-function coefficients, comma-separated");
  sub_est->add_option("--u", est.u_list, "Input subset, 1-based comma-separated")->required();
  sub_est->add_option("--q-beta", est.q_beta, "Sampling Beta shapes alpha,beta on the u coordinates");
  sub_est->add_option("--theta-all", est.theta_all, "Reweighting Beta shapes alpha,beta on all inputs");
  sub_est->add_option("--n", est.n, "Sample size for model runs");
  sub_est->add_option("--seed", est.seed, "RNG seed (required for sampling)")
      ->each([&](const std::string&) { est.have_seed = true; });

  VarianceArgs var;
  auto* sub_var = app.add_subcommand("variance", "Asymptotic-variance analysis");
  sub_var->add_option("--model", var.model, "Built-in model name (gfun)");
  sub_var->add_option("--a", var.a_list, "g-function coefficients");
  sub_var->add_option("--u", var.u_list, "Input subset")->required();
  sub_var->add_option("--dist", var.dist, "Sampling distribution: p");
  sub_var->add_option("--case", var.case_sel, "Optimal construction: A, B, or zero");
  sub_var->add_option("--beta", var.beta_shapes, "Beta shapes alpha,beta for the u marginal");
  sub_var->add_option("--order", var.order, "Quadrature order per axis");
  sub_var->add_option("--seed", var.seed, "RNG seed")->each([&](const std::string&) { var.have_seed = true; });

  SweepArgs swp;
  auto* sub_swp = app.add_subcommand("sweep", "Parameter sweeps (CSV out, JSON summary)");
  sub_swp->add_option("--data", swp.data_path, "Input CSV");
  sub_swp->add_option("--model", swp.model, "Built-in model name (gfun)");
  sub_swp->add_option("--a", swp.a_list, "g-function coefficients");
  sub_swp->add_option("--u", swp.u_list, "Input subset")->required();
  sub_swp->add_option("--marginal", swp.marginal_input, "Perturb this input only (1-based)");
  sub_swp->add_flag("--global", swp.global_mode, "Perturb all inputs together");
  sub_swp->add_flag("--surface", swp.surface, "Variance surface over Beta shapes");
  sub_swp->add_flag("--cv-curve", swp.cv_curve_mode, "CV along the interpolated density family");
  sub_swp->add_option("--alpha-grid", swp.alpha_grid, "lo:hi:count");
  sub_swp->add_option("--beta-grid", swp.beta_grid, "lo:hi:count");
  sub_swp->add_option("--grid", swp.grid, "lo:hi:count for both Beta shapes");
  sub_swp->add_option("--t-grid", swp.t_grid, "lo:hi:count in [0,1]");
  sub_swp->add_option("--out", swp.out_path, "Output CSV path");
  sub_swp->add_option("--n", swp.n, "Monte Carlo sample size");
  sub_swp->add_option("--order", swp.order, "Quadrature order per axis");
  sub_swp->add_option("--seed", swp.seed, "RNG seed")->each([&](const std::string&) { swp.have_seed = true; });

  ValidateArgs val;
  auto* sub_val = app.add_subcommand("validate", "Run the built-in invariant checks");
  sub_val->add_flag("--quick", val.quick, "Smaller samples, wider tolerances");
  sub_val->add_option("--report", val.report_path, "Write machine-readable results to this JSON file");
  sub_val->add_option("--seed", val.seed, "RNG seed (fixed default)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*sub_est) {
      return cmd_estimate(est);
    }
    if (*sub_var) {
      return cmd_variance(var);
    }
    if (*sub_swp) {
      return cmd_sweep(swp);
    }
    if (*sub_val) {
      return cmd_validate(val);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}
