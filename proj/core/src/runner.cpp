#include "maxstab/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "maxstab/clt.hpp"
#include "maxstab/dependence.hpp"
#include "maxstab/errors.hpp"
#include "maxstab/io.hpp"
#include "maxstab/parallel.hpp"
#include "maxstab/risk.hpp"
#include "maxstab/rng.hpp"
#include "maxstab/simulate.hpp"

namespace maxstab {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string iso_utc_now() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Collects every file written for this run so the manifest can list them all
// with hashes. Paths are stored relative to the output directory.
struct ArtifactWriter {
  fs::path dir;
  std::vector<std::string> rel;

  fs::path add(const std::string& relative) {
    rel.push_back(relative);
    const fs::path full = dir / relative;
    if (full.has_parent_path()) fs::create_directories(full.parent_path());
    return full;
  }

  void write_json(const std::string& relative, const json& j) {
    write_text(add(relative), j.dump(2) + "\n");
  }
};

json model_json(const ExperimentConfig& c) {
  json j;
  if (const auto* s = std::get_if<SmithModel>(&c.model)) {
    j["type"] = "smith";
    j["dim"] = c.dim;
    j["sigma"] = s->sigma;
  } else {
    const auto& b = std::get<BrownResnickModel>(c.model);
    j["type"] = "brown-resnick";
    j["dim"] = c.dim;
    j["eta"] = b.variogram.eta;
    j["alpha"] = b.variogram.alpha;
  }
  return j;
}

json sigma2_json(const Sigma2Estimate& s) {
  return {{"value", s.value},
          {"std_error", s.std_error},
          {"window", s.window},
          {"offset_count", s.offset_count},
          {"n_per_offset", s.n_per_offset},
          {"capped", s.capped},
          {"shells", static_cast<long>(s.shells.size())}};
}

void write_shells_csv(ArtifactWriter& aw, const std::string& name,
                      const Sigma2Estimate& s) {
  std::vector<std::vector<double>> rows;
  for (const auto& sh : s.shells)
    rows.push_back({sh.reach, sh.contribution, sh.std_error,
                    static_cast<double>(sh.offsets)});
  write_csv(aw.add(name), {"reach", "contribution", "std_error", "offsets"}, rows);
}

GridSpec square_grid(const ExperimentConfig& c) {
  GridSpec g;
  g.dim = c.dim;
  g.origin = c.origin;
  g.delta = c.delta;
  const long n = std::lround(c.extent / c.delta);
  for (int k = 0; k < c.dim; ++k) g.counts[static_cast<std::size_t>(k)] = n;
  g.validate();
  return g;
}

void run_simulate(const ExperimentConfig& c, ArtifactWriter& aw) {
  const GridSpec g = square_grid(c);
  FieldSimulator sim(c.model, c.control, g.sites(), &g);
  const long n = c.replicates;
  std::cout << "[maxstab] simulate: " << n << " replicates, " << g.size()
            << " sites, method " << to_string(sim.method()) << "\n";

  // Sites whose marginal law gets a KS check, drawn once from the selection
  // stream so the choice is reproducible.
  std::vector<std::size_t> check_sites;
  if (n >= 100) {
    RngStream sel(c.control.seed, stream_id(StreamPurpose::selection, 0));
    std::set<std::size_t> chosen;
    const std::size_t want = std::min<std::size_t>(5, g.size());
    while (chosen.size() < want)
      chosen.insert(static_cast<std::size_t>(sel.uniform() *
                                             static_cast<double>(g.size())));
    check_sites.assign(chosen.begin(), chosen.end());
  }
  std::vector<std::vector<double>> site_values(
      check_sites.size(), std::vector<double>(static_cast<std::size_t>(n)));

  std::vector<SimulationInfo> infos(static_cast<std::size_t>(n));
  FieldRealization first;
  const std::string tag = model_tag(c.model);
  const long chunk = 256;
  for (long lo = 0; lo < n; lo += chunk) {
    const long len = std::min(chunk, n - lo);
    std::vector<std::vector<double>> vals(static_cast<std::size_t>(len));
    parallel_for(static_cast<std::size_t>(len), c.control.threads,
                 [&](std::size_t j) {
                   const auto r = static_cast<std::uint64_t>(lo) + j;
                   vals[j] = sim.sample(r, &infos[static_cast<std::size_t>(r)]);
                 });
    for (long j = 0; j < len; ++j) {
      const long r = lo + j;
      FieldRealization f;
      f.grid = g;
      f.values = std::move(vals[static_cast<std::size_t>(j)]);
      f.seed = c.control.seed;
      f.replicate = static_cast<std::uint64_t>(r);
      f.model_tag = tag;
      f.info = infos[static_cast<std::size_t>(r)];
      for (std::size_t si = 0; si < check_sites.size(); ++si)
        site_values[si][static_cast<std::size_t>(r)] = f.values[check_sites[si]];
      char name[48];
      std::snprintf(name, sizeof name, "fields/field_%05ld.bin", r);
      write_field(aw.add(name), f);
      if (r == 0) first = f;
    }
  }
  field_to_csv(aw.add("field_first.csv"), first);

  json margins = json::array();
  bool margins_pass = true;
  std::vector<std::vector<double>> margin_rows;
  for (std::size_t si = 0; si < check_sites.size(); ++si) {
    const MarginCheck mc = margin_check(site_values[si]);
    margins_pass = margins_pass && mc.pass;
    double coords[3] = {0, 0, 0};
    g.site(check_sites[si], coords);
    margins.push_back({{"site", check_sites[si]},
                       {"ks_stat", mc.statistic},
                       {"threshold", mc.threshold},
                       {"pass", mc.pass}});
    margin_rows.push_back({static_cast<double>(check_sites[si]), coords[0],
                           coords[1], coords[2], mc.statistic, mc.threshold,
                           mc.pass ? 1.0 : 0.0});
  }
  if (!margin_rows.empty())
    write_csv(aw.add("margins.csv"),
              {"site", "x0", "x1", "x2", "ks_stat", "threshold", "pass"},
              margin_rows);

  long dmin = infos.empty() ? 0 : infos[0].spectral_draws;
  long dmax = dmin;
  double dsum = 0.0;
  bool all_exact = true, any_bias = false;
  double trunc_max = 0.0;
  for (const auto& info : infos) {
    dmin = std::min(dmin, info.spectral_draws);
    dmax = std::max(dmax, info.spectral_draws);
    dsum += static_cast<double>(info.spectral_draws);
    all_exact = all_exact && info.stopped_exactly;
    any_bias = any_bias || info.bias_possible;
    trunc_max = std::max(trunc_max, info.truncation_bound);
  }

  json rep;
  rep["command"] = "simulate";
  rep["model"] = model_json(c);
  rep["method"] = to_string(sim.method());
  rep["grid"] = {{"delta", g.delta},
                 {"extent", c.extent},
                 {"origin", {g.origin[0], g.origin[1], g.origin[2]}},
                 {"sites", g.size()}};
  rep["replicates"] = n;
  rep["draws"] = {{"min", dmin},
                  {"max", dmax},
                  {"mean", n > 0 ? dsum / static_cast<double>(n) : 0.0}};
  rep["stopped_exactly"] = all_exact;
  rep["bias_possible"] = any_bias;
  rep["truncation_bound"] = trunc_max;
  rep["threshold_bound"] = infos.empty() ? 0.0 : infos[0].threshold_bound;
  rep["threshold_quantile"] = infos.empty() ? 0.0 : infos[0].threshold_quantile;
  rep["margins"] = margins;
  rep["margins_pass"] = margins_pass;
  aw.write_json("report.json", rep);
}

void run_theta(const ExperimentConfig& c, ArtifactWriter& aw) {
  std::vector<std::vector<double>> rows;
  json jl = json::array();
  double max_abs_z = 0.0;
  for (std::size_t i = 0; i < c.theta_lags.size(); ++i) {
    const double h = c.theta_lags[i];
    double hvec[3] = {h, 0.0, 0.0};
    SimulationControl ctl = c.control;
    ctl.seed = derive_seed(c.control.seed, static_cast<std::uint64_t>(i));
    const ThetaEstimate est =
        estimate_theta_pair(c.model, hvec, c.dim, ctl, c.replicates);
    const double closed = theta_closed_form(c.model, hvec, c.dim);
    const double z =
        est.std_error > 0.0 ? (est.value - closed) / est.std_error : 0.0;
    max_abs_z = std::max(max_abs_z, std::abs(z));
    rows.push_back({h, est.value, est.std_error, closed, z});
    jl.push_back({{"lag", h},
                  {"theta_hat", est.value},
                  {"std_error", est.std_error},
                  {"closed_form", closed},
                  {"z", z}});
    std::cout << "[maxstab] theta(" << h << ") = " << est.value << " +- "
              << est.std_error << "  closed form " << closed << "\n";
  }
  write_csv(aw.add("theta.csv"),
            {"lag", "theta_hat", "std_error", "closed_form", "z"}, rows);
  json rep;
  rep["command"] = "theta";
  rep["model"] = model_json(c);
  rep["replicates"] = c.replicates;
  rep["lags"] = jl;
  rep["max_abs_z"] = max_abs_z;
  rep["within_3se"] = max_abs_z <= 3.0;
  aw.write_json("report.json", rep);
}

void run_nu(const ExperimentConfig& c, ArtifactWriter& aw) {
  const NuCurve curve =
      estimate_nu_curve(c.model, c.nu_lags, c.dim, c.delta, c.control,
                        c.replicates, c.nu_delta_moment);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const NuEstimate& pt = curve.points[i];
    double h[3] = {static_cast<double>(pt.lag[0]),
                   static_cast<double>(pt.lag[1]),
                   static_cast<double>(pt.lag[2])};
    SimulationControl ctl = c.control;
    ctl.seed = derive_seed(c.control.seed, 0x10000u + static_cast<std::uint64_t>(i));
    const ThetaEstimate tp =
        estimate_theta_pair(c.model, h, c.dim, ctl, c.replicates);
    // theta is structurally in [1, 2]; excursions compatible with the MC
    // standard error are clamped, anything larger is a real failure.
    MixingBound mb;
    try {
      mb = mixing_alpha_bound(tp.value, {h[0], h[1], h[2]},
                              std::max(0.1, 3.0 * tp.std_error));
    } catch (const input_error& err) {
      throw numerical_error(err.what());
    }
    rows.push_back({h[0], h[1], h[2], pt.norm_euclid, pt.norm_chebyshev,
                    pt.value, pt.std_error, pt.theta_a, pt.theta_b,
                    pt.theta_union, pt.negative_raw ? 1.0 : 0.0, tp.value,
                    mb.alpha_bound});
    std::cout << "[maxstab] nu(" << pt.lag[0] << "," << pt.lag[1] << ","
              << pt.lag[2] << ") = " << pt.value << " +- " << pt.std_error
              << "\n";
  }
  write_csv(aw.add("nu.csv"),
            {"h0", "h1", "h2", "norm_euclid", "norm_chebyshev", "nu_hat",
             "std_error", "theta_a", "theta_b", "theta_union", "negative_raw",
             "theta_pair", "alpha_bound"},
            rows);
  json rep;
  rep["command"] = "nu-decay";
  rep["model"] = model_json(c);
  rep["replicates"] = c.replicates;
  rep["delta"] = c.delta;
  rep["delta_moment"] = c.nu_delta_moment;
  rep["points"] = static_cast<long>(curve.points.size());
  if (curve.fit) {
    const DecayFit& f = *curve.fit;
    rep["fit"] = {{"k_hat", f.k_hat},       {"b_hat", f.b_hat},
                  {"b_se", f.b_se},         {"r2", f.r2},
                  {"threshold", f.threshold}, {"pass", f.b_hat > f.threshold},
                  {"window_lo", f.window_lo}, {"window_hi", f.window_hi},
                  {"lags_used", f.lags_used}};
    std::cout << "[maxstab] decay fit: b_hat = " << f.b_hat << " (threshold "
              << f.threshold << ")\n";
  } else {
    rep["fit"] = nullptr;
    std::cout << "[maxstab] decay fit: too few lags above noise\n";
  }
  aw.write_json("report.json", rep);
}

json normality_json(const NormalityStats& s) {
  return {{"ks_stat", s.ks_stat},   {"ks_p", s.ks_p},
          {"ad_stat", s.ad_stat},   {"ad_p", s.ad_p},
          {"skewness", s.skewness}, {"ex_kurtosis", s.ex_kurtosis},
          {"n", s.n}};
}

void run_clt(const ExperimentConfig& c, ArtifactWriter& aw) {
  const VanHoveSequence seq = van_hove_squares(c.dim, c.clt_lengths);
  std::cout << "[maxstab] clt: functional " << c.functional.name() << ", "
            << seq.regions.size() << " regions, " << c.replicates
            << " replicates each\n";
  const CltReport rep = clt_experiment(c.model, c.functional, seq, c.delta,
                                       c.replicates, c.control, c.clt_options);

  std::vector<std::vector<double>> rrows;
  json jr = json::array();
  for (std::size_t i = 0; i < rep.regions.size(); ++i) {
    const RegionReport& r = rep.regions[i];
    rrows.push_back({r.length, r.measure, static_cast<double>(r.replicates),
                     r.mean, r.variance, r.mu_used, seq.boundary_ratios[i],
                     r.normality.ks_stat, r.normality.ks_p, r.normality.ad_stat,
                     r.normality.ad_p, r.normality.skewness,
                     r.normality.ex_kurtosis, r.boundary_var_ratio,
                     r.ad_pass_1pct ? 1.0 : 0.0});
    jr.push_back({{"length", r.length},
                  {"measure", r.measure},
                  {"replicates", r.replicates},
                  {"mean", r.mean},
                  {"variance", r.variance},
                  {"mu_used", r.mu_used},
                  {"boundary_ratio_r1", seq.boundary_ratios[i]},
                  {"normality", normality_json(r.normality)},
                  {"boundary_var_ratio", r.boundary_var_ratio},
                  {"ad_pass_1pct", r.ad_pass_1pct}});
    std::cout << "[maxstab] clt region L=" << r.length << ": var "
              << r.variance << ", AD p " << r.normality.ad_p
              << ", boundary share " << r.boundary_var_ratio << "\n";
  }
  write_csv(aw.add("regions.csv"),
            {"length", "measure", "replicates", "mean", "variance", "mu_used",
             "boundary_ratio_r1", "ks_stat", "ks_p", "ad_stat", "ad_p",
             "skewness", "ex_kurtosis", "boundary_var_ratio", "ad_pass_1pct"},
            rrows);

  std::vector<std::vector<double>> qrows;
  for (const auto& [th, em] : rep.qq) qrows.push_back({th, em});
  write_csv(aw.add("qq.csv"), {"theoretical", "empirical"}, qrows);
  write_shells_csv(aw, "shells_integral.csv", rep.sigma2_integral);
  write_shells_csv(aw, "shells_cubes.csv", rep.sigma2_cubes);

  json j;
  j["command"] = "clt";
  j["model"] = model_json(c);
  j["functional"] = {{"name", rep.functional.name()},
                     {"param", rep.functional.param}};
  j["delta"] = rep.delta;
  j["replicates"] = c.replicates;
  j["mu"] = rep.mu;
  j["mu_plug_in"] = rep.mu_plug_in;
  j["sigma2_integral"] = sigma2_json(rep.sigma2_integral);
  j["sigma2_cubes"] = sigma2_json(rep.sigma2_cubes);
  const double combined_se = std::hypot(rep.sigma2_integral.std_error,
                                        rep.sigma2_cubes.std_error);
  j["sigma2_agreement_z"] =
      combined_se > 0.0
          ? (rep.sigma2_integral.value - rep.sigma2_cubes.value) / combined_se
          : 0.0;
  j["regions"] = jr;
  j["asymptotics_reached"] = rep.asymptotics_reached;
  aw.write_json("report.json", j);
  std::cout << "[maxstab] sigma2: integral " << rep.sigma2_integral.value
            << " +- " << rep.sigma2_integral.std_error << ", cubes "
            << rep.sigma2_cubes.value << " +- " << rep.sigma2_cubes.std_error
            << "\n";
}

void run_risk(const ExperimentConfig& c, ArtifactWriter& aw) {
  std::cout << "[maxstab] risk: u = " << c.risk.u << ", "
            << c.risk.lengths.size() << " regions, " << c.risk.replicates
            << " replicates" << (c.risk.synthetic_null ? " (synthetic null)" : "")
            << "\n";
  const RiskReport rep =
      risk_experiment(c.model, c.dim, c.delta, c.risk, c.control);

  std::vector<std::vector<double>> rows;
  json jr = json::array();
  for (const RegionRisk& r : rep.regions) {
    json jlv = json::array();
    for (const LevelRow& lv : r.levels) {
      rows.push_back({r.length, r.measure, static_cast<double>(r.replicates),
                      r.mean_loss, r.var_loss, lv.level, lv.var_empirical,
                      lv.var_gaussian, lv.es_empirical});
      jlv.push_back({{"level", lv.level},
                     {"var_empirical", lv.var_empirical},
                     {"var_gaussian", lv.var_gaussian},
                     {"es_empirical", lv.es_empirical}});
    }
    jr.push_back({{"length", r.length},
                  {"measure", r.measure},
                  {"replicates", r.replicates},
                  {"mean_loss", r.mean_loss},
                  {"var_loss", r.var_loss},
                  {"levels", jlv}});
    std::cout << "[maxstab] risk region L=" << r.length << ": mean loss "
              << r.mean_loss << "\n";
  }
  write_csv(aw.add("risk.csv"),
            {"length", "measure", "replicates", "mean_loss", "var_loss",
             "level", "var_empirical", "var_gaussian", "es_empirical"},
            rows);

  std::vector<std::vector<double>> srows;
  json js = json::array();
  for (const HomogeneitySlope& s : rep.slopes) {
    srows.push_back({s.level, s.slope, s.se, s.r2, static_cast<double>(s.points),
                     s.degenerate ? 1.0 : 0.0});
    js.push_back({{"level", s.level},
                  {"slope", s.slope},
                  {"se", s.se},
                  {"r2", s.r2},
                  {"points", s.points},
                  {"degenerate", s.degenerate}});
    if (!s.degenerate)
      std::cout << "[maxstab] homogeneity slope at p=" << s.level << ": "
                << s.slope << " +- " << s.se << "\n";
  }
  write_csv(aw.add("slopes.csv"),
            {"level", "slope", "se", "r2", "points", "degenerate"}, srows);

  json j;
  j["command"] = "risk";
  j["model"] = model_json(c);
  j["u"] = rep.u;
  j["dim"] = rep.dim;
  j["delta"] = rep.delta;
  j["synthetic"] = rep.synthetic;
  j["replicates"] = c.risk.replicates;
  j["mu"] = rep.mu;
  j["mu_hat"] = rep.mu_hat;
  j["sigma2"] = sigma2_json(rep.sigma2);
  j["regions"] = jr;
  j["slopes"] = js;
  aw.write_json("report.json", j);
}

void write_manifest(const RunOptions& opts, const ExperimentConfig& c,
                    ArtifactWriter& aw) {
  std::vector<std::string> paths = aw.rel;
  std::sort(paths.begin(), paths.end());
  json arts = json::array();
  for (const std::string& p : paths) {
    const fs::path full = aw.dir / p;
    arts.push_back({{"path", p},
                    {"sha256", sha256_file(full)},
                    {"bytes", static_cast<std::uint64_t>(fs::file_size(full))}});
  }
  json m;
  m["schema_version"] = 1;
  m["command"] = to_string(opts.command);
  m["reproducible"] = opts.reproducible;
  m["seed"] = c.control.seed;
  m["artifacts"] = arts;
  if (!opts.reproducible) m["timestamp"] = iso_utc_now();
  write_text(aw.dir / "manifest.json", m.dump(2) + "\n");
}

void write_error_json(const fs::path& out_dir, const std::string& type,
                      const std::string& message, int exit_status) {
  try {
    json e;
    e["type"] = type;
    e["message"] = message;
    e["exit"] = exit_status;
    write_text(out_dir / "error.json", e.dump(2) + "\n");
  } catch (...) {
    // The run already failed; a second I/O failure here has nothing to add.
  }
}

}  // namespace

int run_experiment(const RunOptions& opts) {
  std::error_code ec;
  fs::create_directories(opts.out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create output directory '"
              << opts.out_dir.string() << "': " << ec.message() << "\n";
    return 4;
  }

  std::string type;
  std::string message;
  int status = 0;
  try {
    ExperimentConfig c = load_config(opts.config_path, opts.command);
    if (opts.threads_override > 0)
      c.control.threads = static_cast<unsigned>(opts.threads_override);

    ArtifactWriter aw{opts.out_dir, {}};
    switch (opts.command) {
      case Command::simulate: run_simulate(c, aw); break;
      case Command::theta: run_theta(c, aw); break;
      case Command::nu_decay: run_nu(c, aw); break;
      case Command::clt: run_clt(c, aw); break;
      case Command::risk: run_risk(c, aw); break;
    }
    write_text(aw.add("config_resolved.cfg"), serialize_config(c));
    write_manifest(opts, c, aw);
    std::cout << "[maxstab] wrote " << aw.rel.size() + 1 << " artifacts to "
              << opts.out_dir.string() << "\n";
    return 0;
  } catch (const config_error& e) {
    type = "config";
    message = e.what();
    status = 2;
  } catch (const input_error& e) {
    type = "input";
    message = e.what();
    status = 2;
  } catch (const simulation_error& e) {
    type = "simulation";
    message = e.what();
    status = 3;
  } catch (const numerical_error& e) {
    type = "numerical";
    message = e.what();
    status = 3;
  } catch (const io_error& e) {
    type = "io";
    message = e.what();
    status = 4;
  } catch (const fs::filesystem_error& e) {
    type = "filesystem";
    message = e.what();
    status = 4;
  } catch (const std::exception& e) {
    type = "internal";
    message = e.what();
    status = 3;
  }
  std::cerr << "error (" << type << "): " << message << "\n";
  write_error_json(opts.out_dir, type, message, status);
  return status;
}

}  // namespace maxstab
