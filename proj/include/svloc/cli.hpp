#pragma once

// Command-line front end. run_cli is the whole program; tools/svloc.cpp only
// forwards argv to it.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "svloc/certificates.hpp"
#include "svloc/ensemble.hpp"
#include "svloc/experiments.hpp"
#include "svloc/io.hpp"
#include "svloc/localization.hpp"
#include "svloc/serialize.hpp"
#include "svloc/spectra.hpp"
#include "svloc/svg.hpp"

namespace svloc::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kNumerical = 2, kIo = 3 };

namespace fs = std::filesystem;

inline fs::path meta_path(const fs::path& matrix) { return fs::path(matrix.string() + ".meta.json"); }

inline std::optional<Json> read_meta(const fs::path& matrix) {
  const auto p = meta_path(matrix);
  if (!fs::exists(p)) return std::nullopt;
  try {
    return Json::parse(read_file(p));
  } catch (const Json::exception& e) {
    throw IoError("cannot parse " + p.string() + ": " + e.what());
  }
}

inline Json pair_json(const SingularPair& p, std::size_t k) {
  return Json{{"k", k}, {"value", p.value}, {"vector", p.vector}, {"residual", p.residual}, {"degenerate", p.degenerate}};
}

inline void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty() || out_path == "-") out << text;
  else write_file(out_path, text);
}

inline fs::path suffixed(const fs::path& p, std::size_t k) {
  if (k == 1) return p;
  return p.parent_path() / (p.stem().string() + "_k" + std::to_string(k) + p.extension().string());
}

inline std::string markdown_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::string out = "|";
  for (const auto& h : header) out += " " + h + " |";
  out += "\n|";
  for (std::size_t i = 0; i < header.size(); ++i) out += " --- |";
  out += "\n";
  for (const auto& r : rows) {
    out += "|";
    for (const auto& c : r) out += " " + c + " |";
    out += "\n";
  }
  return out;
}

inline std::string csv_lines(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + r[i];
    out += "\n";
  }
  return out;
}

struct Options {
  // generate
  std::size_t n = 100;
  double aspect = 2.0;
  std::optional<double> alpha;
  std::string law = "pareto";
  double scale = 1.0;
  bool normalize = false;
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  std::string out;
  std::string csv;
  // analyses
  std::string in;
  std::size_t k = 1;
  std::vector<double> c_grid{0.25, 0.5, 1.0, 2.0, 4.0};
  std::vector<double> epsilons{0.1, 0.2, 0.3};
  std::string plot;
  std::string profile_csv;
  std::optional<double> tau;
  std::vector<double> auto_tau;
  double c = 1.0;
  // sweep
  std::string config;
  std::size_t workers = 1;
  // report
  std::string records;
  std::string what = "transition";
  double epsilon = 0.1;
  std::optional<double> delta;
  std::vector<std::size_t> k_list;
};

inline Json tail_json(const TailLaw& law) { return law_json(law); }

inline TailLaw make_law(const Options& o) {
  const LawKind kind = parse_law_kind(o.law);
  if (kind == LawKind::Gaussian) return TailLaw::gaussian();
  if (!o.alpha) throw std::invalid_argument("--alpha is required for the " + o.law + " law (alpha > 0)");
  return TailLaw(kind, *o.alpha, o.scale, o.normalize);
}

inline int cmd_generate(const Options& o, std::ostream& out, std::ostream& err) {
  const TailLaw law = make_law(o);
  EnsembleConfig cfg{o.n, o.aspect, law, o.seed};
  cfg.validate();
  const Json resolved{{"command", "generate"}, {"n", o.n},     {"aspect", o.aspect},   {"N", cfg.rows()},
                      {"law", tail_json(law)}, {"seed", o.seed}, {"trial_index", o.trial}, {"out", o.out},
                      {"format", "SVLM"},      {"version", kMatrixFormatVersion}};
  err << "resolved config: " << resolved.dump() << "\n";
  const Matrix x = sample_matrix(cfg, o.trial);
  save_matrix(o.out, x);
  write_file(meta_path(o.out), resolved.dump(2) + "\n");
  if (!o.csv.empty()) write_file(o.csv, matrix_to_csv(x));
  out << "shape " << x.rows() << "x" << x.cols() << "\n";
  out << "tail " << tail_json(law).dump() << "\n";
  return kOk;
}

inline int cmd_spectra(const Options& o, std::ostream& out, std::ostream& err) {
  const Matrix x = load_matrix(o.in);
  if (o.k < 1 || o.k > x.cols())
    throw std::invalid_argument("--k must lie in [1, " + std::to_string(x.cols()) + "]");
  const Json resolved{{"command", "spectra"}, {"in", o.in}, {"k", o.k}, {"tolerance", kDefaultResidualTolerance}};
  err << "resolved config: " << resolved.dump() << "\n";
  const auto sr = full_svd(x, o.k);
  Json j{{"config", resolved},
         {"shape", {x.rows(), x.cols()}},
         {"singular_values", sr.singular_values},
         {"top", pair_json(sr.top, x.cols())},
         {"tolerance_used", sr.tolerance_used}};
  Json bottom = Json::array();
  for (std::size_t k = 1; k <= sr.bottom.size(); ++k) bottom.push_back(pair_json(sr.bottom[k - 1], k));
  j["bottom"] = bottom;
  emit(j.dump() + "\n", o.out, out);
  return kOk;
}

inline int cmd_localize(const Options& o, std::ostream& out, std::ostream& err) {
  const Matrix x = load_matrix(o.in);
  if (o.k < 1 || o.k > x.cols())
    throw std::invalid_argument("--k must lie in [1, " + std::to_string(x.cols()) + "] (k > n rejected)");
  for (double c : o.c_grid)
    if (!(c > 0.0)) throw std::invalid_argument("--c-grid values must be positive");
  for (double e : o.epsilons)
    if (!(e > 0.0 && e < 1.0)) throw std::invalid_argument("--epsilons values must lie in (0,1)");
  const Json resolved{{"command", "localize"}, {"in", o.in},        {"k", o.k},
                      {"c_grid", o.c_grid},   {"epsilons", o.epsilons}, {"plot", o.plot},
                      {"log_base", "e"}};
  err << "resolved config: " << resolved.dump() << "\n";
  const auto sr = full_svd(x, o.k);
  std::string lines;
  std::string profile;
  for (std::size_t k = 1; k <= o.k; ++k) {
    const auto& p = sr.bottom[k - 1];
    for (double c : o.c_grid) {
      Json rec = localize(p.vector, c, o.epsilons, p.degenerate);
      rec["k"] = k;
      rec["value"] = p.value;
      rec["residual"] = p.residual;
      rec["config"] = resolved;
      lines += rec.dump() + "\n";
    }
    if (!o.plot.empty()) {
      const double thr = hat_threshold(o.c_grid.front(), x.cols());
      const std::string title = "bottom singular vector k=" + std::to_string(k) + ", s=" + format_double(p.value);
      write_file(suffixed(o.plot, k), svg::profile(p.vector, title, thr));
    }
    for (const auto& pt : min_mass_profile(p.vector, o.epsilons))
      profile += std::to_string(k) + "," + format_double(pt.epsilon) + "," + format_double(pt.value) + "\n";
  }
  if (!o.profile_csv.empty()) write_file(o.profile_csv, "k,epsilon,value\n" + profile);
  emit(lines, o.out, out);
  return kOk;
}

inline int cmd_certify(const Options& o, std::ostream& out, std::ostream& err) {
  const Matrix x = load_matrix(o.in);
  if (x.rows() < x.cols()) throw std::invalid_argument("certify: matrix must be tall (rows >= cols)");
  if (o.tau.has_value() == !o.auto_tau.empty())
    throw std::invalid_argument("certify: give exactly one of --tau or --auto-tau b,a");

  Json resolved{{"command", "certify"}, {"in", o.in}};
  double tau = 0.0;
  if (o.tau) {
    if (!(*o.tau > 0.0)) throw std::invalid_argument("--tau must be positive");
    tau = *o.tau;
  } else {
    if (o.auto_tau.size() != 2) throw std::invalid_argument("--auto-tau expects two values b,a");
    // Tail constants come from the sidecar when present, else from --law/--alpha.
    const auto meta = read_meta(o.in);
    std::optional<double> alpha = o.alpha;
    double c_upper = 0.0;
    if (meta && meta->contains("law") && !(*meta)["law"]["constants"].is_null() && !o.alpha) {
      alpha = (*meta)["law"]["alpha"].get<double>();
      c_upper = (*meta)["law"]["constants"]["c_upper"].get<double>();
    } else {
      Options lo = o;
      lo.alpha = alpha;
      const TailLaw law = make_law(lo);
      if (!law.constants()) throw std::invalid_argument("--auto-tau needs a power-tail law");
      c_upper = law.constants()->c_upper;
    }
    if (!alpha) throw std::invalid_argument("--auto-tau needs --alpha");
    const TauParams tp{o.auto_tau[0], o.auto_tau[1]};
    tau = default_tau(x.rows(), *alpha, tp, c_upper);
    resolved["alpha"] = *alpha;
    resolved["c_upper"] = c_upper;
    resolved["auto_tau"] = {{"b_frak", tp.b_frak}, {"a_frak", tp.a_frak}};
  }
  resolved["tau"] = tau;
  err << "resolved config: " << resolved.dump() << "\n";
  const CertificateReport rep = upper_certificate(x, tau);
  Json j = rep;
  j["config"] = resolved;
  j["shape"] = {x.rows(), x.cols()};
  emit(j.dump(2) + "\n", o.out, out);
  return rep.valid ? kOk : kNumerical;
}

inline int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  Json raw;
  try {
    raw = Json::parse(read_file(o.config));
  } catch (const Json::exception& e) {
    throw ConfigError({std::string("config is not valid JSON: ") + e.what()});
  }
  const SweepConfig cfg = parse_sweep_config(raw);
  if (o.workers < 1) throw std::invalid_argument("--workers must be at least 1");
  err << "resolved config: " << config_to_json(cfg).dump() << "\n";
  const auto result = run_sweep(cfg, o.workers);
  write_sweep_outputs(o.out, cfg, result);
  out << "records " << result.records.size() << ", failures " << result.failures.size() << ", output " << o.out
      << "\n";
  bool numerical = false;
  for (const auto& f : result.failures) {
    err << "failed: " << f.message << "\n";
    numerical = numerical || f.numerical;
  }
  if (result.failures.empty()) return kOk;
  return numerical ? kNumerical : kUsage;
}

inline std::vector<TrialRecord> load_records(const std::string& dir) {
  const fs::path p = fs::is_directory(dir) ? fs::path(dir) / "records.jsonl" : fs::path(dir);
  auto recs = parse_records_jsonl(read_file(p));
  if (recs.empty()) throw std::invalid_argument("report: empty record set in " + p.string());
  return recs;
}

inline int cmd_report(const Options& o, std::ostream& out, std::ostream& err) {
  const auto recs = load_records(o.records);
  const fs::path dir = !o.out.empty() ? fs::path(o.out)
                                      : (fs::is_directory(o.records) ? fs::path(o.records) : fs::path(o.records).parent_path());
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string());
  // Sweep settings from the manifest, when one sits next to the records.
  double manifest_delta = 0.1;
  double kth_b = 0.2;
  const fs::path manifest = (fs::is_directory(o.records) ? fs::path(o.records) : fs::path(o.records).parent_path()) /
                            "manifest.json";
  if (fs::exists(manifest)) {
    try {
      const Json m = Json::parse(read_file(manifest));
      manifest_delta = m.at("config").value("delta", manifest_delta);
      kth_b = m.at("config").value("kth_b_frak", kth_b);
    } catch (const Json::exception& e) {
      throw IoError("cannot parse " + manifest.string() + ": " + e.what());
    }
  }
  const double delta = o.delta.value_or(manifest_delta);
  const Json resolved{{"command", "report"}, {"records", o.records}, {"what", o.what}, {"c", o.c},
                      {"epsilon", o.epsilon}, {"delta", delta},     {"kth_b_frak", kth_b},
                      {"out", dir.string()}};
  err << "resolved config: " << resolved.dump() << "\n";
  write_file(dir / (o.what + ".config.json"), resolved.dump(2) + "\n");

  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<svg::Series> series;
  std::string title, xl, yl;
  bool logx = false, logy = false;
  auto f = [](double v) { return format_double(v); };

  if (o.what == "transition") {
    std::map<std::size_t, std::vector<TrialRecord>> by_n;
    for (const auto& r : recs) by_n[r.cell.n].push_back(r);
    header = {"n", "alpha", "count", "degenerate_count", "median_hat_I_mass", "median_min_mass", "median_top_mass",
              "fraction_localized", "crossing_alpha", "separated"};
    for (const auto& [n, group] : by_n) {
      const auto scan = transition_scan(group, o.c, o.epsilon, delta);
      svg::Series s{"n=" + std::to_string(n), {}};
      for (const auto& row : scan.rows) {
        rows.push_back({std::to_string(n), f(row.alpha), std::to_string(row.count), std::to_string(row.degenerate_count),
                        f(row.median_hat_I_mass), f(row.median_min_mass), f(row.median_top_mass),
                        f(row.fraction_localized), scan.crossing_alpha ? f(*scan.crossing_alpha) : "",
                        scan.separated ? "true" : "false"});
        s.points.emplace_back(row.alpha, row.median_min_mass);
      }
      series.push_back(std::move(s));
    }
    title = "median min-mass profile at eps=" + f(o.epsilon);
    xl = "alpha";
    yl = "median min-mass";
  } else if (o.what == "scaling") {
    const auto fits = fit_all(recs);
    if (fits.empty()) throw std::invalid_argument("report scaling: no alpha has 3 n values with 5 trials each");
    header = {"alpha", "n_points", "slope", "intercept", "slope_corrected", "residual_sse", "kappa_low", "kappa_high",
              "exponent_position", "exponent_inside"};
    for (const auto& fit : fits) {
      std::vector<std::string> row{f(fit.alpha), std::to_string(fit.points.size()), f(fit.slope), f(fit.intercept),
                                   fit.slope_corrected ? f(*fit.slope_corrected) : "", f(fit.residual_sse)};
      if (fit.alpha < 2.0) {
        const auto b = bracket_check(fit);
        row.insert(row.end(), {f(b.kappa_low), f(b.kappa_high), f(b.position), b.exponent_inside ? "true" : "false"});
      } else {
        row.insert(row.end(), {"", "", "", ""});
      }
      rows.push_back(row);
      svg::Series s{"alpha=" + f(fit.alpha), {}};
      for (const auto& c : fit.cells) s.points.emplace_back(static_cast<double>(c.n), c.median_s_min);
      series.push_back(std::move(s));
    }
    title = "median s_min against n";
    xl = "n";
    yl = "median s_min";
    logx = logy = true;
  } else if (o.what == "baiyin") {
    header = {"alpha", "n", "aspect", "trials", "mean_ratio", "limit", "deviation"};
    for (const auto& [cell, group] : group_by_cell(recs)) {
      const auto& first = *group.front();
      const bool eligible = first.law == LawKind::Gaussian || (cell.alpha > 2.0 && first.normalized);
      if (!eligible) continue;
      std::vector<TrialRecord> cell_recs;
      for (const auto* r : group) cell_recs.push_back(*r);
      const auto b = baiyin_check(cell_recs);
      rows.push_back({f(b.alpha), std::to_string(b.n), f(b.aspect), std::to_string(b.trials), f(b.mean_ratio),
                      f(b.limit), f(b.deviation)});
      out << "limit 1 - sqrt(1/" << f(b.aspect) << ") = " << f(b.limit) << "\n";
    }
    if (rows.empty()) throw std::invalid_argument("report baiyin: no Gaussian or normalized alpha > 2 cells");
    std::map<double, svg::Series> by_alpha;
    for (const auto& r : rows) {
      auto& s = by_alpha[std::stod(r[0])];
      s.label = "alpha=" + r[0];
      s.points.emplace_back(std::stod(r[1]), std::stod(r[4]));
    }
    for (auto& [a, s] : by_alpha) series.push_back(std::move(s));
    title = "mean s_min / sqrt(N)";
    xl = "n";
    yl = "s_min / sqrt(N)";
  } else if (o.what == "kth") {
    header = {"alpha", "n", "k", "window", "in_regime", "count", "degenerate_count", "median_value",
              "median_hat_I_mass", "median_min_mass", "median_ipr", "median_top_mass", "flag"};
    for (const auto& [cell, group] : group_by_cell(recs)) {
      std::vector<TrialRecord> cell_recs;
      for (const auto* r : group) cell_recs.push_back(*r);
      std::vector<std::size_t> ks = o.k_list;
      if (ks.empty())
        for (const auto& v : cell_recs.front().vectors) ks.push_back(v.k);
      for (const auto& s : kth_vector_scan(cell_recs, ks, o.c, o.epsilon, kth_b))
        rows.push_back({f(cell.alpha), std::to_string(cell.n), std::to_string(s.k), std::to_string(s.window),
                        s.in_regime ? "true" : "false", std::to_string(s.count), std::to_string(s.degenerate_count),
                        f(s.median_value), f(s.median_hat_I_mass), f(s.median_min_mass), f(s.median_ipr),
                        f(s.median_top_mass), s.flag});
    }
    title = "";
  } else {
    throw std::invalid_argument("--what must be transition, scaling, baiyin or kth");
  }

  write_file(dir / (o.what + ".csv"), csv_lines(header, rows));
  const std::string md = markdown_table(header, rows);
  write_file(dir / (o.what + ".md"), md);
  if (!series.empty()) write_file(dir / (o.what + ".svg"), svg::lines(series, title, xl, yl, logx, logy));
  out << md;
  return kOk;
}

inline int cmd_plot(const Options& o, std::ostream& out, std::ostream& err) {
  const Matrix x = load_matrix(o.in);
  if (o.k < 1 || o.k > x.cols()) throw std::invalid_argument("--k must lie in [1, " + std::to_string(x.cols()) + "]");
  const Json resolved{{"command", "plot"}, {"in", o.in}, {"k", o.k}, {"c", o.c}, {"out", o.out}};
  err << "resolved config: " << resolved.dump() << "\n";
  const auto sr = full_svd(x, o.k);
  const double thr = hat_threshold(o.c, x.cols());
  for (std::size_t k = 1; k <= o.k; ++k) {
    const auto& p = sr.bottom[k - 1];
    const std::string title = "bottom singular vector k=" + std::to_string(k) + ", s=" + format_double(p.value);
    write_file(suffixed(o.out, k), svg::profile(p.vector, title, thr));
  }
  out << "wrote " << o.k << " profile plot(s)\n";
  return kOk;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Heavy-tailed random matrix singular-vector localization laboratory", "svloc"};
  app.set_version_flag("--version", std::string(kCodeVersion));
  app.set_config("--defaults", "", "TOML file supplying defaults for any flag; flags given on the command line win");
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("generate", "Sample one matrix and write it in the binary format");
  gen->add_option("--n", o.n, "column count n")->required()->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
  gen->add_option("--aspect", o.aspect, "aspect ratio N/n (> 1)")->capture_default_str();
  gen->add_option("--alpha", o.alpha, "tail index alpha (> 0); ignored for the Gaussian law");
  gen->add_option("--law", o.law, "pareto | student-t | gaussian")->capture_default_str();
  gen->add_option("--scale", o.scale, "Pareto cutoff")->capture_default_str();
  gen->add_flag("--normalize", o.normalize, "scale to unit variance (alpha > 2)");
  gen->add_option("--seed", o.seed, "64-bit seed")->capture_default_str();
  gen->add_option("--trial", o.trial, "trial index of the stream")->capture_default_str();
  gen->add_option("--out", o.out, "output matrix file")->required();
  gen->add_option("--csv", o.csv, "also export CSV here");

  auto* spe = app.add_subcommand("spectra", "Singular values and bottom/top right singular vectors");
  spe->add_option("--in", o.in, "matrix file")->required();
  spe->add_option("--k", o.k, "bottom vectors")->capture_default_str();
  spe->add_option("--out", o.out, "JSON output (default stdout)");

  auto* loc = app.add_subcommand("localize", "Localization reports for the bottom k singular vectors");
  loc->add_option("--in", o.in, "matrix file")->required();
  loc->add_option("--k", o.k, "bottom vectors")->capture_default_str();
  loc->add_option("--c-grid", o.c_grid, "threshold constants c")->delimiter(',')->capture_default_str();
  loc->add_option("--epsilons", o.epsilons, "min-mass epsilons")->delimiter(',')->capture_default_str();
  loc->add_option("--plot", o.plot, "SVG profile path (suffixed _kK for k > 1)");
  loc->add_option("--profile-csv", o.profile_csv, "CSV of (k, epsilon, value)");
  loc->add_option("--out", o.out, "JSONL output (default stdout)");

  auto* cer = app.add_subcommand("certify", "Small-column upper certificate for s_min");
  cer->add_option("--in", o.in, "matrix file")->required();
  cer->add_option("--alpha", o.alpha, "tail index for --auto-tau");
  cer->add_option("--law", o.law, "law supplying C_u when no sidecar exists")->capture_default_str();
  cer->add_option("--tau", o.tau, "entry cutoff");
  cer->add_option("--auto-tau", o.auto_tau, "b,a for the automatic cutoff")->delimiter(',')->expected(2);
  cer->add_option("--out", o.out, "JSON output (default stdout)");

  auto* swp = app.add_subcommand("sweep", "Run a seeded Monte Carlo sweep");
  swp->add_option("--config", o.config, "sweep config (JSON)")->required();
  swp->add_option("--workers", o.workers, "worker threads")->capture_default_str();
  swp->add_option("--out", o.out, "output directory")->required();

  auto* rep = app.add_subcommand("report", "Aggregate tables and plots from a sweep");
  rep->add_option("--records", o.records, "sweep output directory or records.jsonl")->required();
  rep->add_option("--what", o.what, "transition | scaling | baiyin | kth")->capture_default_str();
  rep->add_option("--c", o.c, "threshold constant")->capture_default_str();
  rep->add_option("--epsilon", o.epsilon, "min-mass epsilon")->capture_default_str();
  rep->add_option("--delta", o.delta, "localization delta (default: the sweep's, else 0.1)");
  rep->add_option("--k-list", o.k_list, "k values for the kth report")->delimiter(',');
  rep->add_option("--out", o.out, "output directory (default: the records directory)");

  auto* plt = app.add_subcommand("plot", "Bar-chart profile of bottom singular vectors");
  plt->add_option("--in", o.in, "matrix file")->required();
  plt->add_option("--k", o.k, "bottom vectors")->capture_default_str();
  plt->add_option("--c", o.c, "threshold constant for the reference line")->capture_default_str();
  plt->add_option("--out", o.out, "SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) return cmd_generate(o, out, err);
    if (*spe) return cmd_spectra(o, out, err);
    if (*loc) return cmd_localize(o, out, err);
    if (*cer) return cmd_certify(o, out, err);
    if (*swp) return cmd_sweep(o, out, err);
    if (*rep) return cmd_report(o, out, err);
    if (*plt) return cmd_plot(o, out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const SvdNonConvergence& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const NormNonConvergence& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}

}  // namespace svloc::cli
