#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "svloc/certificates.hpp"
#include "svloc/ensemble.hpp"
#include "svloc/io.hpp"
#include "svloc/localization.hpp"
#include "svloc/serialize.hpp"
#include "svloc/spectra.hpp"

#ifndef SVLOC_VERSION
#define SVLOC_VERSION "unknown"
#endif

namespace svloc {

inline constexpr const char* kCodeVersion = SVLOC_VERSION;

// All schema problems found in a sweep config, reported together.
struct ConfigError : std::invalid_argument {
  explicit ConfigError(std::vector<std::string> problems)
      : std::invalid_argument(join(problems)), problems(std::move(problems)) {}
  std::vector<std::string> problems;

 private:
  static std::string join(const std::vector<std::string>& ps) {
    std::string out = "invalid sweep config:";
    for (const auto& p : ps) out += "\n  - " + p;
    return out;
  }
};

enum class NormalizeMode { Auto, Always, Never };

struct SweepConfig {
  std::vector<double> alphas{0.8, 1.2, 1.5, 1.8, 2.5, 3.0, 5.0};
  std::vector<std::size_t> ns{100, 200, 400, 800};
  double aspect = 2.0;
  std::size_t trials_per_cell = 50;
  std::uint64_t base_seed = 0;
  std::size_t k_vectors = 1;
  std::vector<double> c_grid{0.25, 0.5, 1.0, 2.0, 4.0};
  std::vector<double> epsilons{0.1, 0.2, 0.3};
  TauParams tau_params;
  LawKind law_kind = LawKind::SymmetricPareto;
  // Auto normalizes exactly when the variance exists.
  NormalizeMode normalize = NormalizeMode::Auto;
  double delta = 0.1;
  double census_c = 0.1;
  double kth_b_frak = 0.2;
  bool compute_vectors = true;
  std::size_t budget = 100000;

  std::size_t total_trials() const { return trials_per_cell * alphas.size() * ns.size(); }

  bool normalizes(double alpha) const {
    if (law_kind == LawKind::Gaussian) return false;
    switch (normalize) {
      case NormalizeMode::Auto: return alpha > 2.0;
      case NormalizeMode::Always: return true;
      case NormalizeMode::Never: return false;
    }
    return false;
  }

  // For the Gaussian law alpha only labels the cell.
  TailLaw law_for(double alpha) const {
    if (law_kind == LawKind::Gaussian) return TailLaw::gaussian();
    return TailLaw(law_kind, alpha, 1.0, normalizes(alpha));
  }

  std::vector<std::string> problems() const {
    std::vector<std::string> out;
    auto distinct = [](auto v) {
      std::sort(v.begin(), v.end());
      return std::adjacent_find(v.begin(), v.end()) == v.end();
    };
    if (alphas.empty()) out.push_back("alphas: must be nonempty");
    for (double a : alphas)
      if (!(a > 0.0) || !std::isfinite(a)) out.push_back("alphas: every alpha must satisfy alpha > 0");
    if (!distinct(alphas)) out.push_back("alphas: duplicate entries");
    if (normalize == NormalizeMode::Always && law_kind != LawKind::Gaussian)
      for (double a : alphas)
        if (!(a > 2.0)) {
          out.push_back("normalize_variance: true requires every alpha > 2");
          break;
        }
    if (ns.empty()) out.push_back("ns: must be nonempty");
    for (std::size_t n : ns)
      if (n < 3) out.push_back("ns: every n must be at least 3");
    if (!distinct(ns)) out.push_back("ns: duplicate entries");
    if (!(aspect > 1.0) || !std::isfinite(aspect)) out.push_back("aspect: must satisfy aspect > 1");
    if (trials_per_cell < 1) out.push_back("trials_per_cell: must be at least 1");
    if (k_vectors < 1) out.push_back("k_vectors: must be at least 1");
    for (std::size_t n : ns)
      if (k_vectors > n) {
        out.push_back("k_vectors: must not exceed the smallest n");
        break;
      }
    if (c_grid.empty()) out.push_back("c_grid: must be nonempty");
    for (double c : c_grid)
      if (!(c > 0.0) || !std::isfinite(c)) out.push_back("c_grid: every c must be positive");
    if (epsilons.empty()) out.push_back("epsilons: must be nonempty");
    for (double e : epsilons)
      if (!(e > 0.0 && e < 1.0)) out.push_back("epsilons: every epsilon must lie in (0,1)");
    if (!(tau_params.b_frak > 0.0 && tau_params.b_frak < 1.0)) out.push_back("tau_params.b_frak: must lie in (0,1)");
    if (!(tau_params.a_frak > 1.0)) out.push_back("tau_params.a_frak: must exceed 1");
    if (!(delta > 0.0 && delta < 1.0)) out.push_back("delta: must lie in (0,1)");
    if (!(census_c > 0.0 && census_c < 0.5)) out.push_back("census_c: must lie in (0,1/2)");
    if (!(kth_b_frak > 0.0 && kth_b_frak < 0.5)) out.push_back("kth_b_frak: must lie in (0,1/2)");
    if (budget < 1) out.push_back("budget: must be at least 1");
    if (!alphas.empty() && !ns.empty() && total_trials() > budget)
      out.push_back("budget: trials_per_cell * |alphas| * |ns| = " + std::to_string(total_trials()) +
                    " exceeds budget " + std::to_string(budget));
    return out;
  }

  void validate() const {
    auto ps = problems();
    if (!ps.empty()) throw ConfigError(std::move(ps));
  }
};

inline std::string_view config_law_name(LawKind k) {
  switch (k) {
    case LawKind::SymmetricPareto: return "pareto";
    case LawKind::StudentT: return "student-t";
    case LawKind::Gaussian: return "gaussian";
  }
  return "?";
}

// Resolved config with every default materialized.
inline Json config_to_json(const SweepConfig& c) {
  Json norm = c.normalize == NormalizeMode::Auto ? Json("auto") : Json(c.normalize == NormalizeMode::Always);
  return Json{{"alphas", c.alphas},
              {"ns", c.ns},
              {"aspect", c.aspect},
              {"trials_per_cell", c.trials_per_cell},
              {"base_seed", c.base_seed},
              {"k_vectors", c.k_vectors},
              {"c_grid", c.c_grid},
              {"epsilons", c.epsilons},
              {"tau_params", {{"b_frak", c.tau_params.b_frak}, {"a_frak", c.tau_params.a_frak}}},
              {"law_kind", std::string(config_law_name(c.law_kind))},
              {"normalize_variance", norm},
              {"delta", c.delta},
              {"census_c", c.census_c},
              {"kth_b_frak", c.kth_b_frak},
              {"compute_vectors", c.compute_vectors},
              {"budget", c.budget}};
}

// Parses a sweep config, collecting every type and value problem before throwing.
inline SweepConfig parse_sweep_config(const Json& j) {
  std::vector<std::string> problems;
  SweepConfig c;
  if (!j.is_object()) throw ConfigError({"top level: expected a JSON object"});

  static const std::set<std::string> known{"alphas",  "ns",          "aspect",     "trials_per_cell", "base_seed",
                                           "k_vectors", "c_grid",    "epsilons",   "tau_params",      "law_kind",
                                           "normalize_variance", "delta", "census_c", "kth_b_frak",   "compute_vectors",
                                           "budget"};
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) problems.push_back(key + ": unknown key");

  auto get_real = [&](const char* key, double& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_number()) {
      problems.push_back(std::string(key) + ": expected a number");
      return;
    }
    out = j[key].get<double>();
  };
  auto get_count = [&](const char* key, std::size_t& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_number_integer() || j[key].get<std::int64_t>() < 0) {
      problems.push_back(std::string(key) + ": expected a nonnegative integer");
      return;
    }
    out = j[key].get<std::size_t>();
  };
  auto get_reals = [&](const char* key, std::vector<double>& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_array()) {
      problems.push_back(std::string(key) + ": expected an array of numbers");
      return;
    }
    std::vector<double> v;
    for (const auto& e : j[key]) {
      if (!e.is_number()) {
        problems.push_back(std::string(key) + ": expected an array of numbers");
        return;
      }
      v.push_back(e.get<double>());
    }
    out = std::move(v);
  };

  get_reals("alphas", c.alphas);
  if (j.contains("ns")) {
    const auto& a = j["ns"];
    bool ok = a.is_array();
    std::vector<std::size_t> v;
    if (ok)
      for (const auto& e : a) {
        if (!e.is_number_integer() || e.get<std::int64_t>() < 0) {
          ok = false;
          break;
        }
        v.push_back(e.get<std::size_t>());
      }
    if (ok) c.ns = std::move(v);
    else problems.push_back("ns: expected an array of nonnegative integers");
  }
  get_real("aspect", c.aspect);
  get_count("trials_per_cell", c.trials_per_cell);
  if (j.contains("base_seed")) {
    if (j["base_seed"].is_number_unsigned()) c.base_seed = j["base_seed"].get<std::uint64_t>();
    else if (j["base_seed"].is_number_integer() && j["base_seed"].get<std::int64_t>() >= 0)
      c.base_seed = static_cast<std::uint64_t>(j["base_seed"].get<std::int64_t>());
    else problems.push_back("base_seed: expected an unsigned 64-bit integer");
  }
  get_count("k_vectors", c.k_vectors);
  get_reals("c_grid", c.c_grid);
  get_reals("epsilons", c.epsilons);
  if (j.contains("tau_params")) {
    const auto& t = j["tau_params"];
    if (!t.is_object()) {
      problems.push_back("tau_params: expected an object with b_frak and a_frak");
    } else {
      for (const auto& [key, _] : t.items())
        if (key != "b_frak" && key != "a_frak") problems.push_back("tau_params." + key + ": unknown key");
      if (t.contains("b_frak")) {
        if (t["b_frak"].is_number()) c.tau_params.b_frak = t["b_frak"].get<double>();
        else problems.push_back("tau_params.b_frak: expected a number");
      }
      if (t.contains("a_frak")) {
        if (t["a_frak"].is_number()) c.tau_params.a_frak = t["a_frak"].get<double>();
        else problems.push_back("tau_params.a_frak: expected a number");
      }
    }
  }
  if (j.contains("law_kind")) {
    if (!j["law_kind"].is_string()) {
      problems.push_back("law_kind: expected a string");
    } else {
      try {
        c.law_kind = parse_law_kind(j["law_kind"].get<std::string>());
      } catch (const std::invalid_argument& e) {
        problems.push_back(std::string("law_kind: ") + e.what());
      }
    }
  }
  if (j.contains("normalize_variance")) {
    const auto& v = j["normalize_variance"];
    if (v.is_boolean()) c.normalize = v.get<bool>() ? NormalizeMode::Always : NormalizeMode::Never;
    else if (v.is_string() && v.get<std::string>() == "auto") c.normalize = NormalizeMode::Auto;
    else problems.push_back("normalize_variance: expected true, false or \"auto\"");
  }
  get_real("delta", c.delta);
  get_real("census_c", c.census_c);
  get_real("kth_b_frak", c.kth_b_frak);
  if (j.contains("compute_vectors")) {
    if (j["compute_vectors"].is_boolean()) c.compute_vectors = j["compute_vectors"].get<bool>();
    else problems.push_back("compute_vectors: expected a boolean");
  }
  get_count("budget", c.budget);

  for (auto& p : c.problems()) problems.push_back(std::move(p));
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return c;
}

// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}

struct Cell {
  double alpha = 0.0;
  std::size_t n = 0;
  double aspect = 2.0;

  friend bool operator<(const Cell& a, const Cell& b) {
    return std::tie(a.alpha, a.n, a.aspect) < std::tie(b.alpha, b.n, b.aspect);
  }
  friend bool operator==(const Cell& a, const Cell& b) = default;
};

inline std::uint64_t cell_seed(std::uint64_t base_seed, const Cell& cell, LawKind law) {
  std::uint64_t h = mix64(base_seed);
  h = combine_keys(h, std::bit_cast<std::uint64_t>(cell.alpha));
  h = combine_keys(h, static_cast<std::uint64_t>(cell.n));
  h = combine_keys(h, std::bit_cast<std::uint64_t>(cell.aspect));
  h = combine_keys(h, static_cast<std::uint64_t>(law));
  return h;
}

// Canonical order: alpha, then n.
inline std::vector<Cell> sweep_cells(const SweepConfig& cfg) {
  std::vector<Cell> cells;
  for (double a : cfg.alphas)
    for (std::size_t n : cfg.ns) cells.push_back({a, n, cfg.aspect});
  std::sort(cells.begin(), cells.end());
  return cells;
}

struct VectorRecord {
  std::size_t k = 1;  // 1 = bottom vector
  double value = 0.0;
  double residual = 0.0;
  bool degenerate = false;
  std::vector<LocalizationReport> reports;  // one per c in the grid
};

struct TrialRecord {
  Cell cell;
  std::size_t big_n = 0;
  LawKind law = LawKind::SymmetricPareto;
  bool normalized = false;
  std::optional<TailConstants> tail_constants;
  std::size_t trial_index = 0;
  std::uint64_t seed = 0;  // cell seed; the matrix is sample_matrix(seed, trial_index)
  double s_min = 0.0;
  double s_max = 0.0;
  std::vector<double> s_bottom;  // s_bottom[k-1] is the k-th smallest singular value
  std::vector<VectorRecord> vectors;
  std::optional<CertificateReport> certificate;
  TauParams tau_params;
  std::string certificate_note;
  double census_c = 0.1;
  std::size_t heavy_census = 0;
  double wall_time = 0.0;  // seconds; kept out of records.jsonl

  const VectorRecord* vector(std::size_t k) const {
    for (const auto& v : vectors)
      if (v.k == k) return &v;
    return nullptr;
  }

  const LocalizationReport* report(std::size_t k, double c) const {
    const auto* v = vector(k);
    if (!v) return nullptr;
    for (const auto& r : v->reports)
      if (r.c_threshold == c) return &r;
    return nullptr;
  }
};

inline double min_mass_at(const LocalizationReport& r, double epsilon) {
  for (const auto& p : r.min_mass_profile)
    if (p.epsilon == epsilon) return p.value;
  throw std::invalid_argument("min_mass_at: epsilon " + format_double(epsilon) + " not in the profile");
}

inline void to_json(Json& j, const VectorRecord& v) {
  j = Json{{"k", v.k}, {"value", v.value}, {"residual", v.residual}, {"degenerate", v.degenerate}, {"reports", v.reports}};
}

inline void from_json(const Json& j, VectorRecord& v) {
  v.k = j.at("k").get<std::size_t>();
  v.value = j.at("value").get<double>();
  v.residual = j.at("residual").get<double>();
  v.degenerate = j.at("degenerate").get<bool>();
  v.reports = j.at("reports").get<std::vector<LocalizationReport>>();
}

inline void to_json(Json& j, const TrialRecord& r) {
  j = Json{{"alpha", r.cell.alpha},
           {"n", r.cell.n},
           {"aspect", r.cell.aspect},
           {"N", r.big_n},
           {"law", std::string(to_string(r.law))},
           {"normalize_variance", r.normalized},
           {"tail_constants", r.tail_constants ? Json(*r.tail_constants) : Json(nullptr)},
           {"trial_index", r.trial_index},
           {"seed", r.seed},
           {"s_min", r.s_min},
           {"s_max", r.s_max},
           {"s_bottom", r.s_bottom},
           {"vectors", r.vectors},
           {"certificate", r.certificate ? Json(*r.certificate) : Json(nullptr)},
           {"tau_params", {{"b_frak", r.tau_params.b_frak}, {"a_frak", r.tau_params.a_frak}}},
           {"certificate_note", r.certificate_note},
           {"census_c", r.census_c},
           {"heavy_census", r.heavy_census}};
}

inline void from_json(const Json& j, TrialRecord& r) {
  r.cell.alpha = j.at("alpha").get<double>();
  r.cell.n = j.at("n").get<std::size_t>();
  r.cell.aspect = j.at("aspect").get<double>();
  r.big_n = j.at("N").get<std::size_t>();
  r.law = parse_law_kind(j.at("law").get<std::string>());
  r.normalized = j.at("normalize_variance").get<bool>();
  if (!j.at("tail_constants").is_null()) r.tail_constants = j["tail_constants"].get<TailConstants>();
  r.trial_index = j.at("trial_index").get<std::size_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.s_min = j.at("s_min").get<double>();
  r.s_max = j.at("s_max").get<double>();
  r.s_bottom = j.at("s_bottom").get<std::vector<double>>();
  r.vectors = j.at("vectors").get<std::vector<VectorRecord>>();
  if (!j.at("certificate").is_null()) r.certificate = j["certificate"].get<CertificateReport>();
  r.tau_params.b_frak = j.at("tau_params").at("b_frak").get<double>();
  r.tau_params.a_frak = j.at("tau_params").at("a_frak").get<double>();
  r.certificate_note = j.at("certificate_note").get<std::string>();
  r.census_c = j.at("census_c").get<double>();
  r.heavy_census = j.at("heavy_census").get<std::size_t>();
}

// A failed trial, identified by its cell.
struct TrialError : std::runtime_error {
  TrialError(const std::string& what, Cell c, std::size_t trial, bool numerical_failure)
      : std::runtime_error(what), cell(c), trial_index(trial), numerical(numerical_failure) {}
  Cell cell;
  std::size_t trial_index;
  bool numerical;
};

inline std::string describe_cell(const Cell& c, std::size_t trial) {
  return "cell (alpha=" + format_double(c.alpha) + ", n=" + std::to_string(c.n) +
         ", aspect=" + format_double(c.aspect) + ") trial " + std::to_string(trial);
}

inline TrialRecord run_trial(const Cell& cell, std::size_t trial_index, const SweepConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  try {
    const TailLaw law = cfg.law_for(cell.alpha);
    const EnsembleConfig ens{cell.n, cell.aspect, law, cell_seed(cfg.base_seed, cell, cfg.law_kind)};
    const Matrix x = sample_matrix(ens, trial_index);

    TrialRecord r;
    r.cell = cell;
    r.big_n = x.rows();
    r.law = law.kind();
    r.normalized = law.normalize_variance();
    r.tail_constants = law.constants();
    r.trial_index = trial_index;
    r.seed = ens.seed;
    r.tau_params = cfg.tau_params;
    r.census_c = cfg.census_c;

    const std::size_t k_max = std::min(cfg.k_vectors, cell.n);
    if (cfg.compute_vectors) {
      const SpectralResult sr = full_svd(x, k_max);
      r.s_min = sr.s_min();
      r.s_max = sr.s_max();
      for (std::size_t k = 1; k <= k_max; ++k) {
        const auto& p = sr.bottom[k - 1];
        r.s_bottom.push_back(p.value);
        VectorRecord v{k, p.value, p.residual, p.degenerate, {}};
        for (double c : cfg.c_grid) v.reports.push_back(localize(p.vector, c, cfg.epsilons, p.degenerate));
        r.vectors.push_back(std::move(v));
      }
    } else {
      const auto sv = singular_values(x);
      r.s_min = sv.back();
      r.s_max = sv.front();
      for (std::size_t k = 1; k <= k_max; ++k) r.s_bottom.push_back(sv[cell.n - k]);
    }

    if (law.has_power_tail() && cell.alpha < 2.0) {
      try {
        const double tau = default_tau(r.big_n, cell.alpha, cfg.tau_params, law.constants()->c_upper);
        r.certificate = upper_certificate(x, tau, r.s_min, r.s_max);
      } catch (const std::invalid_argument& e) {
        r.certificate_note = e.what();
      }
    } else {
      r.certificate_note = "certificate computed only for alpha < 2";
    }
    r.heavy_census = heavy_census(x, cfg.census_c);
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  } catch (const SvdNonConvergence& e) {
    throw TrialError(describe_cell(cell, trial_index) + ": " + e.what(), cell, trial_index, true);
  } catch (const TrialError&) {
    throw;
  } catch (const std::exception& e) {
    throw TrialError(describe_cell(cell, trial_index) + ": " + e.what(), cell, trial_index, false);
  }
}

struct TrialFailure {
  Cell cell;
  std::size_t trial_index = 0;
  bool numerical = false;
  std::string message;
};

struct SweepResult {
  std::vector<TrialRecord> records;  // sorted by cell then trial
  std::vector<TrialFailure> failures;
};

// Runs every (cell, trial) on a work queue of `workers` threads. Slots are
// indexed canonically, so the output order never depends on scheduling.
inline SweepResult run_sweep(const SweepConfig& cfg, std::size_t workers = 1) {
  cfg.validate();
  const auto cells = sweep_cells(cfg);
  const std::size_t total = cells.size() * cfg.trials_per_cell;
  std::vector<std::variant<std::monostate, TrialRecord, TrialFailure>> slots(total);
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= total) return;
      const Cell& cell = cells[i / cfg.trials_per_cell];
      const std::size_t trial = i % cfg.trials_per_cell;
      try {
        slots[i] = run_trial(cell, trial, cfg);
      } catch (const TrialError& e) {
        slots[i] = TrialFailure{cell, trial, e.numerical, e.what()};
      } catch (const std::exception& e) {
        slots[i] = TrialFailure{cell, trial, false, e.what()};
      }
    }
  };

  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(total, 1));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  SweepResult out;
  for (auto& s : slots) {
    if (auto* r = std::get_if<TrialRecord>(&s)) out.records.push_back(std::move(*r));
    else if (auto* f = std::get_if<TrialFailure>(&s)) out.failures.push_back(std::move(*f));
  }
  return out;
}

// ---- aggregation ----

inline double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median: empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

inline std::map<Cell, std::vector<const TrialRecord*>> group_by_cell(std::span<const TrialRecord> records) {
  std::map<Cell, std::vector<const TrialRecord*>> groups;
  for (const auto& r : records) groups[r.cell].push_back(&r);
  return groups;
}

struct ScalingPoint {
  std::size_t n = 0;
  std::size_t count = 0;
  double median_s_min = 0.0;
};

struct ScalingFit {
  double alpha = 0.0;
  std::vector<ScalingPoint> cells;
  std::vector<std::pair<double, double>> points;  // (ln n, ln median s_min)
  double slope = 0.0;
  double intercept = 0.0;
  std::optional<double> slope_corrected;  // alpha < 2 only
  double residual_sse = 0.0;
};

namespace detail {
struct LineFit {
  double slope, intercept, sse;
};

inline LineFit ols(std::span<const std::pair<double, double>> pts) {
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_scaling: degenerate spread in n");
  LineFit f{sxy / sxx, 0.0, 0.0};
  f.intercept = my - f.slope * mx;
  for (const auto& [x, y] : pts) {
    const double e = y - (f.intercept + f.slope * x);
    f.sse += e * e;
  }
  return f;
}
}  // namespace detail

// (ln n)^{(alpha-2)/(2 alpha)}
inline double log_correction(double alpha, double n) { return std::pow(std::log(n), (alpha - 2.0) / (2.0 * alpha)); }

// OLS of ln(median s_min) on ln n; s_min samples grouped by n.
inline ScalingFit fit_scaling(double alpha, const std::map<std::size_t, std::vector<double>>& s_min_by_n,
                              std::size_t min_trials = 5) {
  if (s_min_by_n.size() < 3) throw std::invalid_argument("fit_scaling: needs at least 3 distinct n values");
  ScalingFit f;
  f.alpha = alpha;
  std::vector<std::pair<double, double>> corrected;
  for (const auto& [n, s] : s_min_by_n) {
    if (s.size() < min_trials)
      throw std::invalid_argument("fit_scaling: n = " + std::to_string(n) + " has fewer than " +
                                  std::to_string(min_trials) + " trials");
    const double med = median(s);
    if (!(med > 0.0)) throw std::invalid_argument("fit_scaling: nonpositive median s_min at n = " + std::to_string(n));
    const double nn = static_cast<double>(n);
    f.cells.push_back({n, s.size(), med});
    f.points.emplace_back(std::log(nn), std::log(med));
    corrected.emplace_back(std::log(nn), std::log(med) - std::log(log_correction(alpha, nn)));
  }
  const auto line = detail::ols(f.points);
  f.slope = line.slope;
  f.intercept = line.intercept;
  f.residual_sse = line.sse;
  if (alpha < 2.0) f.slope_corrected = detail::ols(corrected).slope;
  return f;
}

inline ScalingFit fit_scaling(double alpha, std::span<const TrialRecord> records, std::size_t min_trials = 5) {
  std::map<std::size_t, std::vector<double>> by_n;
  for (const auto& r : records)
    if (r.cell.alpha == alpha) by_n[r.cell.n].push_back(r.s_min);
  return fit_scaling(alpha, by_n, min_trials);
}

struct BracketReport {
  double alpha = 0.0;
  double floor = 0.3;       // required kappa_low
  double kappa_low = 0.0;   // min over cells of median / sqrt(n)
  double kappa_high = 0.0;  // max over cells of median / (n^{1/alpha} (ln n)^{(alpha-2)/(2 alpha)})
  double exponent = 0.0;
  double lower_exponent = 0.5;
  double upper_exponent = 0.0;  // 1/alpha
  double position = 0.0;        // (exponent - 1/2) / (1/alpha - 1/2)
  bool exponent_inside = false;
  std::vector<std::size_t> flagged_n;  // cells whose median falls below floor * sqrt(n)

  bool ok() const { return exponent_inside && flagged_n.empty(); }
};

inline BracketReport bracket_check(const ScalingFit& fit, double floor = 0.3) {
  const double alpha = fit.alpha;
  if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("bracket_check: requires 0 < alpha < 2");
  BracketReport b;
  b.alpha = alpha;
  b.floor = floor;
  b.kappa_low = std::numeric_limits<double>::infinity();
  for (const auto& c : fit.cells) {
    const double nn = static_cast<double>(c.n);
    const double low = c.median_s_min / std::sqrt(nn);
    const double high = c.median_s_min / (std::pow(nn, 1.0 / alpha) * log_correction(alpha, nn));
    b.kappa_low = std::min(b.kappa_low, low);
    b.kappa_high = std::max(b.kappa_high, high);
    if (low < floor) b.flagged_n.push_back(c.n);
  }
  b.exponent = fit.slope;
  b.upper_exponent = 1.0 / alpha;
  b.position = (fit.slope - 0.5) / (1.0 / alpha - 0.5);
  b.exponent_inside = fit.slope >= 0.5 && fit.slope <= 1.0 / alpha;
  return b;
}

struct TransitionRow {
  double alpha = 0.0;
  std::size_t count = 0;
  std::size_t degenerate_count = 0;
  double median_hat_I_mass = 0.0;
  double median_min_mass = 0.0;
  double median_top_mass = 0.0;
  double fraction_localized = 0.0;  // share with ||u_hatI||_2 >= sqrt(1 - delta)
};

struct TransitionScan {
  double c = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  double midpoint = 0.0;
  std::vector<TransitionRow> rows;  // ascending alpha
  bool monotone = false;            // median min-mass nondecreasing in alpha
  std::optional<double> crossing_alpha;
  bool separated = false;  // every trial on the correct side of the midpoint
};

// Bottom-vector statistics per alpha. The default midpoint is half the
// uniform-vector value sqrt(1 - epsilon).
inline TransitionScan transition_scan(std::span<const TrialRecord> records, double c, double epsilon, double delta,
                                      std::optional<double> midpoint = std::nullopt) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("transition_scan: delta must lie in (0,1)");
  TransitionScan t;
  t.c = c;
  t.epsilon = epsilon;
  t.delta = delta;
  t.midpoint = midpoint.value_or(0.5 * std::sqrt(1.0 - epsilon));

  std::map<double, std::vector<const LocalizationReport*>> by_alpha;
  std::map<double, std::size_t> degenerate;
  for (const auto& r : records) {
    const auto* rep = r.report(1, c);
    if (!rep) throw std::invalid_argument("transition_scan: record lacks a bottom-vector report at c = " + format_double(c));
    if (rep->degenerate_flag) {
      ++degenerate[r.cell.alpha];
      by_alpha[r.cell.alpha];
      continue;
    }
    by_alpha[r.cell.alpha].push_back(rep);
  }
  for (const auto& [alpha, reps] : by_alpha) {
    TransitionRow row;
    row.alpha = alpha;
    row.count = reps.size();
    row.degenerate_count = degenerate[alpha];
    if (!reps.empty()) {
      std::vector<double> hat, mm, top;
      std::size_t loc = 0;
      for (const auto* rep : reps) {
        hat.push_back(rep->hat_I_mass);
        mm.push_back(min_mass_at(*rep, epsilon));
        top.push_back(rep->top_mass_nlogn);
        if (rep->hat_I_mass >= 1.0 - delta) ++loc;
      }
      row.median_hat_I_mass = median(hat);
      row.median_min_mass = median(mm);
      row.median_top_mass = median(top);
      row.fraction_localized = static_cast<double>(loc) / static_cast<double>(reps.size());
    }
    t.rows.push_back(row);
  }

  t.monotone = true;
  for (std::size_t i = 1; i < t.rows.size(); ++i)
    if (t.rows[i].median_min_mass < t.rows[i - 1].median_min_mass) t.monotone = false;
  for (const auto& row : t.rows)
    if (row.count > 0 && row.median_min_mass >= t.midpoint) {
      t.crossing_alpha = row.alpha;
      break;
    }
  if (t.crossing_alpha) {
    t.separated = true;
    for (const auto& [alpha, reps] : by_alpha)
      for (const auto* rep : reps) {
        const bool above = min_mass_at(*rep, epsilon) >= t.midpoint;
        if (above != (alpha >= *t.crossing_alpha)) t.separated = false;
      }
  }
  return t;
}

struct BaiYinReport {
  double alpha = 0.0;
  std::size_t n = 0;
  double aspect = 0.0;
  std::size_t trials = 0;
  double mean_ratio = 0.0;  // mean of s_min / sqrt(N)
  double limit = 0.0;       // 1 - sqrt(1/aspect)
  double deviation = 0.0;   // mean_ratio - limit
};

inline double baiyin_limit(double aspect) { return 1.0 - std::sqrt(1.0 / aspect); }

// Requires a single cell with finite, unit variance: Gaussian, or alpha > 2 normalized.
inline BaiYinReport baiyin_check(std::span<const TrialRecord> records) {
  if (records.empty()) throw std::invalid_argument("baiyin_check: no records");
  const Cell cell = records.front().cell;
  for (const auto& r : records)
    if (!(r.cell == cell)) throw std::invalid_argument("baiyin_check: records span several cells");
  const auto& first = records.front();
  if (first.law != LawKind::Gaussian) {
    if (!(cell.alpha > 2.0)) throw std::invalid_argument("baiyin_check: requires alpha > 2");
    if (!first.normalized) throw std::invalid_argument("baiyin_check: requires a variance-normalized law");
  }
  BaiYinReport b;
  b.alpha = cell.alpha;
  b.n = cell.n;
  b.aspect = cell.aspect;
  b.trials = records.size();
  double acc = 0.0;
  for (const auto& r : records) acc += r.s_min / std::sqrt(static_cast<double>(r.big_n));
  b.mean_ratio = acc / static_cast<double>(records.size());
  b.limit = baiyin_limit(cell.aspect);
  b.deviation = b.mean_ratio - b.limit;
  return b;
}

struct KthSummary {
  std::size_t k = 0;
  std::size_t window = 0;  // floor(n^{1 - 2b})
  bool in_regime = true;
  std::string flag;
  std::size_t count = 0;  // non-degenerate vectors used in medians
  std::size_t degenerate_count = 0;
  double median_value = 0.0;
  double median_hat_I_mass = 0.0;
  double median_min_mass = 0.0;
  double median_ipr = 0.0;
  double median_top_mass = 0.0;
};

inline std::size_t kth_window(std::size_t n, double b_frak) {
  return static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), 1.0 - 2.0 * b_frak) + 1e-9));
}

// Same statistics as the bottom vector, per k, for records of a single n.
inline std::vector<KthSummary> kth_vector_scan(std::span<const TrialRecord> records, std::span<const std::size_t> k_list,
                                               double c, double epsilon, double b_frak = 0.2) {
  if (records.empty()) throw std::invalid_argument("kth_vector_scan: no records");
  if (!(b_frak > 0.0 && b_frak < 0.5)) throw std::invalid_argument("kth_vector_scan: b must lie in (0,1/2)");
  const std::size_t n = records.front().cell.n;
  for (const auto& r : records)
    if (r.cell.n != n) throw std::invalid_argument("kth_vector_scan: records span several n values");
  const std::size_t window = kth_window(n, b_frak);
  std::vector<KthSummary> out;
  for (std::size_t k : k_list) {
    KthSummary s;
    s.k = k;
    s.window = window;
    s.in_regime = k <= window;
    if (!s.in_regime) s.flag = "outside the k <= n^(1-2b) window";
    std::vector<double> val, hat, mm, ip, top;
    for (const auto& r : records) {
      const auto* v = r.vector(k);
      const auto* rep = r.report(k, c);
      if (!v || !rep) throw std::invalid_argument("kth_vector_scan: record lacks vector k = " + std::to_string(k));
      if (v->degenerate) {
        ++s.degenerate_count;
        continue;
      }
      val.push_back(v->value);
      hat.push_back(rep->hat_I_mass);
      mm.push_back(min_mass_at(*rep, epsilon));
      ip.push_back(rep->ipr);
      top.push_back(rep->top_mass_nlogn);
    }
    s.count = val.size();
    if (!val.empty()) {
      s.median_value = median(val);
      s.median_hat_I_mass = median(hat);
      s.median_min_mass = median(mm);
      s.median_ipr = median(ip);
      s.median_top_mass = median(top);
    }
    out.push_back(s);
  }
  return out;
}

// ---- output files ----

struct SummaryRow {
  Cell cell;
  std::string statistic;
  std::size_t count = 0;
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

inline std::vector<SummaryRow> summarize(std::span<const TrialRecord> records) {
  std::vector<SummaryRow> rows;
  for (const auto& [cell, recs] : group_by_cell(records)) {
    std::map<std::string, std::vector<double>> stats;
    std::vector<std::string> order;
    auto add = [&](const std::string& name, double v) {
      if (!stats.contains(name)) order.push_back(name);
      stats[name].push_back(v);
    };
    std::size_t degenerate = 0;
    for (const auto* r : recs) {
      add("s_min", r->s_min);
      add("s_min_over_sqrt_N", r->s_min / std::sqrt(static_cast<double>(r->big_n)));
      add("s_max", r->s_max);
      add("heavy_census", static_cast<double>(r->heavy_census));
      if (r->certificate) {
        add("certified_upper", r->certificate->certified_upper);
        add("J_size", static_cast<double>(r->certificate->J_size));
        add("certificate_valid", r->certificate->valid ? 1.0 : 0.0);
      }
      const auto* v = r->vector(1);
      if (!v || v->reports.empty()) continue;
      if (v->degenerate) {
        ++degenerate;
        continue;
      }
      for (const auto& rep : v->reports) {
        const std::string tag = "@c=" + format_double(rep.c_threshold);
        add("hat_I_mass" + tag, rep.hat_I_mass);
        add("hat_I_size" + tag, static_cast<double>(rep.hat_I.size()));
      }
      const auto& rep = v->reports.front();
      for (const auto& p : rep.min_mass_profile) add("min_mass@eps=" + format_double(p.epsilon), p.value);
      add("ipr", rep.ipr);
      add("top_mass_nlogn", rep.top_mass_nlogn);
    }
    for (const auto& name : order) {
      const auto& v = stats[name];
      SummaryRow row{cell, name, v.size(), median(v), *std::min_element(v.begin(), v.end()),
                     *std::max_element(v.begin(), v.end()), 0.0};
      double acc = 0.0;
      for (double x : v) acc += x;
      row.mean = acc / static_cast<double>(v.size());
      rows.push_back(row);
    }
    if (!recs.empty() && recs.front()->vector(1))
      rows.push_back({cell, "degenerate_count", degenerate, static_cast<double>(degenerate),
                      static_cast<double>(degenerate), static_cast<double>(degenerate),
                      static_cast<double>(degenerate)});
  }
  return rows;
}

inline std::string csv_real(double x) { return format_double(x); }

inline std::string records_jsonl(std::span<const TrialRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += Json(r).dump();
    out += '\n';
  }
  return out;
}

inline std::vector<TrialRecord> parse_records_jsonl(const std::string& text) {
  std::vector<TrialRecord> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(Json::parse(line).get<TrialRecord>());
    } catch (const std::exception& e) {
      throw IoError("records line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

inline std::string summary_csv(std::span<const SummaryRow> rows) {
  std::string out = "alpha,n,aspect,statistic,count,median,min,max,mean\n";
  for (const auto& r : rows) {
    out += csv_real(r.cell.alpha) + ',' + std::to_string(r.cell.n) + ',' + csv_real(r.cell.aspect) + ',' +
           r.statistic + ',' + std::to_string(r.count) + ',' + csv_real(r.median) + ',' + csv_real(r.min) + ',' +
           csv_real(r.max) + ',' + csv_real(r.mean) + '\n';
  }
  return out;
}

// Fits for every alpha with at least 3 n values and 5 trials per n.
inline std::vector<ScalingFit> fit_all(std::span<const TrialRecord> records) {
  std::map<double, std::map<std::size_t, std::vector<double>>> by_alpha;
  for (const auto& r : records) by_alpha[r.cell.alpha][r.cell.n].push_back(r.s_min);
  std::vector<ScalingFit> out;
  for (const auto& [alpha, by_n] : by_alpha) {
    if (by_n.size() < 3) continue;
    bool enough = true;
    for (const auto& [n, s] : by_n) enough = enough && s.size() >= 5;
    if (enough) out.push_back(fit_scaling(alpha, by_n));
  }
  return out;
}

inline std::string fits_csv(std::span<const ScalingFit> fits) {
  std::string out =
      "alpha,n_points,slope,intercept,slope_corrected,residual_sse,kappa_low,kappa_high,exponent_position,"
      "exponent_inside,flagged_n\n";
  for (const auto& f : fits) {
    out += csv_real(f.alpha) + ',' + std::to_string(f.points.size()) + ',' + csv_real(f.slope) + ',' +
           csv_real(f.intercept) + ',' + (f.slope_corrected ? csv_real(*f.slope_corrected) : "") + ',' +
           csv_real(f.residual_sse) + ',';
    if (f.alpha < 2.0) {
      const auto b = bracket_check(f);
      std::string flagged;
      for (std::size_t n : b.flagged_n) flagged += (flagged.empty() ? "" : " ") + std::to_string(n);
      out += csv_real(b.kappa_low) + ',' + csv_real(b.kappa_high) + ',' + csv_real(b.position) + ',' +
             (b.exponent_inside ? "true" : "false") + ',' + flagged;
    } else {
      out += ",,,,";
    }
    out += '\n';
  }
  return out;
}

inline std::string timings_csv(std::span<const TrialRecord> records) {
  std::string out = "alpha,n,aspect,trial_index,wall_time_s\n";
  for (const auto& r : records)
    out += csv_real(r.cell.alpha) + ',' + std::to_string(r.cell.n) + ',' + csv_real(r.cell.aspect) + ',' +
           std::to_string(r.trial_index) + ',' + csv_real(r.wall_time) + '\n';
  return out;
}

inline Json manifest_json(const SweepConfig& cfg, const SweepResult& result) {
  const Json config = config_to_json(cfg);
  Json laws = Json::array();
  for (double a : cfg.alphas) {
    Json l = law_json(cfg.law_for(a));
    l["cell_alpha"] = a;
    laws.push_back(l);
  }
  Json failures = Json::array();
  for (const auto& f : result.failures)
    failures.push_back({{"alpha", f.cell.alpha},
                        {"n", f.cell.n},
                        {"aspect", f.cell.aspect},
                        {"trial_index", f.trial_index},
                        {"numerical", f.numerical},
                        {"message", f.message}});
  return Json{{"config", config},
              {"config_hash", hex64(fnv1a(config.dump()))},
              {"code_version", kCodeVersion},
              {"laws", laws},
              {"log_base", "e"},
              {"residual_tolerance", kDefaultResidualTolerance},
              {"degenerate_gap_tolerance", kDegenerateGapTolerance},
              {"certificate_slack", kCertificateSlack},
              {"records", result.records.size()},
              {"failures", failures},
              {"files", {"records.jsonl", "summary.csv", "fits.csv", "timings.csv", "manifest.json"}}};
}

inline void write_sweep_outputs(const std::filesystem::path& dir, const SweepConfig& cfg, const SweepResult& result) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  write_file(dir / "records.jsonl", records_jsonl(result.records));
  const auto rows = summarize(result.records);
  write_file(dir / "summary.csv", summary_csv(rows));
  const auto fits = fit_all(result.records);
  write_file(dir / "fits.csv", fits_csv(fits));
  write_file(dir / "timings.csv", timings_csv(result.records));
  write_file(dir / "manifest.json", manifest_json(cfg, result).dump(2) + "\n");
}

}  // namespace svloc
