#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "circlab/combinatorics.hpp"
#include "circlab/error.hpp"
#include "circlab/joint.hpp"
#include "circlab/matrix_core.hpp"
#include "circlab/parallel.hpp"
#include "circlab/rng.hpp"
#include "circlab/spectra.hpp"
#include "circlab/trace_oracle.hpp"

#ifndef CIRCLAB_VERSION
#define CIRCLAB_VERSION "0.1.0"
#endif

namespace circlab {

inline constexpr const char* version = CIRCLAB_VERSION;

enum class output_format { csv, json };

// Empty lists mean "use the command's defaults".
struct ExperimentConfig {
  std::string command;
  std::vector<circulant_kind> kinds;
  std::vector<long> n;
  std::vector<int> h;
  std::vector<std::vector<int>> words;
  distribution_tag distribution = distribution_tag::standard_gaussian;
  std::size_t trials = 0;
  std::uint64_t seed = 20240601;
  std::string output_path;
  output_format format = output_format::csv;
  std::size_t bins = 80;
  std::optional<double> threshold;
};

// One flat output row. Missing numeric cells are empty in CSV and null in JSON.
struct Row {
  std::string command;
  std::string kind;
  long n = 0;
  std::string metric;
  std::string key;
  double estimate = 0;
  std::optional<double> target;
  std::optional<double> gap;
  std::optional<double> std_error;
  std::optional<double> threshold;
  std::optional<bool> pass;
};

struct RunRecord {
  ExperimentConfig config;
  std::vector<Row> rows;
  double wall_seconds = 0;
  std::string tool_version = version;

  bool all_passed() const {
    for (const auto& r : rows)
      if (r.pass && !*r.pass) return false;
    return true;
  }
};

namespace detail {

inline std::vector<circulant_kind> kinds_or_both(const ExperimentConfig& c) {
  return c.kinds.empty() ? std::vector{circulant_kind::reverse, circulant_kind::symmetric} : c.kinds;
}

template <class T>
std::vector<T> or_default(const std::vector<T>& v, std::vector<T> fallback) {
  return v.empty() ? fallback : v;
}

inline void validate(const ExperimentConfig& c) {
  for (long n : c.n)
    if (n < 1) throw invalid_input("n values must be positive");
  for (int h : c.h)
    if (h < 1) throw invalid_input("h values must be positive");
  if (c.bins < 1) throw invalid_input("bins must be positive");
}

inline EntryDistribution law_of(distribution_tag t) {
  switch (t) {
    case distribution_tag::standard_gaussian: return EntryDistribution::gaussian();
    case distribution_tag::rademacher: return EntryDistribution::rademacher();
    case distribution_tag::uniform_sqrt3: return EntryDistribution::uniform();
    case distribution_tag::integer_test: return trace_test_law();
  }
  return EntryDistribution::gaussian();
}

inline std::uint64_t kind_id(circulant_kind k) { return k == circulant_kind::reverse ? 1 : 2; }

inline std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Least-squares slope of log(y) against log(x); NaN when any y <= 0.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t m = x.size();
  if (m < 2) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (!(y[i] > 0)) return std::numeric_limits<double>::quiet_NaN();
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace detail

// Per trial sorted spectra for one (kind, n) cell.
inline std::vector<SpectralSample> simulate_spectra(circulant_kind kind, std::size_t n, std::size_t trials,
                                                    const EntryDistribution& law, std::uint64_t seed) {
  std::vector<SpectralSample> out(trials);
  parallel_for(trials, [&](std::size_t t) {
    out[t] = eigenvalues_fast(kind, sample_entries(law, n, derive_seed(seed, {detail::kind_id(kind), n, t})));
  });
  return out;
}

inline std::vector<double> esd_moment_series(const std::vector<SpectralSample>& spectra, int h) {
  std::vector<double> v;
  v.reserve(spectra.size());
  for (const auto& s : spectra) v.push_back(esd_moment(s, h));
  return v;
}

// (1/T) sum (x - mean)^4.
inline double fourth_central_moment(const std::vector<double>& x) {
  RunningStats st;
  for (double v : x) st.push(v);
  double acc = 0;
  for (double v : x) acc += std::pow(v - st.mean(), 4);
  return acc / static_cast<double>(x.size());
}

// Pooled ESD against the limit law: KS distance, moment estimates, histogram.
inline RunRecord cmd_lsd(const ExperimentConfig& cfg) {
  detail::validate(cfg);
  RunRecord rec{cfg, {}};
  const auto ns = detail::or_default(cfg.n, {500L});
  const auto hs = detail::or_default(cfg.h, {2, 3, 4, 6});
  const std::size_t trials = cfg.trials ? cfg.trials : 20;
  const double ks_threshold = cfg.threshold.value_or(0.03);
  const auto law = detail::law_of(cfg.distribution);
  for (auto kind : detail::kinds_or_both(cfg)) {
    const LimitLaw limit = law_for(kind);
    const std::string k(to_string(kind));
    for (long n : ns) {
      const auto spectra = simulate_spectra(kind, n, trials, law, cfg.seed);
      const auto pooled = pool(spectra);
      const double ks = ks_distance(pooled, limit);
      rec.rows.push_back({"lsd", k, n, "ks", std::string(to_string(limit.tag)), ks, 0.0, ks, std::nullopt,
                          ks_threshold, ks <= ks_threshold});
      for (int h : hs) {
        RunningStats st;
        for (const auto& s : spectra) st.push(esd_moment(s, h));
        const double target = limit_moment(limit, h);
        const double thr = h % 2 ? 0.05 : 0.1 * target;
        const double gap = st.mean() - target;
        rec.rows.push_back({"lsd", k, n, "moment", std::to_string(h), st.mean(), target, gap, st.std_error(), thr,
                            std::abs(gap) <= thr});
      }
      const double lo = pooled.eigenvalues.front() - 0.1, hi = pooled.eigenvalues.back() + 0.1;
      const double width = (hi - lo) / static_cast<double>(cfg.bins);
      std::vector<std::size_t> counts(cfg.bins, 0);
      for (double v : pooled.eigenvalues)
        counts[std::min(cfg.bins - 1, static_cast<std::size_t>((v - lo) / width))]++;
      const double total = static_cast<double>(pooled.n());
      for (std::size_t b = 0; b < cfg.bins; ++b) {
        const double center = lo + (b + 0.5) * width;
        const double expected = total * width * limit.pdf(center);
        rec.rows.push_back({"lsd", k, n, "hist", detail::format_number(center), static_cast<double>(counts[b]),
                            expected, counts[b] - expected, std::sqrt(static_cast<double>(counts[b])), std::nullopt,
                            std::nullopt});
      }
    }
  }
  return rec;
}

// Fourth central moment of the h-th ESD moment across trials, on a ladder of
// dimensions, with the fitted log-log slope.
inline RunRecord cmd_m3(const ExperimentConfig& cfg) {
  detail::validate(cfg);
  const std::size_t trials = cfg.trials ? cfg.trials : 500;
  if (trials < 200) throw invalid_input("m3 needs at least 200 trials");
  RunRecord rec{cfg, {}};
  const auto ns = detail::or_default(cfg.n, {64L, 128L, 256L, 512L});
  const auto hs = detail::or_default(cfg.h, {2});
  const double slope_threshold = cfg.threshold.value_or(-1.0);
  const auto law = detail::law_of(cfg.distribution);
  for (auto kind : detail::kinds_or_both(cfg)) {
    const std::string k(to_string(kind));
    std::vector<std::vector<double>> stats(hs.size());
    std::vector<double> xs;
    for (long n : ns) {
      const auto spectra = simulate_spectra(kind, n, trials, law, cfg.seed);
      xs.push_back(static_cast<double>(n));
      for (std::size_t i = 0; i < hs.size(); ++i) {
        const double m4 = fourth_central_moment(esd_moment_series(spectra, hs[i]));
        stats[i].push_back(m4);
        rec.rows.push_back({"m3", k, n, "fourth_central_moment", std::to_string(hs[i]), m4, std::nullopt,
                            std::nullopt, std::nullopt, std::nullopt, std::nullopt});
      }
    }
    for (std::size_t i = 0; i < hs.size(); ++i) {
      const double slope = detail::loglog_slope(xs, stats[i]);
      rec.rows.push_back({"m3", k, 0, "loglog_slope", std::to_string(hs[i]), slope, -2.0, slope + 2.0, std::nullopt,
                          slope_threshold, slope <= slope_threshold});
    }
  }
  return rec;
}

// Exact formula-vs-direct trace comparisons over an (n, h, seed) grid.
inline RunRecord cmd_trace_verify(const ExperimentConfig& cfg) {
  detail::validate(cfg);
  RunRecord rec{cfg, {}};
  const auto ns = detail::or_default(cfg.n, {2L, 3L, 4L, 5L, 6L, 7L, 8L});
  const auto hs = detail::or_default(cfg.h, {1, 2, 3, 4, 5});
  const std::size_t seeds = cfg.trials ? cfg.trials : 10;
  for (auto kind : detail::kinds_or_both(cfg)) {
    const std::string k(to_string(kind));
    for (long n : ns)
      for (int h : hs)
        for (std::size_t s = 0; s < seeds; ++s) {
          const auto c = verify_trace(kind, n, h, derive_seed(cfg.seed, {detail::kind_id(kind), std::uint64_t(n),
                                                                          std::uint64_t(h), s}));
          rec.rows.push_back({"trace-verify", k, n, "trace", std::to_string(h) + "#" + std::to_string(s),
                              c.formula_value, c.direct_value, c.abs_diff, std::nullopt, 0.0, c.exact_equal});
        }
  }
  return rec;
}

// Counting identities and exact finite-n expected moments.
inline RunRecord cmd_combinatorics(const ExperimentConfig& cfg) {
  detail::validate(cfg);
  RunRecord rec{cfg, {}};
  const auto ns = detail::or_default(cfg.n, {4L, 11L, 41L});
  const auto ps = detail::or_default(cfg.h, {1, 2});
  for (long n : ns)
    for (int p : ps) {
      const std::string key = std::to_string(p);
      double a2p = 0;
      for_each_A2p(n, p, [&](std::span<const long>) { a2p += 1; });
      const double a2p_target = std::pow(static_cast<double>(n), 2 * p - 1);
      rec.rows.push_back({"combinatorics", "", n, "A2p_size", key, a2p, a2p_target, a2p - a2p_target, std::nullopt,
                          0.0, a2p == a2p_target});
      const double oe = static_cast<double>(count_odd_even_matched(n, p));
      const double oe_target = static_cast<double>(factorial(p) * falling_factorial(n, p));
      rec.rows.push_back({"combinatorics", "", n, "odd_even_matched", key, oe, oe_target, oe - oe_target,
                          std::nullopt, 0.0, oe == oe_target});
      const double os = static_cast<double>(count_opposite_sign_matched(n, p));
      const double ratio = os / opposite_sign_asymptotic(n, p);
      std::optional<bool> pass;
      if (cfg.threshold) pass = ratio >= *cfg.threshold && ratio <= 1.0;
      rec.rows.push_back({"combinatorics", "", n, "opposite_sign_ratio", key, ratio, 1.0, ratio - 1.0, std::nullopt,
                          cfg.threshold, pass});
      for (auto kind : detail::kinds_or_both(cfg)) {
        const int h = 2 * p;
        const double exact =
            exact_expected_moment(kind, n, h, moments_of(detail::law_of(cfg.distribution))).to_double();
        const double target = limit_moment(law_for(kind), h);
        rec.rows.push_back({"combinatorics", std::string(to_string(kind)), n, "exact_expected_moment",
                            std::to_string(h), exact, target, exact - target, std::nullopt, std::nullopt,
                            std::nullopt});
      }
    }
  return rec;
}

// Mixed moments of independent families against the closed-form limits.
inline RunRecord cmd_joint(const ExperimentConfig& cfg) {
  detail::validate(cfg);
  RunRecord rec{cfg, {}};
  const auto ns = detail::or_default(cfg.n, {500L});
  const auto words = detail::or_default(cfg.words, {{1, 2, 2, 1}, {1, 2, 1, 2}, {1, 1, 1, 1}});
  const std::size_t trials = cfg.trials ? cfg.trials : 200;
  const double sigmas = cfg.threshold.value_or(3.0);
  const auto law = detail::law_of(cfg.distribution);
  for (auto kind : detail::kinds_or_both(cfg)) {
    const std::string k(to_string(kind));
    for (long n : ns)
      for (const auto& w : words) {
        const auto q = Monomial::of(w);
        const double target = kind == circulant_kind::reverse ? rc_limit_phi(q) : sc_limit_phi(q);
        const auto est = phi_n_estimate(kind, q, n, trials,
                                        derive_seed(cfg.seed, {detail::kind_id(kind), std::uint64_t(n)}), law);
        const double gap = est.estimate - target;
        rec.rows.push_back({"joint", k, n, "phi", to_string(q), est.estimate, target, gap, est.std_error,
                            sigmas * est.std_error, std::abs(gap) <= sigmas * est.std_error});
      }
  }
  for (const auto& w : words) {
    const auto q = Monomial::of(w);
    const double model = half_independent_model_phi(q), limit = rc_limit_phi(q);
    rec.rows.push_back({"joint", "reverse", 0, "model_phi", to_string(q), model, limit, model - limit, std::nullopt,
                        0.0, model == limit});
  }
  return rec;
}

inline RunRecord run(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  RunRecord rec;
  if (cfg.command == "lsd") rec = cmd_lsd(cfg);
  else if (cfg.command == "m3") rec = cmd_m3(cfg);
  else if (cfg.command == "trace-verify") rec = cmd_trace_verify(cfg);
  else if (cfg.command == "combinatorics") rec = cmd_combinatorics(cfg);
  else if (cfg.command == "joint") rec = cmd_joint(cfg);
  else throw invalid_input("unknown command '" + cfg.command + "'");
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

inline const std::vector<std::string>& column_names() {
  static const std::vector<std::string> cols{"command", "kind",      "n",         "metric",    "key", "estimate",
                                             "target",  "gap",       "std_error", "threshold", "pass"};
  return cols;
}

// RFC 4180: quote fields containing separators, quotes or line breaks.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline void write_csv(const RunRecord& rec, std::ostream& os) {
  auto opt = [](const std::optional<double>& v) { return v ? detail::format_number(*v) : std::string(); };
  for (std::size_t i = 0; i < column_names().size(); ++i) os << (i ? "," : "") << column_names()[i];
  os << "\r\n";
  for (const auto& r : rec.rows) {
    os << csv_field(r.command) << ',' << csv_field(r.kind) << ',' << r.n << ',' << csv_field(r.metric) << ','
       << csv_field(r.key) << ',' << detail::format_number(r.estimate) << ',' << opt(r.target) << ','
       << opt(r.gap) << ',' << opt(r.std_error) << ',' << opt(r.threshold) << ','
       << (r.pass ? (*r.pass ? "true" : "false") : "") << "\r\n";
  }
}

inline nlohmann::ordered_json config_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["command"] = c.command;
  std::vector<std::string> kinds;
  for (auto k : c.kinds) kinds.emplace_back(to_string(k));
  j["kind"] = kinds;
  j["n"] = c.n;
  j["h"] = c.h;
  j["word"] = c.words;
  j["dist"] = std::string(to_string(c.distribution));
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["format"] = c.format == output_format::csv ? "csv" : "json";
  j["bins"] = c.bins;
  j["threshold"] = c.threshold ? nlohmann::ordered_json(*c.threshold) : nlohmann::ordered_json(nullptr);
  return j;
}

// Wall time is deliberately left out so identical configs give identical bytes.
inline void write_json(const RunRecord& rec, std::ostream& os) {
  auto num = [](std::optional<double> v) {
    return v && std::isfinite(*v) ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  nlohmann::ordered_json doc;
  doc["version"] = rec.tool_version;
  doc["config"] = config_json(rec.config);
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rec.rows) {
    nlohmann::ordered_json row;
    row["command"] = r.command;
    row["kind"] = r.kind;
    row["n"] = r.n;
    row["metric"] = r.metric;
    row["key"] = r.key;
    row["estimate"] = num(r.estimate);
    row["target"] = num(r.target);
    row["gap"] = num(r.gap);
    row["std_error"] = num(r.std_error);
    row["threshold"] = num(r.threshold);
    row["pass"] = r.pass ? nlohmann::ordered_json(*r.pass) : nlohmann::ordered_json(nullptr);
    doc["rows"].push_back(std::move(row));
  }
  os << doc.dump(2) << '\n';
}

inline void write_record(const RunRecord& rec, std::ostream& os) {
  if (rec.config.format == output_format::json) write_json(rec, os);
  else write_csv(rec, os);
}

inline void write_record(const RunRecord& rec, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open output file '" + path + "'");
  write_record(rec, out);
  out.flush();
  if (!out) throw io_error("failed writing output file '" + path + "'");
}

}  // namespace circlab
