// Copyright 2026 The bvspeed Authors
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


#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bvspeed/bv.hpp"
#include "bvspeed/circuit.hpp"
#include "bvspeed/errors.hpp"
#include "bvspeed/rng.hpp"

namespace bvspeed {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct AnalysisConfig {
  double p_d = 0.99;
  int bootstrap_B = 100;
  double tts_ci_sigma = 5.0;
  double lambda_ci_sigma = 2.0;
  int n_min = 3;          ///< smallest n allowed as a fit window start
  bool weighted = false;  ///< inverse-variance weights on log2 TTS

  void validate() const {
    if (!(p_d > 0 && p_d < 1)) throw ConfigError("analysis: p_d must be in (0,1)");
    if (bootstrap_B < 2) throw ConfigError("analysis: bootstrap_B must be at least 2");
    if (!(tts_ci_sigma > 0) || !(lambda_ci_sigma > 0)) throw ConfigError("analysis: CI widths must be positive");
    if (n_min < 1) throw ConfigError("analysis: n_min must be at least 1");
  }
};

struct SuccessEstimate {
  double p = 0.0;
  double sigma = 0.0;
  bool terminated() const { return p == 0.0; }
};

inline SuccessEstimate success_prob(const ShotTable& t) {
  if (t.total_shots == 0) throw ConfigError("success_prob: table for " + t.oracle.b.to_string() + " has no shots");
  const double n = static_cast<double>(t.total_shots);
  const double p = static_cast<double>(t.count(t.oracle.b)) / n;
  return {p, std::sqrt(p * (1 - p) / n)};
}

/// Real-valued repetitions to succeed at least once with probability p_d.
inline double repetitions(double p_s, double p_d) {
  if (!(p_s >= 0 && p_s <= 1)) throw ConfigError("repetitions: p_s must be in [0,1]");
  if (!(p_d > 0 && p_d < 1)) throw ConfigError("repetitions: p_d must be in (0,1)");
  if (p_s == 0) return kInf;
  if (p_s == 1) return 1.0;
  return std::log1p(-p_d) / std::log1p(-p_s);
}

inline double ceil_repetitions(double p_s, double p_d) {
  const double r = repetitions(p_s, p_d);
  return std::isinf(r) ? r : std::max(1.0, std::ceil(r));
}

inline double tts_quantum(int n, double p_s, const DurationModel& model, double p_d) {
  const double r = repetitions(p_s, p_d);
  return std::isinf(r) ? kInf : run_time(n, model) * r;
}

/// Classical TTS with t_r,C(n) = run_time(n, model), usually a*n.
inline double tts_classical(int n, const DurationModel& model, double p_d) {
  if (n < 1) throw ConfigError("tts_classical: n must be positive");
  const double t = run_time(n, model);
  if (n == 1) return t;
  return t * std::log1p(-p_d) / std::log1p(-std::ldexp(1.0, 1 - n));
}

/// t_r,C(n) = a*n.
inline DurationModel classical_model(double a_seconds) {
  DurationModel m;
  m.tau_2q = a_seconds;
  return m;
}

struct TTSPoint {
  int n = 0;
  double tts_mean = kInf;
  double ci_low = kInf;
  double ci_high = kInf;
  double sigma = 0.0;
  int num_oracles = 0;
  bool terminated = true;
};

/// Mean over oracles; any infinite entry terminates the point.
inline TTSPoint mean_tts(int n, const std::vector<double>& per_oracle) {
  if (per_oracle.empty()) throw ConfigError("mean_tts: no oracles at n=" + std::to_string(n));
  TTSPoint p;
  p.n = n;
  p.num_oracles = static_cast<int>(per_oracle.size());
  if (std::any_of(per_oracle.begin(), per_oracle.end(), [](double x) { return !std::isfinite(x); })) return p;
  double s = 0;
  for (double x : per_oracle) s += x;
  p.tts_mean = p.ci_low = p.ci_high = s / static_cast<double>(per_oracle.size());
  p.terminated = false;
  return p;
}

/// Success counts of one oracle run; all the bootstrap needs.
struct SuccessCount {
  std::uint64_t successes = 0;
  std::uint64_t shots = 0;

  static SuccessCount of(const ShotTable& t) { return {t.count(t.oracle.b), t.total_shots}; }
  double p() const { return shots ? static_cast<double>(successes) / static_cast<double>(shots) : 0.0; }
};

/// All oracle runs at one problem size.
struct SizeCounts {
  int n = 0;
  std::vector<SuccessCount> oracles;
};

inline SizeCounts size_counts(int n, const std::vector<ShotTable>& tables) {
  SizeCounts s{n, {}};
  for (const auto& t : tables) {
    if (t.oracle.n() != n) throw ConfigError("size_counts: table for " + t.oracle.b.to_string() + " is not BV-" + std::to_string(n));
    if (t.total_shots == 0) throw ConfigError("size_counts: table for " + t.oracle.b.to_string() + " has no shots");
    s.oracles.push_back(SuccessCount::of(t));
  }
  return s;
}

inline TTSPoint point_tts(const SizeCounts& s, const DurationModel& model, double p_d) {
  std::vector<double> tts;
  for (const auto& o : s.oracles) tts.push_back(tts_quantum(s.n, o.p(), model, p_d));
  return mean_tts(s.n, tts);
}

/**
 * Bootstrap over the observed counts. Each resample redraws every oracle's
 * success count binomially at its shot count; a resample in which an oracle
 * with nonzero observed p_s draws no success is discarded.
 */
struct SizeBootstrap {
  TTSPoint point;               ///< expected value and +-k sigma of the retained resamples
  std::vector<double> samples;  ///< TTS_avg per resample, NaN when discarded
  int discarded = 0;
};

inline SizeBootstrap bootstrap_tts(const SizeCounts& s, const DurationModel& model, const AnalysisConfig& cfg,
                                   std::uint64_t seed) {
  cfg.validate();
  SizeBootstrap out;
  const TTSPoint observed = point_tts(s, model, cfg.p_d);
  out.point = observed;
  out.samples.assign(static_cast<std::size_t>(cfg.bootstrap_B), std::numeric_limits<double>::quiet_NaN());
  if (observed.terminated) {
    out.discarded = cfg.bootstrap_B;
    return out;
  }
  const double t_r = run_time(s.n, model);
  std::vector<double> kept;
  for (int j = 0; j < cfg.bootstrap_B; ++j) {
    auto rng = make_stream(seed, StreamPurpose::Bootstrap, static_cast<std::uint64_t>(s.n), static_cast<std::uint64_t>(j));
    double sum = 0;
    bool keep = true;
    for (const auto& o : s.oracles) {
      const std::uint64_t k = binomial(rng, o.shots, o.p());
      if (k == 0) {
        keep = false;
        continue;  // keep drawing so later oracles see the same stream either way
      }
      sum += t_r * repetitions(static_cast<double>(k) / static_cast<double>(o.shots), cfg.p_d);
    }
    if (!keep) {
      ++out.discarded;
      continue;
    }
    const double avg = sum / static_cast<double>(s.oracles.size());
    out.samples[static_cast<std::size_t>(j)] = avg;
    kept.push_back(avg);
  }
  if (kept.empty()) {
    out.point = TTSPoint{};
    out.point.n = s.n;
    out.point.num_oracles = observed.num_oracles;
    return out;
  }
  double mean = 0;
  for (double x : kept) mean += x;
  mean /= static_cast<double>(kept.size());
  double var = 0;
  for (double x : kept) var += (x - mean) * (x - mean);
  const auto [lo, hi] = std::minmax_element(kept.begin(), kept.end());
  if (*lo == *hi) mean = *lo, var = 0;  // no rounding residue on constant samples
  const double sd = kept.size() > 1 ? std::sqrt(var / static_cast<double>(kept.size() - 1)) : 0.0;
  out.point.tts_mean = mean;
  out.point.sigma = sd;
  out.point.ci_low = mean - cfg.tts_ci_sigma * sd;
  out.point.ci_high = mean + cfg.tts_ci_sigma * sd;
  return out;
}

/// Bootstrap replicates of p_s for a single oracle.
inline std::vector<double> bootstrap_success(const SuccessCount& c, int B, std::uint64_t seed, std::uint64_t id = 0) {
  std::vector<double> out;
  for (int j = 0; j < B; ++j) {
    auto rng = make_stream(seed, StreamPurpose::Bootstrap, id, static_cast<std::uint64_t>(j));
    out.push_back(static_cast<double>(binomial(rng, c.shots, c.p())) / static_cast<double>(c.shots));
  }
  return out;
}

struct WindowFit {
  int l = 0;
  int u = 0;
  double slope = 0.0;
  double intercept = 0.0;
};

struct FitResult {
  double lambda = 0.0;  ///< max over l of lambda_{l,u} on the reported curve
  double ci_low = 0.0;
  double ci_high = 0.0;
  double sigma = 0.0;
  double bootstrap_mean = 0.0;
  int bootstrap_samples = 0;
  int l_max = 0;  ///< window start attaining the max
  int u = 0;
  std::vector<WindowFit> windows;
};

namespace detail {

/// (Weighted) least squares of y on x.
inline std::pair<double, double> ols(const std::vector<double>& x, const std::vector<double>& y,
                                     const std::vector<double>& w) {
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

inline std::vector<WindowFit> window_fits(const std::vector<int>& n, const std::vector<double>& tts,
                                          const std::vector<double>& sigma, int u, const AnalysisConfig& cfg) {
  std::vector<WindowFit> out;
  for (int l = std::max(1, cfg.n_min); l <= u - 2; ++l) {
    std::vector<double> x, y, w;
    for (std::size_t i = 0; i < n.size(); ++i) {
      if (n[i] < l || n[i] > u) continue;
      x.push_back(n[i]);
      y.push_back(std::log2(tts[i]));
      double wi = 1.0;
      if (cfg.weighted && sigma[i] > 0) {
        const double s_log = sigma[i] / (tts[i] * std::log(2.0));
        wi = 1.0 / (s_log * s_log);
      }
      w.push_back(wi);
    }
    if (x.size() < 3) continue;
    auto [slope, icpt] = ols(x, y, w);
    out.push_back({l, u, slope, icpt});
  }
  return out;
}

}  // namespace detail

/// Largest n before the curve first terminates.
inline int last_finite_n(const std::vector<TTSPoint>& points) {
  int u = -1;
  std::vector<TTSPoint> sorted = points;
  std::sort(sorted.begin(), sorted.end(), [](const TTSPoint& a, const TTSPoint& b) { return a.n < b.n; });
  for (const auto& p : sorted) {
    if (p.terminated) break;
    u = p.n;
  }
  return u;
}

/// Worst-case exponent: max over window starts l of the slope of log2 TTS on [l, u].
inline FitResult worst_case_lambda(const std::vector<TTSPoint>& points, int u, const AnalysisConfig& cfg = {}) {
  std::vector<int> n;
  std::vector<double> tts, sigma;
  for (const auto& p : points) {
    if (p.n > u) continue;
    if (p.terminated || !(p.tts_mean > 0)) {
      throw InfeasibleError("worst_case_lambda: point n=" + std::to_string(p.n) + " is not finite below u=" + std::to_string(u));
    }
    n.push_back(p.n);
    tts.push_back(p.tts_mean);
    sigma.push_back(p.sigma);
  }
  FitResult r;
  r.u = u;
  r.windows = detail::window_fits(n, tts, sigma, u, cfg);
  if (r.windows.empty()) throw InfeasibleError("worst_case_lambda: fewer than 3 points in every window ending at " + std::to_string(u));
  auto best = std::max_element(r.windows.begin(), r.windows.end(),
                               [](const WindowFit& a, const WindowFit& b) { return a.slope < b.slope; });
  r.lambda = r.ci_low = r.ci_high = r.bootstrap_mean = best->slope;
  r.l_max = best->l;
  return r;
}

inline double local_lambda(const std::vector<TTSPoint>& points, int h_max, const AnalysisConfig& cfg = {}) {
  return worst_case_lambda(points, h_max, cfg).lambda;
}

/// A bootstrapped TTS curve: reported points plus aligned resample curves.
struct CurveBootstrap {
  std::vector<TTSPoint> points;
  std::vector<std::vector<double>> samples;  ///< [resample][point], NaN when discarded
};

inline CurveBootstrap bootstrap_curve(const std::vector<SizeCounts>& sizes, const DurationModel& model,
                                      const AnalysisConfig& cfg, std::uint64_t seed) {
  CurveBootstrap c;
  c.samples.assign(static_cast<std::size_t>(cfg.bootstrap_B), std::vector<double>(sizes.size()));
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    auto b = bootstrap_tts(sizes[i], model, cfg, seed);
    c.points.push_back(b.point);
    for (std::size_t j = 0; j < b.samples.size(); ++j) c.samples[j][i] = b.samples[j];
  }
  return c;
}

/**
 * Worst-case fit of the reported curve, with the CI taken from worst-case fits
 * of each resample curve: mean +- lambda_ci_sigma standard deviations. A
 * resample discarded at any n up to u does not contribute.
 */
inline FitResult fit_with_bootstrap(const CurveBootstrap& c, int u, const AnalysisConfig& cfg = {}) {
  FitResult r = worst_case_lambda(c.points, u, cfg);
  std::vector<double> lambdas;
  for (const auto& s : c.samples) {
    std::vector<TTSPoint> pts;
    bool ok = true;
    for (std::size_t i = 0; i < c.points.size() && ok; ++i) {
      if (c.points[i].n > u) continue;
      if (!std::isfinite(s[i])) {
        ok = false;
        break;
      }
      TTSPoint p = c.points[i];
      p.tts_mean = s[i];
      pts.push_back(p);
    }
    if (ok) lambdas.push_back(worst_case_lambda(pts, u, cfg).lambda);
  }
  r.bootstrap_samples = static_cast<int>(lambdas.size());
  if (lambdas.size() < 2) return r;
  double mean = 0;
  for (double x : lambdas) mean += x;
  mean /= static_cast<double>(lambdas.size());
  double var = 0;
  for (double x : lambdas) var += (x - mean) * (x - mean);
  r.sigma = std::sqrt(var / static_cast<double>(lambdas.size() - 1));
  r.bootstrap_mean = mean;
  r.ci_low = mean - cfg.lambda_ci_sigma * r.sigma;
  r.ci_high = mean + cfg.lambda_ci_sigma * r.sigma;
  return r;
}

inline std::vector<TTSPoint> classical_points(int n_lo, int n_hi, const DurationModel& model, double p_d) {
  std::vector<TTSPoint> out;
  for (int n = n_lo; n <= n_hi; ++n) out.push_back(mean_tts(n, {tts_classical(n, model, p_d)}));
  return out;
}

struct SpeedupCurve {
  std::vector<int> n;
  std::vector<double> ratio;
  double exponent = 0.0;  ///< fitted slope of log2 S(n); 1 - lambda for a classical baseline of slope 1
};

inline SpeedupCurve speedup_ratio(const std::vector<TTSPoint>& quantum, const std::vector<TTSPoint>& classical) {
  std::map<int, double> c;
  for (const auto& p : classical) {
    if (!p.terminated) c[p.n] = p.tts_mean;
  }
  SpeedupCurve s;
  for (const auto& p : quantum) {
    auto it = c.find(p.n);
    if (p.terminated || it == c.end()) continue;
    s.n.push_back(p.n);
    s.ratio.push_back(it->second / p.tts_mean);
  }
  if (s.n.size() >= 2) {
    std::vector<double> x(s.n.begin(), s.n.end()), y, w(s.n.size(), 1.0);
    for (double r : s.ratio) y.push_back(std::log2(r));
    s.exponent = detail::ols(x, y, w).first;
  }
  return s;
}

struct SuccessMatrix {
  int n = 0;
  std::vector<Bitstring> oracles;
  std::vector<std::map<Bitstring, double>> rows;  ///< normalized output frequencies
  std::vector<double> p_s;                        ///< diagonal
  bool bqp = false;                               ///< every p_s > 1/2
};

inline SuccessMatrix success_matrix(const std::vector<ShotTable>& tables) {
  if (tables.empty()) throw ConfigError("success_matrix: no tables");
  SuccessMatrix m;
  m.n = tables.front().oracle.n();
  m.bqp = true;
  for (const auto& t : tables) {
    if (t.oracle.n() != m.n) throw ConfigError("success_matrix: mixed problem sizes");
    check_shot_table(t);
    if (t.total_shots == 0) throw ConfigError("success_matrix: empty table");
    std::map<Bitstring, double> row;
    for (const auto& [x, c] : t.counts) row[x] = static_cast<double>(c) / static_cast<double>(t.total_shots);
    m.oracles.push_back(t.oracle.b);
    m.rows.push_back(std::move(row));
    m.p_s.push_back(success_prob(t).p);
    if (!(m.p_s.back() > 0.5)) m.bqp = false;
  }
  return m;
}

}  // namespace bvspeed
