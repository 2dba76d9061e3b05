#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bustt/errors.hpp"
#include "bustt/ingest/series.hpp"
#include "bustt/sar.hpp"

namespace bustt::eval {

enum class SynthKind { SarMultiplicative, SarAdditive, Nsar, LognormalIid, RandomWalk };

inline SynthKind synth_kind_from_string(const std::string& s) {
  if (s == "sar_multiplicative") return SynthKind::SarMultiplicative;
  if (s == "sar_additive") return SynthKind::SarAdditive;
  if (s == "nsar") return SynthKind::Nsar;
  if (s == "lognormal_iid") return SynthKind::LognormalIid;
  if (s == "random_walk") return SynthKind::RandomWalk;
  throw std::invalid_argument("unknown synth kind: " + s);
}

/// Synthetic process description. All kinds run in the log domain and
/// exponentiate, so the emitted series are lognormal by construction.
struct SynthSpec {
  SynthKind kind = SynthKind::LognormalIid;
  int sections = 1;
  int days = 34;
  int bins = 19;
  std::uint64_t seed = 7;

  std::vector<double> phi = {0.5, 0.2};  // non-seasonal lags (sar kinds)
  double seasonal_phi = 0.3;             // Phi at lag s (sar kinds)
  std::vector<double> nsar_weights = {0.5};  // within-day lag weights (nsar kind)
  double sigma = 0.3;                    // innovation stddev, log domain
  double mu = 4.0943445622221004;        // ln(60): ~60 s sections
  std::vector<double> bin_profile;       // optional per-bin mean offsets, log domain
};

namespace detail {

inline std::mt19937_64 engine_for(const SynthSpec& spec, int section) {
  const std::uint64_t mix =
      spec.seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(section + 1) * 0xbf58476d1ce4e5b9ULL;
  return std::mt19937_64(mix);
}

inline double profile_at(const SynthSpec& spec, int bin /*1-based*/) {
  if (spec.bin_profile.empty()) return 0.0;
  return spec.bin_profile[static_cast<std::size_t>((bin - 1) % static_cast<int>(spec.bin_profile.size()))];
}

}  // namespace detail

/// Concatenated log-domain series (days * bins values) for one section
/// of the spec'd process. Deterministic given (seed, section).
inline std::vector<double> synth_log_series(const SynthSpec& spec, int section = 0) {
  if (spec.days < 1 || spec.bins < 2 || spec.sections < 1)
    throw std::invalid_argument("synth: bad dimensions");
  const int total = spec.days * spec.bins;
  auto rng = detail::engine_for(spec, section);
  std::normal_distribution<double> noise(0.0, spec.sigma);
  auto draw = [&]() { return spec.sigma > 0.0 ? noise(rng) : 0.0; };

  std::vector<double> x(static_cast<std::size_t>(total));

  switch (spec.kind) {
    case SynthKind::SarMultiplicative:
    case SynthKind::SarAdditive: {
      const int p = static_cast<int>(spec.phi.size());
      const int s = spec.bins;
      bool stationary;
      if (spec.kind == SynthKind::SarMultiplicative) {
        // factored polynomial: each factor checked on its own
        stationary = sar::ar_stationary(spec.phi) && std::fabs(spec.seasonal_phi) < 1.0;
      } else {
        std::vector<double> full(static_cast<std::size_t>(s), 0.0);
        for (int i = 0; i < p && i < s; ++i) full[static_cast<std::size_t>(i)] = spec.phi[static_cast<std::size_t>(i)];
        full[static_cast<std::size_t>(s - 1)] += spec.seasonal_phi;
        stationary = sar::ar_stationary(full);
      }
      if (!stationary) throw DataError("synth: non-stationary sar coefficient set");
      const int max_lag = s + p;
      const int burn = 10 * s + max_lag;  // ten seasons discarded past the zero start
      std::vector<double> z(static_cast<std::size_t>(burn + total), 0.0);
      for (int t = max_lag; t < burn + total; ++t) {
        double v = draw();
        if (spec.kind == SynthKind::SarMultiplicative) {
          v += spec.seasonal_phi * z[static_cast<std::size_t>(t - s)];
          for (int i = 1; i <= p; ++i) {
            v += spec.phi[static_cast<std::size_t>(i - 1)] *
                 (z[static_cast<std::size_t>(t - i)] -
                  spec.seasonal_phi * z[static_cast<std::size_t>(t - s - i)]);
          }
        } else {
          v += spec.seasonal_phi * z[static_cast<std::size_t>(t - s)];
          for (int i = 1; i <= p; ++i)
            v += spec.phi[static_cast<std::size_t>(i - 1)] * z[static_cast<std::size_t>(t - i)];
        }
        z[static_cast<std::size_t>(t)] = v;
      }
      for (int i = 0; i < total; ++i) {
        x[static_cast<std::size_t>(i)] = spec.mu + detail::profile_at(spec, i % spec.bins + 1) +
                                         z[static_cast<std::size_t>(burn + i)];
      }
      break;
    }
    case SynthKind::Nsar: {
      // per-day realizations; intercepts chosen so the implied bin mean
      // follows mu + profile
      const int k = static_cast<int>(spec.nsar_weights.size());
      std::vector<double> mean(static_cast<std::size_t>(spec.bins));
      for (int b = 1; b <= spec.bins; ++b)
        mean[static_cast<std::size_t>(b - 1)] = spec.mu + detail::profile_at(spec, b);
      for (int day = 0; day < spec.days; ++day) {
        for (int b = 1; b <= spec.bins; ++b) {
          const int kk = std::min(k, b - 1);
          double v = mean[static_cast<std::size_t>(b - 1)];
          for (int i = 1; i <= kk; ++i) {
            const double w = spec.nsar_weights[static_cast<std::size_t>(i - 1)];
            v += w * (x[static_cast<std::size_t>(day * spec.bins + b - i - 1)] -
                      mean[static_cast<std::size_t>(b - i - 1)]);
          }
          x[static_cast<std::size_t>(day * spec.bins + b - 1)] = v + draw();
        }
      }
      break;
    }
    case SynthKind::LognormalIid: {
      for (int i = 0; i < total; ++i)
        x[static_cast<std::size_t>(i)] =
            spec.mu + detail::profile_at(spec, i % spec.bins + 1) + draw();
      break;
    }
    case SynthKind::RandomWalk: {
      double level = spec.mu;
      for (int i = 0; i < total; ++i) {
        level += draw();
        x[static_cast<std::size_t>(i)] = level;
      }
      break;
    }
  }
  return x;
}

/// Per-section series in seconds (exp of the log process).
inline std::vector<ingest::SectionSeries> synth_generate(const SynthSpec& spec) {
  std::vector<ingest::SectionSeries> out;
  out.reserve(static_cast<std::size_t>(spec.sections));
  for (int s = 0; s < spec.sections; ++s) {
    const auto logs = synth_log_series(spec, s);
    ingest::SectionSeries ss;
    ss.section = s;
    ss.days = spec.days;
    ss.bins = spec.bins;
    ss.values.resize(logs.size());
    ss.imputed.assign(logs.size(), 0);
    for (std::size_t i = 0; i < logs.size(); ++i) ss.values[i] = std::exp(logs[i]);
    out.push_back(std::move(ss));
  }
  return out;
}

}  // namespace bustt::eval
