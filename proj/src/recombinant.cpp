#include "emt/recombinant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

#include "emt/errors.hpp"

namespace emt::recombinant {

std::string_view family_name(Family f) noexcept {
  switch (f) {
    case Family::exponential: return "exponential";
    case Family::uniform: return "uniform";
    case Family::pareto: return "pareto";
    case Family::lognormal: return "lognormal";
    case Family::weibull: return "weibull";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  for (Family f : {Family::exponential, Family::uniform, Family::pareto, Family::lognormal, Family::weibull}) {
    if (family_name(f) == name) return f;
  }
  throw ConfigError("unsupported tail family '" + std::string(name) + "'");
}

void TailDistribution::validate() const {
  switch (family) {
    case Family::exponential:
    case Family::uniform:
      if (!(p1 > 0.0)) throw DomainError(std::string(family_name(family)) + " parameter must be > 0");
      break;
    case Family::pareto:
    case Family::weibull:
      if (!(p1 > 0.0) || !(p2 > 0.0)) {
        throw DomainError(std::string(family_name(family)) + " scale and shape must be > 0");
      }
      break;
    case Family::lognormal:
      if (!std::isfinite(p1) || !(p2 > 0.0)) throw DomainError("lognormal needs finite mu and sigma > 0");
      break;
  }
}

double TailDistribution::survival(double x) const {
  switch (family) {
    case Family::exponential:
      return x <= 0.0 ? 1.0 : std::exp(-p1 * x);
    case Family::uniform:
      if (x <= 0.0) return 1.0;
      return x >= p1 ? 0.0 : 1.0 - x / p1;
    case Family::pareto:
      return x <= p1 ? 1.0 : std::pow(p1 / x, p2);
    case Family::lognormal:
      if (x <= 0.0) return 1.0;
      return 0.5 * std::erfc((std::log(x) - p1) / (p2 * std::numbers::sqrt2));
    case Family::weibull:
      return x <= 0.0 ? 1.0 : std::exp(-std::pow(x / p1, p2));
  }
  return 0.0;
}

double TailDistribution::log_survival(double x) const {
  switch (family) {
    case Family::exponential:
      return x <= 0.0 ? 0.0 : -p1 * x;
    case Family::pareto:
      return x <= p1 ? 0.0 : p2 * std::log(p1 / x);
    case Family::weibull:
      return x <= 0.0 ? 0.0 : -std::pow(x / p1, p2);
    default:
      return std::log(survival(x));
  }
}

double TailDistribution::inverse_survival(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("inverse_survival needs u in (0, 1)");
  switch (family) {
    case Family::exponential:
      return -std::log(u) / p1;
    case Family::uniform:
      return p1 * (1.0 - u);
    case Family::pareto:
      return p1 * std::pow(u, -1.0 / p2);
    case Family::lognormal:
      return std::exp(p1 + p2 * std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u));
    case Family::weibull:
      return p1 * std::pow(-std::log(u), 1.0 / p2);
  }
  return 0.0;
}

double TailDistribution::sample(Rng& rng) const {
  if (family == Family::lognormal) return std::exp(p1 + p2 * rng.normal());
  return inverse_survival(rng.uniform());
}

double log2_combinations(double a_stock, double phi_access) {
  if (a_stock < 0.0) throw DomainError("knowledge stock must be >= 0");
  if (!(phi_access > 0.0 && phi_access <= 1.0)) throw DomainError("phi_access must lie in (0, 1]");
  return std::pow(a_stock, phi_access);
}

namespace {

void check_run(const TailDistribution& dist, const EvtRunConfig& cfg) {
  dist.validate();
  if (cfg.k_draws < 1) throw DomainError("k_draws must be >= 1");
  if (cfg.replicates < 1) throw DomainError("replicates must be >= 1");
}

double one_replicate(const TailDistribution& dist, std::uint64_t k_draws, std::uint64_t stream) {
  Rng rng(stream);
  double z_max = -std::numeric_limits<double>::infinity();
  for (std::uint64_t j = 0; j < k_draws; ++j) z_max = std::max(z_max, dist.sample(rng));
  return static_cast<double>(k_draws) * dist.survival(z_max);
}

}  // namespace

std::vector<double> draw_max_statistic(const TailDistribution& dist, const EvtRunConfig& cfg) {
  check_run(dist, cfg);
  std::vector<double> m(cfg.replicates);
  const auto n = static_cast<std::int64_t>(cfg.replicates);

#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < n; ++r) {
    m[static_cast<std::size_t>(r)] =
        one_replicate(dist, cfg.k_draws, derive_stream(cfg.seed, static_cast<std::uint64_t>(r)));
  }
  return m;
}

std::vector<double> draw_max_statistic_serial(const TailDistribution& dist, const EvtRunConfig& cfg) {
  check_run(dist, cfg);
  std::vector<double> m;
  m.reserve(cfg.replicates);
  for (std::uint64_t r = 0; r < cfg.replicates; ++r) {
    m.push_back(one_replicate(dist, cfg.k_draws, derive_stream(cfg.seed, r)));
  }
  return m;
}

double quantile_frontier(const TailDistribution& dist, double k_draws, double eps_exp) {
  dist.validate();
  if (!(eps_exp > 0.0)) throw DomainError("eps_exp must be > 0");
  if (!(k_draws > 0.0)) throw DomainError("k_draws must be > 0");
  const double ratio = eps_exp / k_draws;
  if (!(ratio > 0.0 && ratio < 1.0)) throw DomainError("eps_exp / k_draws must lie in (0, 1)");
  return dist.inverse_survival(ratio);
}

EvtDiagnostics evt_diagnostics(std::span<const double> m_values, double ks_threshold) {
  if (m_values.empty()) throw DomainError("no m-values to diagnose");
  std::vector<double> sorted(m_values.begin(), m_values.end());
  std::sort(sorted.begin(), sorted.end());

  const double n = static_cast<double>(sorted.size());
  double sum = 0.0;
  double ks = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    sum += sorted[i];
    const double cdf = sorted[i] <= 0.0 ? 0.0 : -std::expm1(-sorted[i]);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    ks = std::max({ks, cdf - lo, hi - cdf});
  }
  EvtDiagnostics d;
  d.mean = sum / n;
  d.ks_distance = ks;
  d.pass = ks < ks_threshold;
  return d;
}

double finite_k_mean(double k_draws) { return k_draws / (k_draws + 1.0); }

double finite_k_stddev(double k_draws) {
  // Var(min of K uniforms) = K / ((K+1)^2 (K+2)).
  return k_draws * std::sqrt(k_draws / ((k_draws + 1.0) * (k_draws + 1.0) * (k_draws + 2.0)));
}

}  // namespace emt::recombinant
