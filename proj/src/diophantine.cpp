#include "fractint/diophantine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "fractint/parallel.hpp"
#include "fractint/rng.hpp"

namespace fractint {

namespace {

constexpr double kBudget = 1e9;
constexpr std::uint64_t kPairStream = 0x70616972;

std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

Vec to_vec(const LatticePoint& p) { return Vec(p[0], p[1], p[2]); }

std::vector<Vec> box_points(int d, int q) {
  const std::int64_t n = ipow(q + 1, d);
  std::vector<Vec> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    Vec v = Vec::Zero();
    std::int64_t r = i;
    for (int a = d - 1; a >= 0; --a) {
      v[a] = static_cast<double>(r % (q + 1));
      r /= q + 1;
    }
    pts.push_back(v);
  }
  return pts;
}

LatticePoint point_at(std::int64_t i, int d, int q) {
  LatticePoint p{0, 0, 0};
  for (int a = d - 1; a >= 0; --a) {
    p[a] = static_cast<int>(i % (q + 1));
    i /= q + 1;
  }
  return p;
}

bool homogeneous(Family f) { return f == Family::euclidean_distance || f == Family::lm_norm; }

// The one predicate both counting paths evaluate.
struct Constraint {
  const DefiningFunction* phi;
  double lambda;
  double delta;
  bool admits(double value) const { return std::abs(value - lambda) <= delta; }
};

void check_config(const LatticeConfig& cfg) {
  if (cfg.d < 2 || cfg.d > 3) throw InvalidArgument(fmt::format("lattice dimension {} not in 2..3", cfg.d));
  if (cfg.q < 2) throw InvalidArgument(fmt::format("q = {} must be at least 2", cfg.q));
  if (!homogeneous(cfg.phi1.family) || (!cfg.single_equation && !homogeneous(cfg.phi2.family))) {
    throw InvalidArgument("lattice counts need the euclidean-distance or lm-norm family");
  }
}

CountTable make_table(const LatticeConfig& cfg, const PairSpec& spec, std::vector<LatticePair> pairs) {
  check_config(cfg);
  for (const LatticePair& pr : pairs) {
    for (const LatticePoint& p : pr) {
      for (int a = 0; a < 3; ++a) {
        if (p[a] < 0 || p[a] > (a < cfg.d ? cfg.q : 0)) throw InvalidArgument("pair point outside [0, q]^d");
      }
    }
  }
  CountTable t;
  t.d = cfg.d;
  t.q = cfg.q;
  t.spec = spec;
  t.pairs = std::move(pairs);
  t.nu.assign(t.pairs.size(), 0);
  return t;
}

PairSpec listed(std::size_t n) {
  PairSpec spec;
  spec.mode = PairMode::listed;
  spec.n_pairs = n;
  spec.seed = 0;
  return spec;
}

void summarize(CountTable& t) {
  const double n = static_cast<double>(t.nu.size());
  if (t.nu.empty()) return;
  long double sum = 0, sq = 0;
  for (std::int64_t v : t.nu) {
    sum += v;
    sq += static_cast<long double>(v) * v;
  }
  t.mean = static_cast<double>(sum / n);
  const double scale = std::pow((t.q + 1.0) / t.q, 2 * t.d);
  t.aggregate = t.mean * scale;
  if (t.spec.mode == PairMode::sampled && t.nu.size() > 1) {
    const double var = static_cast<double>((sq - sum * sum / n) / (n - 1));
    t.stderr_aggregate = std::sqrt(std::max(var, 0.0) / n) * scale;
  }
}

}  // namespace

double LatticeConfig::delta() const {
  if (delta_override) return *delta_override;
  return std::pow(static_cast<double>(q), 1.0 - d / s);
}

LatticeConfig make_lattice_config(int d, int q, double s, Family family, int m, std::optional<double> lambda) {
  LatticeConfig cfg;
  cfg.d = d;
  cfg.q = q;
  cfg.s = s;
  if (!(s > 0.0 && s <= d)) throw InvalidArgument(fmt::format("s = {} outside (0, {}]", s, d));
  cfg.phi1.family = family;
  cfg.phi1.dim = d;
  cfg.phi1.m = m;
  cfg.phi2 = cfg.phi1;
  const double l = lambda.value_or(0.75 * q * std::sqrt(static_cast<double>(d)));
  if (l < q / 2.0 || l > 2.0 * q) throw InvalidArgument(fmt::format("lambda = {} outside [q/2, 2q]", l));
  cfg.lambda1 = cfg.lambda2 = l;
  check_config(cfg);
  return cfg;
}

std::vector<LatticePair> make_pairs(int d, int q, const PairSpec& spec) {
  const std::int64_t points = ipow(q + 1, d);
  std::vector<LatticePair> pairs;
  if (spec.mode == PairMode::exhaustive) {
    pairs.reserve(static_cast<std::size_t>(points * points));
    for (std::int64_t i = 0; i < points; ++i) {
      for (std::int64_t j = 0; j < points; ++j) pairs.push_back({point_at(i, d, q), point_at(j, d, q)});
    }
    return pairs;
  }
  if (spec.mode == PairMode::listed) throw InvalidArgument("listed pairs are supplied by the caller");
  if (spec.n_pairs == 0) throw InvalidArgument("sampled mode needs at least one pair");
  Rng rng(spec.seed, kPairStream);
  pairs.reserve(spec.n_pairs);
  for (std::size_t i = 0; i < spec.n_pairs; ++i) {
    const auto a = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(points)));
    const auto b = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(points)));
    pairs.push_back({point_at(a, d, q), point_at(b, d, q)});
  }
  return pairs;
}

namespace {

void brute(const LatticeConfig& cfg, CountTable& t) {
  const std::vector<Vec> pts = box_points(cfg.d, cfg.q);
  const double delta = cfg.delta();
  const Constraint c1{&cfg.phi1, cfg.lambda1, delta};
  const Constraint c2{&cfg.phi2, cfg.lambda2, delta};
  parallel_for(t.pairs.size(), [&](std::size_t i) {
    const Vec n1 = to_vec(t.pairs[i][0]);
    const Vec n2 = to_vec(t.pairs[i][1]);
    std::int64_t count = 0;
    for (const Vec& n : pts) {
      if (!c1.admits(c1.phi->value(n1, n))) continue;
      if (cfg.single_equation || c2.admits(c2.phi->value(n2, n))) ++count;
    }
    t.nu[i] = count;
  });
  summarize(t);
}

void fast(const LatticeConfig& cfg, CountTable& t) {
  const std::vector<Vec> pts = box_points(cfg.d, cfg.q);
  const double delta = cfg.delta();
  const Constraint c1{&cfg.phi1, cfg.lambda1, delta};
  const Constraint c2{&cfg.phi2, cfg.lambda2, delta};

  // group pairs sharing n^1
  std::vector<std::size_t> order(t.pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return t.pairs[a][0] < t.pairs[b][0]; });
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i == 0 || t.pairs[order[i]][0] != t.pairs[order[i - 1]][0]) starts.push_back(i);
  }
  starts.push_back(order.size());

  const double slack = 1e-9 * (1.0 + std::abs(cfg.lambda1));
  parallel_for(starts.size() - 1, [&](std::size_t g) {
    const Vec n1 = to_vec(t.pairs[order[starts[g]]][0]);
    std::vector<std::pair<double, std::uint32_t>> shell(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) shell[i] = {c1.phi->value(n1, pts[i]), static_cast<std::uint32_t>(i)};
    std::sort(shell.begin(), shell.end());
    auto lo = std::lower_bound(shell.begin(), shell.end(), std::pair{cfg.lambda1 - delta - slack, std::uint32_t{0}});
    std::vector<std::uint32_t> candidates;
    for (auto it = lo; it != shell.end() && it->first <= cfg.lambda1 + delta + slack; ++it) {
      if (c1.admits(it->first)) candidates.push_back(it->second);
    }
    for (std::size_t r = starts[g]; r < starts[g + 1]; ++r) {
      const std::size_t i = order[r];
      if (cfg.single_equation) {
        t.nu[i] = static_cast<std::int64_t>(candidates.size());
        continue;
      }
      const Vec n2 = to_vec(t.pairs[i][1]);
      std::int64_t count = 0;
      for (std::uint32_t c : candidates) {
        if (c2.admits(c2.phi->value(n2, pts[c]))) ++count;
      }
      t.nu[i] = count;
    }
  });
  summarize(t);
}

}  // namespace

CountTable count_bruteforce(const LatticeConfig& cfg, const PairSpec& spec) {
  if (spec.mode == PairMode::exhaustive && std::pow(cfg.q + 1.0, 3 * cfg.d) > kBudget) {
    throw BudgetError(fmt::format("exhaustive count at d={} q={} exceeds 1e9 operations", cfg.d, cfg.q));
  }
  CountTable t = make_table(cfg, spec, make_pairs(cfg.d, cfg.q, spec));
  brute(cfg, t);
  return t;
}

CountTable count_fast(const LatticeConfig& cfg, const PairSpec& spec) {
  CountTable t = make_table(cfg, spec, make_pairs(cfg.d, cfg.q, spec));
  fast(cfg, t);
  return t;
}

CountTable count_bruteforce(const LatticeConfig& cfg, std::span<const LatticePair> pairs) {
  CountTable t = make_table(cfg, listed(pairs.size()), {pairs.begin(), pairs.end()});
  brute(cfg, t);
  return t;
}

CountTable count_fast(const LatticeConfig& cfg, std::span<const LatticePair> pairs) {
  CountTable t = make_table(cfg, listed(pairs.size()), {pairs.begin(), pairs.end()});
  fast(cfg, t);
  return t;
}

void write_csv(std::ostream& out, const CountTable& table) {
  for (int j = 1; j <= 2; ++j) {
    for (int a = 0; a < table.d; ++a) out << 'n' << j << '_' << a << ',';
  }
  out << "nu\n";
  for (std::size_t i = 0; i < table.pairs.size(); ++i) {
    for (const LatticePoint& p : table.pairs[i]) {
      for (int a = 0; a < table.d; ++a) out << p[a] << ',';
    }
    out << table.nu[i] << '\n';
  }
}

AverageSlope average_slope(int d, double s, std::span<const int> q_list, const PairSpec& spec, Family family, int m) {
  if (!(s > (d + 1) / 2.0)) throw InvalidArgument(fmt::format("s = {} must exceed (d+1)/2 = {}", s, (d + 1) / 2.0));
  if (q_list.size() < 4) throw InvalidArgument("q list needs at least 4 values");
  const auto [qmin, qmax] = std::minmax_element(q_list.begin(), q_list.end());
  if (*qmax < 8 * *qmin) throw InvalidArgument("q list must span at least 3 octaves");
  AverageSlope out;
  out.d = d;
  out.s = s;
  out.predicted = d - 2.0 * d / s;
  std::vector<double> x, y;
  for (int q : q_list) {
    const CountTable t = count_fast(make_lattice_config(d, q, s, family, m), spec);
    const double scale = std::pow((q + 1.0) / q, 2 * d);
    out.q.push_back(q);
    out.mean.push_back(t.mean);
    out.stderr_mean.push_back(t.stderr_aggregate / scale);
    if (t.mean <= 0.0) throw InvalidArgument(fmt::format("no solutions at q = {}; the fit is undefined", q));
    x.push_back(std::log2(static_cast<double>(q)));
    y.push_back(std::log2(t.mean));
  }
  out.fit = fit_line(x, y);
  out.respected = out.fit.slope <= out.predicted + out.tolerance;
  return out;
}

}  // namespace fractint
