#include "fractint/harness/runner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "fractint/constructions.hpp"
#include "fractint/diophantine.hpp"
#include "fractint/estimators.hpp"
#include "fractint/intersection.hpp"
#include "fractint/rng.hpp"
#include "fractint/transform.hpp"

namespace fractint {

namespace fs = std::filesystem;

namespace {

struct Artifacts {
  std::string records;
  std::vector<SummaryRow> summary;
  std::string plot;
  std::string verdict = "informational";
  std::vector<std::string> notes;
  int exit_code = 0;
};

using Job = std::function<Artifacts()>;

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x < 0 ? "-inf" : "inf";
  return fmt::format("{:.10g}", x);
}

std::string opt_num(const std::optional<double>& x) { return x ? num(*x) : std::string{}; }

// ---- config readers ----

Kind read_kind(const Config& c, const std::string& sec, const std::string& key, const std::string& name) {
  try {
    return kind_from_string(name);
  } catch (const InvalidArgument& e) {
    c.fail(sec, key, e.what());
  }
}

Descriptor read_descriptor(const Config& c, const std::string& sec, const Descriptor* like = nullptr) {
  if (!c.has_section(sec)) throw ConfigError(fmt::format("missing section [{}]", sec));
  Descriptor d;
  d.kind = read_kind(c, sec, "kind", c.text(sec, "kind"));
  d.d = static_cast<int>(c.integer_or(sec, "d", like ? like->d : 1));
  d.k = static_cast<int>(c.integer_or(sec, "k", like ? like->k : 8));
  d.box_side = c.integer_or(sec, "L", like ? like->box_side : 1);
  d.p = static_cast<int>(c.integer_or(sec, "p", 2));
  d.n = static_cast<int>(c.integer_or(sec, "n", d.k / std::max(d.p, 1)));
  d.q = static_cast<int>(c.integer_or(sec, "q", 8));
  d.s = c.number_or(sec, "s", 1.0);
  d.m = static_cast<int>(c.integer_or(sec, "m", 2));
  d.radius = c.number_or(sec, "radius", 0.0);
  d.extent = c.number_or(sec, "extent", 0.0);
  if (c.has(sec, "normal")) {
    const auto v = c.numbers(sec, "normal");
    if (v.size() > 3) c.fail(sec, "normal", "at most 3 components");
    d.normal = Vec::Zero();
    for (std::size_t i = 0; i < v.size(); ++i) d.normal[static_cast<int>(i)] = v[i];
  }
  if (d.kind == Kind::product) {
    for (const std::string& w : c.words(sec, "factors")) {
      Descriptor f;
      f.kind = read_kind(c, sec, "factors", w);
      f.d = 1;
      f.k = d.k;
      f.box_side = d.box_side;
      f.p = d.p;
      f.n = d.n;
      d.factors.push_back(f);
    }
    if (!c.has(sec, "d")) d.d = static_cast<int>(d.factors.size());
  }
  return d;
}

Vec read_vec(const Config& c, const std::string& sec, const std::string& key, int dim) {
  const auto v = c.numbers(sec, key);
  if (static_cast<int>(v.size()) != dim) c.fail(sec, key, fmt::format("expected {} components", dim));
  Vec out = Vec::Zero();
  for (int i = 0; i < dim; ++i) out[i] = v[static_cast<std::size_t>(i)];
  return out;
}

std::vector<int> read_ladder(const Config& c, int lo, int hi) {
  if (!c.has("run", "ladder")) {
    std::vector<int> out(static_cast<std::size_t>(std::max(hi - lo + 1, 0)));
    std::iota(out.begin(), out.end(), lo);
    return out;
  }
  const auto v = c.numbers("run", "ladder");
  std::vector<int> out;
  if (v.size() == 2) {
    for (int j = static_cast<int>(v[0]); j <= static_cast<int>(v[1]); ++j) out.push_back(j);
  } else {
    for (double x : v) out.push_back(static_cast<int>(x));
  }
  return out;
}

std::vector<int> intersection_ladder(const Config& c, int k) { return read_ladder(c, std::max(2, k - 8), k - 2); }

struct Sampling {
  std::vector<WeightedPoint> xs;
  double alpha = 0.0;
  std::optional<PsiGrid> grid;
};

Sampling read_sampling(const Config& c, const std::string& sec, int dim, PsiGrid fallback, std::uint64_t seed) {
  Sampling out;
  const std::string mode = c.text_or(sec, "mode", "grid");
  if (mode == "grid") {
    PsiGrid g = fallback;
    g.dim = dim;
    g.per_axis = static_cast<int>(c.integer_or(sec, "per_axis", g.per_axis));
    if (c.has(sec, "lo")) g.lo = read_vec(c, sec, "lo", dim);
    if (c.has(sec, "hi")) g.hi = read_vec(c, sec, "hi", dim);
    out.xs = psi_samples(g);
    out.alpha = dim;
    out.grid = g;
  } else if (mode == "measure") {
    const std::string source = c.text(sec, "source");
    const Construction mu = build(read_descriptor(c, source));
    const int n = static_cast<int>(c.integer_or(sec, "count", 64));
    out.xs = measure_samples(mu, n, seed);
    out.alpha = mu.design_dimension;
  } else {
    c.fail(sec, "mode", fmt::format("unknown sampling mode '{}' (grid, measure)", mode));
  }
  out.alpha = c.number_or(sec, "alpha", out.alpha);
  return out;
}

DefiningFunction read_phi(const Config& c, const std::string& sec, int dim, const std::string& suffix) {
  DefiningFunction phi;
  phi.dim = dim;
  const std::string fkey = "family" + suffix;
  try {
    phi.family = family_from_string(c.text_or(sec, fkey, "euclidean-distance"));
  } catch (const InvalidArgument& e) {
    c.fail(sec, fkey, e.what());
  }
  phi.m = static_cast<int>(c.integer_or(sec, "m" + suffix, 4));
  if (phi.family == Family::custom_polynomial) {
    const auto q = c.numbers(sec, "q" + suffix);
    if (static_cast<int>(q.size()) != dim * dim) c.fail(sec, "q" + suffix, fmt::format("expected {} entries", dim * dim));
    phi.q = Mat::Identity();
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) phi.q(i, j) = q[static_cast<std::size_t>(i * dim + j)];
    }
    if (c.has(sec, "a" + suffix)) phi.a = read_vec(c, sec, "a" + suffix, dim);
    if (c.has(sec, "b" + suffix)) phi.b = read_vec(c, sec, "b" + suffix, dim);
  }
  return phi;
}

Transform read_diffeo(const Config& c, int dim, double box_side) {
  if (!c.has_section("diffeo")) return Transform::identity(dim);
  const std::string kind = c.text_or("diffeo", "kind", "identity");
  if (kind == "identity") return Transform::identity(dim);
  if (kind == "polynomial") {
    std::vector<std::vector<double>> coeffs;
    for (int a = 0; a < dim; ++a) coeffs.push_back(c.numbers("diffeo", fmt::format("axis{}", a)));
    try {
      return Transform::polynomial(dim, coeffs, box_side);
    } catch (const InvalidArgument& e) {
      c.fail("diffeo", "kind", e.what());
    }
  }
  c.fail("diffeo", "kind", fmt::format("unknown diffeomorphism '{}' (identity, polynomial)", kind));
}

ExperimentOptions read_options(const Config& c, std::vector<int> ladder, double alpha) {
  ExperimentOptions opt;
  opt.ladder = std::move(ladder);
  opt.alpha = alpha;
  opt.tolerance = c.number_or("run", "tolerance", opt.tolerance);
  opt.margin = c.number_or("run", "margin", opt.margin);
  if (c.has("run", "beta")) opt.beta = c.number("run", "beta");
  return opt;
}

// ---- intersection artifacts ----

struct Columns {
  int dim = 2;
  bool g = false;
  bool t = false;
  bool x2 = false;
};

std::string records_csv(const ExperimentResult& r, const Columns& col) {
  std::string out = "index,weight";
  for (int a = 0; a < col.dim; ++a) out += fmt::format(",x_{}", a);
  if (col.x2) {
    for (int a = 0; a < col.dim; ++a) out += fmt::format(",x2_{}", a);
  }
  if (col.t) out += ",t";
  if (col.g) {
    for (int i = 0; i < col.dim; ++i) {
      for (int j = 0; j < col.dim; ++j) out += fmt::format(",g_{}{}", i, j);
    }
  }
  for (int j : r.ladder) out += fmt::format(",N_{}", j);
  out += ",gamma\n";
  for (const CoveringRecord& rec : r.records) {
    out += fmt::format("{},{}", rec.index, num(rec.weight));
    for (int a = 0; a < col.dim; ++a) out += "," + num(rec.x[a]);
    if (col.x2) {
      for (int a = 0; a < col.dim; ++a) out += "," + num(rec.x2[a]);
    }
    if (col.t) out += "," + num(rec.t);
    if (col.g) {
      for (int i = 0; i < col.dim; ++i) {
        for (int j = 0; j < col.dim; ++j) out += "," + num(rec.g(i, j));
      }
    }
    for (std::int64_t n : rec.counts) out += fmt::format(",{}", n);
    out += "," + num(rec.gamma) + "\n";
  }
  return out;
}

std::string ladder_plot(std::span<const int> ladder, std::span<const double> values) {
  std::string out = "# log2(1/eps) log2(N)\n";
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    out += fmt::format("{} {}\n", ladder[i], values[i] > 0 ? num(std::log2(values[i])) : "-inf");
  }
  return out;
}

Artifacts intersection_artifacts(const std::string& experiment, const ExperimentResult& r, const Columns& col,
                                 const std::string& construction, const std::optional<ExceptionalReport>& exc) {
  Artifacts art;
  art.records = records_csv(r, col);
  SummaryRow row;
  row.experiment = experiment;
  row.theorem = to_string(r.threshold.theorem);
  row.construction = construction;
  row.predicted = num(r.threshold.intersection);
  row.fitted_slope = num(r.fit.slope);
  row.residual = num(r.fit.residual);
  row.verdict = to_string(r.verdict);
  row.statistic = "samples";
  row.value = std::to_string(r.records.size());
  row.exceptional_fraction = num(r.exceptional_fraction);
  if (exc) row.exceptional_dim = exc->empty ? "empty" : num(exc->fit.slope);
  row.predicted_exceptional_dim = opt_num(r.threshold.exceptional);
  art.summary.push_back(row);
  art.plot = ladder_plot(r.ladder, r.averaged_counts);
  art.verdict = to_string(r.verdict);
  art.notes.push_back(fmt::format("predicted exponent {} (tolerance {})", num(r.threshold.intersection), num(r.tolerance)));
  art.notes.push_back(fmt::format("fitted slope {} residual {}", num(r.fit.slope), num(r.fit.residual)));
  art.notes.push_back(r.threshold.hypotheses_hold ? "hypotheses hold" : "hypotheses fail");
  for (const std::string& v : r.threshold.violations) art.notes.push_back("failed hypothesis: " + v);
  if (exc) {
    art.notes.push_back(exc->empty ? "exceptional set empty"
                                   : fmt::format("exceptional set dimension {} ({} grid cells)", num(exc->fit.slope),
                                                 exc->cells.size()));
  }
  art.exit_code = claims_violation(r) ? 2 : 0;
  return art;
}

// ---- experiments ----

Job prepare_construct(const Config& c) {
  const Descriptor a = read_descriptor(c, "A");
  const std::vector<int> ladder = read_ladder(c, std::max(0, a.k - 10), a.k);
  return [a, ladder] {
    const Construction ca = build(a);
    Artifacts art;
    art.records = "j,box_count\n";
    std::vector<double> counts;
    for (int j = 0; j <= a.k; ++j) art.records += fmt::format("{},{}\n", j, box_count(ca.cells(), j));
    for (int j : ladder) counts.push_back(static_cast<double>(box_count(ca.cells(), j)));
    const DecayFit fit = minkowski_dim(ca.cells(), ladder.front(), ladder.back());
    art.summary.push_back({"construct", "construction", describe(a), num(ca.design_dimension), num(fit.slope),
                           num(fit.residual), "informational", "cells", std::to_string(ca.cells().size()), "", "", ""});
    art.plot = ladder_plot(ladder, counts);
    art.notes.push_back(fmt::format("{} cells at k={}", ca.cells().size(), a.k));
    return art;
  };
}

Job prepare_dims(const Config& c) {
  const Descriptor a = read_descriptor(c, "A");
  const std::vector<int> ladder = read_ladder(c, std::max(0, a.k - 10), a.k);
  return [a, ladder] {
    const Construction ca = build(a);
    const DecayFit fit = minkowski_dim(ca.cells(), ladder.front(), ladder.back());
    Artifacts art;
    art.records = "j,box_count\n";
    std::vector<double> counts;
    for (int j = ladder.front(); j <= ladder.back(); ++j) {
      const auto n = box_count(ca.cells(), j);
      art.records += fmt::format("{},{}\n", j, n);
      counts.push_back(static_cast<double>(n));
    }
    std::vector<int> levels(counts.size());
    std::iota(levels.begin(), levels.end(), ladder.front());
    art.summary.push_back({"dims", "dimension", describe(a), num(ca.design_dimension), num(fit.slope),
                           num(fit.residual), "informational", "", "", "", "", ""});
    art.plot = ladder_plot(levels, counts);
    art.notes.push_back(fmt::format("minkowski dimension {} over levels {}..{}", num(fit.slope), ladder.front(),
                                    ladder.back()));
    return art;
  };
}

Job prepare_energy(const Config& c) {
  const Descriptor a = read_descriptor(c, "A");
  const std::vector<double> ss = c.numbers("run", "s");
  const double xi_max = c.number_or("run", "xi_max", std::ldexp(1.0, a.k - 1));
  return [a, ss, xi_max] {
    const Construction ca = build(a);
    Artifacts art;
    art.records = "s,spatial,fourier,ratio\n";
    for (double s : ss) {
      const double sp = energy_spatial(ca.measure, s).value;
      const double fo = energy_fourier(ca.measure, s, xi_max).value;
      art.records += fmt::format("{},{},{},{}\n", num(s), num(sp), num(fo), num(fo / sp));
      art.summary.push_back({"energy", "energy", describe(a), "", "", "", "informational",
                             fmt::format("fourier/spatial at s={}", num(s)), num(fo / sp), "", "", ""});
    }
    return art;
  };
}

Job prepare_fourier(const Config& c) {
  const Descriptor a = read_descriptor(c, "A");
  DecayOptions opt;
  opt.xi_lo = c.number_or("run", "xi_lo", opt.xi_lo);
  opt.xi_hi = c.number_or("run", "xi_hi", opt.xi_hi);
  opt.directions = static_cast<int>(c.integer_or("run", "directions", opt.directions));
  opt.radii_per_shell = static_cast<int>(c.integer_or("run", "radii", opt.radii_per_shell));
  opt.seed = static_cast<std::uint64_t>(c.integer_or("run", "seed", 1));
  const std::optional<double> expected =
      c.has("run", "expected_beta") ? std::optional(c.number("run", "expected_beta")) : std::nullopt;
  return [a, opt, expected] {
    const Construction ca = build(a);
    const DecayReport r = fourier_decay(ca.measure, opt);
    Artifacts art;
    art.records = "shell_start,shell_sup\n";
    std::string plot = "# log2(|xi|) log2(sup |mu-hat|)\n";
    for (std::size_t i = 0; i < r.shell_start.size(); ++i) {
      art.records += fmt::format("{},{}\n", num(r.shell_start[i]), num(r.shell_sup[i]));
      plot += fmt::format("{} {}\n", num(std::log2(r.shell_start[i])), num(std::log2(r.shell_sup[i])));
    }
    art.plot = plot;
    art.summary.push_back({"fourier", "fourier-decay", describe(a), opt_num(expected), num(r.fit.slope),
                           num(r.fit.residual), "informational", "beta", num(r.beta), "", "", ""});
    art.notes.push_back(fmt::format("beta {}", num(r.beta)));
    return art;
  };
}

Job prepare_hyperplane(const Config& c) {
  const Descriptor a = read_descriptor(c, "A");
  std::vector<double> deltas;
  if (c.has("run", "deltas")) {
    deltas = c.numbers("run", "deltas");
  } else {
    for (int j = 2; j <= a.k - 2; ++j) deltas.push_back(std::ldexp(1.0, -j));
  }
  const int directions = static_cast<int>(c.integer_or("run", "directions", 64));
  const auto seed = static_cast<std::uint64_t>(c.integer_or("run", "seed", 1));
  return [a, deltas, directions, seed] {
    const Construction ca = build(a);
    const SlabReport r = hyperplane_exponent(ca.measure, ca.origin, directions, deltas, seed);
    Artifacts art;
    art.records = "delta,sup_mass\n";
    art.plot = "# log2(delta) log2(sup mass)\n";
    for (std::size_t i = 0; i < r.deltas.size(); ++i) {
      art.records += fmt::format("{},{}\n", num(r.deltas[i]), num(r.sup_mass[i]));
      art.plot += fmt::format("{} {}\n", num(std::log2(r.deltas[i])), num(std::log2(r.sup_mass[i])));
    }
    art.summary.push_back({"hyperplane", "hyperplane", describe(a), "", num(r.fit.slope), num(r.fit.residual),
                           "informational", "", "", "", "", ""});
    return art;
  };
}

std::uint64_t run_seed(const Config& c) { return static_cast<std::uint64_t>(c.integer_or("run", "seed", 1)); }

Job prepare_translate(const Config& c) {
  const Descriptor da = read_descriptor(c, "A");
  const Descriptor db = read_descriptor(c, "B", &da);
  const std::uint64_t seed = run_seed(c);
  const int per_axis = static_cast<int>(c.integer_or("sampling", "per_axis", 8));
  // the overlap region needs the built sets, so the sampler is read lazily
  const Construction a = build(da);
  const Construction b = build(db);
  const Sampling s = read_sampling(c, "sampling", da.d, overlap_region(a, b, per_axis), seed);
  const Transform diffeo = read_diffeo(c, da.d, static_cast<double>(da.box_side));
  const ExperimentOptions opt = read_options(c, intersection_ladder(c, da.k), s.alpha);
  const bool exceptional = c.flag_or("run", "exceptional", false);
  if (exceptional && !s.grid) c.fail("run", "exceptional", "needs grid sampling");
  const std::string label = describe(da) + " vs " + describe(db);
  return [a, b, s, diffeo, opt, exceptional, label] {
    const ExperimentResult r = translation_experiment(a, b, diffeo, s.xs, opt);
    std::optional<ExceptionalReport> exc;
    if (exceptional) exc = exceptional_set_dim(r.records, *s.grid, r.threshold.intersection + r.margin, r.threshold.exceptional);
    return intersection_artifacts("intersect-translate", r, Columns{a.grid().dim()}, label, exc);
  };
}

Job prepare_rotate(const Config& c) {
  const Descriptor da = read_descriptor(c, "A");
  const Descriptor db = read_descriptor(c, "B", &da);
  const std::uint64_t seed = run_seed(c);
  const int per_axis = static_cast<int>(c.integer_or("sampling", "per_axis", 8));
  const Construction a = build(da);
  const Construction b = build(db);
  const Sampling s = read_sampling(c, "sampling", da.d, overlap_region(a, b, per_axis), seed);
  const int n_rot = static_cast<int>(c.integer_or("run", "rotations", 16));
  const ExperimentOptions opt = read_options(c, intersection_ladder(c, da.k), s.alpha);
  const std::string label = describe(da) + " vs " + describe(db);
  return [a, b, s, n_rot, seed, opt, label] {
    const std::vector<Mat> gs = haar_sample(a.grid().dim(), n_rot, seed);
    const ExperimentResult r = rotation_experiment(a, b, gs, s.xs, opt);
    return intersection_artifacts("intersect-rotate", r, Columns{a.grid().dim(), true}, label, std::nullopt);
  };
}

Job prepare_dilate(const Config& c) {
  const Descriptor da = read_descriptor(c, "A");
  const Descriptor db = read_descriptor(c, "B", &da);
  const std::uint64_t seed = run_seed(c);
  const int per_axis = static_cast<int>(c.integer_or("sampling", "per_axis", 8));
  const Construction a = build(da);
  const Construction b = build(db);
  const Sampling s = read_sampling(c, "sampling", da.d, overlap_region(a, b, per_axis), seed);
  const std::vector<double> ts =
      c.has("run", "t") ? c.numbers("run", "t") : std::vector<double>{1.0, 1.25, 1.5, 1.75, 2.0};
  const double h = c.number_or("run", "h", 0.0);
  const ExperimentOptions opt = read_options(c, intersection_ladder(c, da.k), s.alpha);
  const std::string label = describe(da) + " vs " + describe(db);
  return [a, b, s, ts, h, opt, label] {
    const ExperimentResult r = dilation_experiment(a, b, ts, h, s.xs, opt);
    return intersection_artifacts("intersect-dilate", r, Columns{a.grid().dim(), false, true}, label, std::nullopt);
  };
}

PsiGrid unit_grid(int dim, int per_axis) {
  PsiGrid g;
  g.dim = dim;
  g.per_axis = per_axis;
  g.lo = Vec::Zero();
  g.hi = Vec::Zero();
  for (int a = 0; a < dim; ++a) g.hi[a] = 1.0;
  return g;
}

MapSpec read_map(const Config& c, int dim, int equations) {
  MapSpec m;
  m.phi.clear();
  m.level.clear();
  m.phi.push_back(read_phi(c, "map", dim, ""));
  m.level.push_back(c.number_or("map", "level", 1.0));
  if (equations == 2) {
    m.phi.push_back(read_phi(c, "map", dim, "2"));
    m.level.push_back(c.number_or("map", "level2", m.level[0]));
  }
  return m;
}

std::string map_label(const Descriptor& a, const MapSpec& m) {
  std::string s = describe(a) + " with";
  for (std::size_t i = 0; i < m.phi.size(); ++i) s += fmt::format(" {}={}", to_string(m.phi[i].family), num(m.level[i]));
  return s;
}

Job prepare_levelset(const Config& c) {
  const Descriptor da = read_descriptor(c, "A");
  const std::uint64_t seed = run_seed(c);
  const Sampling s = read_sampling(c, "sampling", da.d, unit_grid(da.d, 8), seed);
  const MapSpec m = read_map(c, da.d, 1);
  const ExperimentOptions opt = read_options(c, intersection_ladder(c, da.k), s.alpha);
  const bool exceptional = c.flag_or("run", "exceptional", false);
  if (exceptional && !s.grid) c.fail("run", "exceptional", "needs grid sampling");
  return [da, s, m, opt, exceptional] {
    const Construction a = build(da);
    const ExperimentResult r = level_set_experiment(a, m, s.xs, opt);
    std::optional<ExceptionalReport> exc;
    if (exceptional) exc = exceptional_set_dim(r.records, *s.grid, r.threshold.intersection + r.margin, r.threshold.exceptional);
    return intersection_artifacts("levelset", r, Columns{da.d}, map_label(da, m), exc);
  };
}

Job prepare_maximal(const Config& c) {
  const Descriptor da = read_descriptor(c, "A");
  const std::uint64_t seed = run_seed(c);
  const Sampling s = read_sampling(c, "sampling", da.d, unit_grid(da.d, 8), seed);
  const MapSpec m = read_map(c, da.d, 1);
  const std::vector<double> ts = c.numbers("run", "t");
  const ExperimentOptions opt = read_options(c, intersection_ladder(c, da.k), s.alpha);
  return [da, s, m, ts, opt] {
    const Construction a = build(da);
    const ExperimentResult r = maximal_experiment(a, m, ts, s.xs, opt);
    return intersection_artifacts("maximal", r, Columns{da.d}, map_label(da, m), std::nullopt);
  };
}

Job prepare_two_surface(const Config& c) {
  const Descriptor da = read_descriptor(c, "A");
  const std::uint64_t seed = run_seed(c);
  const Sampling s1 = read_sampling(c, "sampling", da.d, unit_grid(da.d, 8), seed);
  const Sampling s2 = read_sampling(c, "sampling2", da.d, unit_grid(da.d, 8), seed + 1);
  if (s1.xs.size() != s2.xs.size()) throw ConfigError("[sampling] and [sampling2] must give the same number of points");
  const MapSpec m = read_map(c, da.d, 2);
  ExperimentOptions opt = read_options(c, intersection_ladder(c, da.k), s1.alpha);
  opt.alpha2 = s2.alpha;
  const std::string pairing = c.text_or("run", "pairing", "shuffle");
  if (pairing != "shuffle" && pairing != "index") c.fail("run", "pairing", "expected shuffle or index");
  std::vector<WeightedPoint> x2 = s2.xs;
  if (pairing == "shuffle") {
    Rng rng(seed, 0x70616972);
    for (std::size_t i = x2.size(); i > 1; --i) std::swap(x2[i - 1], x2[rng.below(i)]);
  }
  return [da, s1, x2, m, opt] {
    const Construction a = build(da);
    const ExperimentResult r = two_surface_experiment(a, m, s1.xs, x2, opt);
    return intersection_artifacts("two-surface", r, Columns{da.d, false, false, true}, map_label(da, m), std::nullopt);
  };
}

std::vector<Vec> direction_grid(int dim, int n, double radius) {
  std::vector<Vec> out;
  if (dim == 2) {
    for (int i = 0; i < n; ++i) {
      const double th = 2 * M_PI * (i + 0.5) / n;
      out.push_back(radius * Vec(std::cos(th), std::sin(th), 0));
    }
    return out;
  }
  // Fibonacci points on the sphere
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double r = std::sqrt(1.0 - z * z);
    out.push_back(radius * Vec(r * std::cos(golden * i), r * std::sin(golden * i), z));
  }
  return out;
}

Job prepare_inverse(const Config& c) {
  const std::string sec = c.has_section("E") ? "E" : "A";
  const Descriptor de = read_descriptor(c, sec);
  const DefiningFunction phi = read_phi(c, "map", de.d, "");
  const int n_dir = static_cast<int>(c.integer_or("run", "directions", 16));
  const double radius = c.number_or("run", "radius", 1.0);
  const int t_count = static_cast<int>(c.integer_or("run", "t_count", 16));
  const double target = c.number_or("run", "gamma_target", 0.0);
  const std::vector<int> ladder = intersection_ladder(c, de.k);
  return [de, phi, n_dir, radius, t_count, target, ladder] {
    const Construction e = build(de);
    const std::vector<Vec> u = direction_grid(de.d, n_dir, radius);
    const InverseReport r = inverse_experiment(e, phi, u, t_count, ladder, target);
    Artifacts art;
    art.records = "index";
    for (int a = 0; a < de.d; ++a) art.records += fmt::format(",u_{}", a);
    art.records += ",best_t,gamma\n";
    for (std::size_t i = 0; i < r.directions.size(); ++i) {
      art.records += std::to_string(i);
      for (int a = 0; a < de.d; ++a) art.records += "," + num(r.directions[i][a]);
      art.records += "," + num(r.best_t[i]) + "," + num(r.gamma[i]) + "\n";
    }
    const std::string verdict = r.consistent ? "bound-respected" : "bound-violated";
    art.summary.push_back({"inverse", "inverse", describe(de) + " with " + to_string(phi.family),
                           num(r.dimension.slope), num(r.bound), num(r.dimension.residual), verdict, "gamma_uniform",
                           num(r.gamma_uniform), "", "", ""});
    art.verdict = verdict;
    art.notes.push_back(fmt::format("gamma uniform {} at direction {}", num(r.gamma_uniform), r.witness));
    art.notes.push_back(fmt::format("d gamma / (d-1) = {} against minkowski dimension {}", num(r.bound),
                                    num(r.dimension.slope)));
    art.exit_code = r.consistent ? 0 : 2;
    return art;
  };
}

PairSpec read_pairs(const Config& c, int q, int d) {
  PairSpec spec;
  const std::string mode = c.text_or("lattice", "mode", std::pow(q + 1.0, 3 * d) <= 1e9 && q < 32 ? "exhaustive" : "sampled");
  if (mode == "exhaustive") {
    spec.mode = PairMode::exhaustive;
  } else if (mode == "sampled") {
    spec.mode = PairMode::sampled;
  } else {
    c.fail("lattice", "mode", "expected exhaustive or sampled");
  }
  spec.n_pairs = static_cast<std::size_t>(c.integer_or("lattice", "pairs", 4096));
  spec.seed = run_seed(c);
  return spec;
}

Family read_family(const Config& c, const std::string& sec) {
  try {
    return family_from_string(c.text_or(sec, "family", "euclidean-distance"));
  } catch (const InvalidArgument& e) {
    c.fail(sec, "family", e.what());
  }
}

Job prepare_count(const Config& c) {
  const int d = static_cast<int>(c.integer_or("lattice", "d", 2));
  const int q = static_cast<int>(c.integer("lattice", "q"));
  const double s = c.number("lattice", "s");
  const Family family = read_family(c, "lattice");
  const int m = static_cast<int>(c.integer_or("lattice", "m", 4));
  const std::optional<double> lambda =
      c.has("lattice", "lambda") ? std::optional(c.number("lattice", "lambda")) : std::nullopt;
  LatticeConfig cfg;
  try {
    cfg = make_lattice_config(d, q, s, family, m, lambda);
  } catch (const InvalidArgument& e) {
    throw ConfigError(fmt::format("[lattice]: {}", e.what()));
  }
  cfg.single_equation = c.flag_or("lattice", "single", false);
  const PairSpec spec = read_pairs(c, q, d);
  const std::string method = c.text_or("lattice", "method", "fast");
  if (method != "fast" && method != "brute" && method != "both") c.fail("lattice", "method", "expected fast, brute or both");
  return [cfg, spec, method] {
    CountTable t = method == "brute" ? count_bruteforce(cfg, spec) : count_fast(cfg, spec);
    Artifacts art;
    if (method == "both") {
      const CountTable b = count_bruteforce(cfg, spec);
      if (b.nu != t.nu) throw Error("fast and brute-force counts differ");
      art.notes.push_back("fast and brute-force counts agree");
    }
    std::ostringstream out;
    write_csv(out, t);
    art.records = out.str();
    const std::string label = fmt::format("lattice(d={},q={},s={},{})", cfg.d, cfg.q, num(cfg.s), to_string(cfg.phi1.family));
    art.summary.push_back({"count", "number-theory", label, "", "", "", "informational", "aggregate",
                           num(t.aggregate), "", "", ""});
    art.notes.push_back(fmt::format("delta {} lambda {} pairs {}", num(cfg.delta()), num(cfg.lambda1), t.pairs.size()));
    art.notes.push_back(fmt::format("aggregate {} stderr {}", num(t.aggregate), num(t.stderr_aggregate)));
    return art;
  };
}

Job prepare_average_slope(const Config& c) {
  const int d = static_cast<int>(c.integer_or("lattice", "d", 2));
  const double s = c.number("lattice", "s");
  std::vector<int> qs;
  for (double q : c.numbers("lattice", "q")) qs.push_back(static_cast<int>(q));
  const Family family = read_family(c, "lattice");
  const int m = static_cast<int>(c.integer_or("lattice", "m", 4));
  PairSpec spec;
  spec.mode = PairMode::sampled;
  spec.n_pairs = static_cast<std::size_t>(c.integer_or("lattice", "pairs", 4096));
  spec.seed = run_seed(c);
  return [d, s, qs, family, m, spec] {
    const AverageSlope r = average_slope(d, s, qs, spec, family, m);
    Artifacts art;
    art.records = "q,mean_nu,stderr\n";
    art.plot = "# log2(q) log2(mean nu)\n";
    for (std::size_t i = 0; i < r.q.size(); ++i) {
      art.records += fmt::format("{},{},{}\n", r.q[i], num(r.mean[i]), num(r.stderr_mean[i]));
      art.plot += fmt::format("{} {}\n", num(std::log2(r.q[i])), num(std::log2(r.mean[i])));
    }
    const std::string verdict = r.respected ? "bound-respected" : "bound-violated";
    art.summary.push_back({"average-slope", "number-theory", fmt::format("lattice(d={},s={},{})", d, num(s), to_string(family)),
                           num(r.predicted), num(r.fit.slope), num(r.fit.residual), verdict, "pairs",
                           std::to_string(spec.n_pairs), "", "", ""});
    art.verdict = verdict;
    art.notes.push_back(fmt::format("predicted exponent {} (tolerance {})", num(r.predicted), num(r.tolerance)));
    art.notes.push_back(fmt::format("fitted slope {}", num(r.fit.slope)));
    art.exit_code = r.respected ? 0 : 2;
    return art;
  };
}

const std::vector<std::pair<std::string, std::function<Job(const Config&)>>>& dispatch() {
  static const std::vector<std::pair<std::string, std::function<Job(const Config&)>>> table{
      {"construct", prepare_construct},
      {"dims", prepare_dims},
      {"energy", prepare_energy},
      {"fourier", prepare_fourier},
      {"hyperplane", prepare_hyperplane},
      {"intersect-translate", prepare_translate},
      {"intersect-rotate", prepare_rotate},
      {"intersect-dilate", prepare_dilate},
      {"levelset", prepare_levelset},
      {"maximal", prepare_maximal},
      {"two-surface", prepare_two_surface},
      {"inverse", prepare_inverse},
      {"count", prepare_count},
      {"average-slope", prepare_average_slope},
  };
  return table;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  out << text;
}

std::optional<int> cached_exit(const fs::path& manifest, std::string& verdict) {
  std::ifstream in(manifest);
  if (!in) return std::nullopt;
  std::optional<int> code;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq), value = line.substr(eq + 3);
    if (key == "exit_code") code = std::stoi(value);
    if (key == "verdict") verdict = value;
  }
  return code;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : dispatch()) out.push_back(name);
    return out;
  }();
  return names;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        out.back() += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.emplace_back();
    } else if (ch != '\r') {
      out.back() += ch;
    }
  }
  return out;
}

std::string summary_header() {
  return "experiment,theorem,construction,predicted,fitted_slope,residual,verdict,statistic,value,"
         "exceptional_fraction,exceptional_dim,predicted_exceptional_dim";
}

std::string summary_line(const SummaryRow& r) {
  const std::string fields[] = {r.experiment, r.theorem,   r.construction, r.predicted,
                                r.fitted_slope, r.residual, r.verdict,      r.statistic,
                                r.value,      r.exceptional_fraction, r.exceptional_dim,
                                r.predicted_exceptional_dim};
  std::string out;
  for (const std::string& f : fields) out += (out.empty() ? "" : ",") + csv_field(f);
  return out;
}

SummaryRow parse_summary_line(const std::string& line) {
  const auto f = split_csv_line(line);
  if (f.size() != 12) throw FormatError(fmt::format("summary line has {} fields, expected 12", f.size()));
  return {f[0], f[1], f[2], f[3], f[4], f[5], f[6], f[7], f[8], f[9], f[10], f[11]};
}

RunOutcome run_config(Config config, const RunOptions& options, std::ostream& log) {
  if (options.seed) config.set("run", "seed", std::to_string(*options.seed));
  const std::string experiment = config.text("run", "experiment");
  if (!options.experiment.empty() && options.experiment != "run" && options.experiment != experiment) {
    config.fail("run", "experiment",
                fmt::format("config runs '{}' but the subcommand asks for '{}'", experiment, options.experiment));
  }
  const auto it = std::find_if(dispatch().begin(), dispatch().end(), [&](const auto& e) { return e.first == experiment; });
  if (it == dispatch().end()) config.fail("run", "experiment", fmt::format("unknown experiment '{}'", experiment));

  const std::uint64_t hash = fnv1a64(config.canonical() + "version=" + kToolVersion);
  RunOutcome outcome;
  const fs::path out = options.out ? *options.out : fs::path(config.text_or("run", "out", "results"));
  outcome.dir = out / fmt::format("{}-{:016x}", experiment, hash);
  if (!options.force) {
    if (auto code = cached_exit(outcome.dir / "manifest.txt", outcome.verdict)) {
      outcome.exit_code = *code;
      outcome.cached = true;
      log << fmt::format("{}: {} (cached in {})\n", experiment, outcome.verdict, outcome.dir.string());
      return outcome;
    }
  }

  const Job job = it->second(config);
  const std::string seed = config.text_or("run", "seed", "1");
  if (const auto unused = config.unused(); !unused.empty()) {
    std::string msg = "unknown config entries:";
    for (const std::string& u : unused) msg += "\n  " + u;
    throw ConfigError(msg);
  }

  const auto t0 = std::chrono::steady_clock::now();
  const Artifacts art = job();
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::string summary = summary_header() + "\n";
  for (const SummaryRow& row : art.summary) summary += summary_line(row) + "\n";
  std::string verdict = art.verdict + "\n";
  for (const std::string& n : art.notes) verdict += n + "\n";

  if (fs::exists(outcome.dir)) fs::remove_all(outcome.dir);
  fs::create_directories(outcome.dir);
  std::vector<std::string> files{"records.csv", "summary.csv", "verdict.txt"};
  write_file(outcome.dir / "records.csv", art.records);
  write_file(outcome.dir / "summary.csv", summary);
  write_file(outcome.dir / "verdict.txt", verdict);
  if (!art.plot.empty()) {
    write_file(outcome.dir / "plot.dat", art.plot);
    files.push_back("plot.dat");
  }
  std::string manifest;
  manifest += fmt::format("config_hash = {:016x}\n", hash);
  manifest += fmt::format("tool_version = {}\n", kToolVersion);
  manifest += fmt::format("experiment = {}\n", experiment);
  manifest += fmt::format("config = {}\n", options.config.string());
  manifest += fmt::format("seed = {}\n", seed);
  manifest += fmt::format("wall_time_s = {:.3f}\n", wall);
  std::string list;
  for (const std::string& f : files) list += (list.empty() ? "" : " ") + f;
  manifest += "outputs = " + list + " manifest.txt\n";
  manifest += "verdict = " + art.verdict + "\n";
  manifest += fmt::format("exit_code = {}\n", art.exit_code);
  write_file(outcome.dir / "manifest.txt", manifest);

  outcome.exit_code = art.exit_code;
  outcome.verdict = art.verdict;
  log << fmt::format("{}: {} ({})\n", experiment, art.verdict, outcome.dir.string());
  return outcome;
}

RunOutcome run_experiment(const RunOptions& options, std::ostream& log) {
  try {
    return run_config(Config::load(options.config), options, log);
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
  }
  RunOutcome failed;
  failed.exit_code = 1;
  return failed;
}

}  // namespace fractint
