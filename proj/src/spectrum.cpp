#include "fractint/spectrum.hpp"

#include <algorithm>
#include <mutex>

#include <fftw3.h>
#include <fmt/format.h>

namespace fractint {

namespace {

// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <class T>
std::unique_ptr<T[], FftwFree> fftw_buffer(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1)));
  if (!p) throw BudgetError("FFT buffer allocation failed");
  return std::unique_ptr<T[], FftwFree>(p);
}

class Plan {
 public:
  explicit Plan(fftw_plan p) : p_(p) {
    if (!p_) throw Error("FFTW could not create a plan");
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p_);
  }
  void execute() const { fftw_execute(p_); }

 private:
  fftw_plan p_;
};

std::size_t total(const std::array<std::int64_t, 3>& n, int d) {
  std::size_t t = 1;
  for (int a = 0; a < d; ++a) t *= static_cast<std::size_t>(n[a]);
  return t;
}

void check_budget(std::size_t cells) {
  if (cells > static_cast<std::size_t>(kDenseBudget)) {
    throw BudgetError(fmt::format("dense grid of {} cells exceeds the budget of {}", cells, kDenseBudget));
  }
}

std::size_t flat(const std::array<std::int64_t, 3>& idx, const std::array<std::int64_t, 3>& n, int d) {
  std::size_t f = 0;
  for (int a = 0; a < d; ++a) f = f * static_cast<std::size_t>(n[a]) + static_cast<std::size_t>(idx[a]);
  return f;
}

}  // namespace

DenseLayout dense_layout(const DiscreteMeasure& mu) {
  DenseLayout l;
  l.dim = mu.grid().dim();
  if (mu.size() == 0) return l;
  Coord lo = mu.support().coord(0), hi = lo;
  for (std::size_t i = 1; i < mu.size(); ++i) {
    const Coord c = mu.support().coord(i);
    for (int a = 0; a < l.dim; ++a) {
      lo[a] = std::min(lo[a], c[a]);
      hi[a] = std::max(hi[a], c[a]);
    }
  }
  for (int a = 0; a < l.dim; ++a) {
    l.lo[a] = lo[a];
    l.extent[a] = hi[a] - lo[a] + 1;
  }
  return l;
}

std::vector<std::complex<double>> dense_transform(const DiscreteMeasure& mu, std::int64_t m) {
  const int d = mu.grid().dim();
  const std::array<std::int64_t, 3> n{m, d > 1 ? m : 1, d > 2 ? m : 1};
  const std::size_t cells = total(n, d);
  check_budget(cells);
  auto buf = fftw_buffer<fftw_complex>(cells);
  std::fill_n(&buf[0][0], 2 * cells, 0.0);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const Coord c = mu.support().coord(i);
    std::array<std::int64_t, 3> idx{0, 0, 0};
    for (int a = 0; a < d; ++a) idx[a] = c[a] % m;
    buf[flat(idx, n, d)][0] += mu.weight(i);
  }
  std::array<int, 3> dims{static_cast<int>(n[0]), static_cast<int>(n[1]), static_cast<int>(n[2])};
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = std::make_unique<Plan>(fftw_plan_dft(d, dims.data(), buf.get(), buf.get(), FFTW_FORWARD, FFTW_ESTIMATE));
  }
  plan->execute();
  std::vector<std::complex<double>> out(cells);
  std::array<std::int64_t, 3> idx{0, 0, 0};
  for (std::size_t f = 0; f < cells; ++f) {
    std::size_t r = f;
    for (int a = d - 1; a >= 0; --a) {
      idx[a] = static_cast<std::int64_t>(r % static_cast<std::size_t>(n[a]));
      r /= static_cast<std::size_t>(n[a]);
    }
    double phase = 0.0;
    for (int a = 0; a < d; ++a) {
      const std::int64_t freq = idx[a] < (m + 1) / 2 ? idx[a] : idx[a] - m;
      phase += static_cast<double>(freq);
    }
    // cell centers sit half a cell past the lattice points
    const std::complex<double> shift = std::polar(1.0, -M_PI * phase / static_cast<double>(m));
    out[f] = std::complex<double>(buf[f][0], buf[f][1]) * shift;
  }
  return out;
}

namespace {

// Real-to-complex transform of the weights placed at (c - lo) on a grid of
// size n; returns the half spectrum and keeps the layout.
struct HalfSpectrum {
  std::array<std::int64_t, 3> n{1, 1, 1};
  std::unique_ptr<fftw_complex[], FftwFree> data;
  std::size_t count = 0;
};

HalfSpectrum half_spectrum(const DiscreteMeasure& mu, const std::array<std::int64_t, 3>& n,
                           const std::array<std::int64_t, 3>& lo) {
  const int d = mu.grid().dim();
  const std::size_t cells = total(n, d);
  check_budget(cells);
  auto in = fftw_buffer<double>(cells);
  std::fill_n(in.get(), cells, 0.0);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const Coord c = mu.support().coord(i);
    std::array<std::int64_t, 3> idx{0, 0, 0};
    for (int a = 0; a < d; ++a) idx[a] = ((c[a] - lo[a]) % n[a] + n[a]) % n[a];
    in[flat(idx, n, d)] += mu.weight(i);
  }
  HalfSpectrum h;
  h.n = n;
  h.count = cells / static_cast<std::size_t>(n[d - 1]) * static_cast<std::size_t>(n[d - 1] / 2 + 1);
  h.data = fftw_buffer<fftw_complex>(h.count);
  std::array<int, 3> dims{static_cast<int>(n[0]), static_cast<int>(n[1]), static_cast<int>(n[2])};
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = std::make_unique<Plan>(fftw_plan_dft_r2c(d, dims.data(), in.get(), h.data.get(), FFTW_ESTIMATE));
  }
  plan->execute();
  return h;
}

}  // namespace

std::vector<double> power_spectrum(const DiscreteMeasure& mu, std::int64_t m) {
  const int d = mu.grid().dim();
  const std::array<std::int64_t, 3> n{m, d > 1 ? m : 1, d > 2 ? m : 1};
  const HalfSpectrum h = half_spectrum(mu, n, {0, 0, 0});
  const std::size_t cells = total(n, d);
  std::vector<double> out(cells);
  const std::int64_t last = n[d - 1], half = last / 2 + 1;
  const std::size_t rows = cells / static_cast<std::size_t>(last);
  for (std::size_t r = 0; r < rows; ++r) {
    // mirror row: negate every index of the leading axes
    std::array<std::int64_t, 3> idx{0, 0, 0};
    std::size_t rr = r;
    for (int a = d - 2; a >= 0; --a) {
      idx[a] = static_cast<std::int64_t>(rr % static_cast<std::size_t>(n[a]));
      rr /= static_cast<std::size_t>(n[a]);
    }
    std::size_t mirror = 0;
    for (int a = 0; a < d - 1; ++a) mirror = mirror * static_cast<std::size_t>(n[a]) + static_cast<std::size_t>((n[a] - idx[a]) % n[a]);
    for (std::int64_t j = 0; j < last; ++j) {
      const fftw_complex* v = j < half ? &h.data[r * static_cast<std::size_t>(half) + static_cast<std::size_t>(j)]
                                       : &h.data[mirror * static_cast<std::size_t>(half) + static_cast<std::size_t>(last - j)];
      out[r * static_cast<std::size_t>(last) + static_cast<std::size_t>(j)] = (*v)[0] * (*v)[0] + (*v)[1] * (*v)[1];
    }
  }
  return out;
}

Autocorrelation autocorrelation(const DiscreteMeasure& mu) {
  const DenseLayout l = dense_layout(mu);
  const int d = l.dim;
  Autocorrelation ac;
  ac.dim = d;
  for (int a = 0; a < d; ++a) ac.size[a] = 2 * l.extent[a];
  HalfSpectrum h = half_spectrum(mu, ac.size, l.lo);
  for (std::size_t i = 0; i < h.count; ++i) {
    h.data[i][0] = h.data[i][0] * h.data[i][0] + h.data[i][1] * h.data[i][1];
    h.data[i][1] = 0.0;
  }
  const std::size_t cells = total(ac.size, d);
  auto out = fftw_buffer<double>(cells);
  std::array<int, 3> dims{static_cast<int>(ac.size[0]), static_cast<int>(ac.size[1]), static_cast<int>(ac.size[2])};
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = std::make_unique<Plan>(fftw_plan_dft_c2r(d, dims.data(), h.data.get(), out.get(), FFTW_ESTIMATE));
  }
  plan->execute();
  ac.values.assign(out.get(), out.get() + cells);
  for (double& v : ac.values) v /= static_cast<double>(cells);
  return ac;
}

}  // namespace fractint
