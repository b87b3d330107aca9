#include "eik/kernels.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <thread>

namespace eik {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw Error(msg);
}

/// Smallest n' >= n whose only prime factors are 2, 3, 5 and 7.
std::size_t fast_fft_size(std::size_t n) {
  for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2u, 3u, 5u, 7u})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

class FftBuffer {
 public:
  explicit FftBuffer(std::size_t n)
      : data_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))),
        n_(n) {
    if (!data_) throw std::bad_alloc();
    std::fill_n(reinterpret_cast<double*>(data_), 2 * n_, 0.0);
  }
  ~FftBuffer() { fftw_free(data_); }
  FftBuffer(const FftBuffer&) = delete;
  FftBuffer& operator=(const FftBuffer&) = delete;

  fftw_complex* get() { return data_; }
  double& re(std::size_t k) { return data_[k][0]; }
  double& im(std::size_t k) { return data_[k][1]; }

 private:
  fftw_complex* data_;
  std::size_t n_;
};

class FftPlan {
 public:
  FftPlan(std::size_t m0, std::size_t m1, FftBuffer& buf, int sign) {
    // FFTW_ESTIMATE keeps planning deterministic and leaves the buffer intact.
    plan_ = m1 == 1 ? fftw_plan_dft_1d(static_cast<int>(m0), buf.get(), buf.get(), sign,
                                       FFTW_ESTIMATE)
                    : fftw_plan_dft_2d(static_cast<int>(m0), static_cast<int>(m1),
                                       buf.get(), buf.get(), sign, FFTW_ESTIMATE);
    if (!plan_) throw Error("FFTW planning failed");
  }
  ~FftPlan() { fftw_destroy_plan(plan_); }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  void execute() { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

double regularized_origin_radius(const GridSpec& g) {
  double h = g.spacing(0);
  if (g.ndims() == 2) h = std::min(h, g.spacing(1));
  return 0.5 * h;
}

void check_same_spacing(const GridSpec& a, const GridSpec& k) {
  require(a.ndims() == k.ndims(), "convolve: field and kernel dimensionality differ");
  for (int ax = 0; ax < a.ndims(); ++ax) {
    const double s = a.spacing(ax), t = k.spacing(ax);
    require(std::abs(s - t) <= 1e-12 * std::max(s, t),
            "convolve: field and kernel spacing differ");
  }
}

ScalarField convolve_fft(const ScalarField& a, const ScalarField& kernel, bool circular) {
  const GridSpec& ga = a.grid();
  const GridSpec& gk = kernel.grid();
  const std::size_t n0 = ga.dim(0), n1 = ga.dim(1);
  const std::size_t k0 = gk.dim(0), k1 = gk.dim(1);
  const std::size_t c0 = (k0 - 1) / 2, c1 = (k1 - 1) / 2;

  std::size_t m0 = n0, m1 = n1;
  if (!circular) {
    m0 = fast_fft_size(std::max(n0 + c0, k0));
    m1 = ga.ndims() == 1 ? 1 : fast_fft_size(std::max(n1 + c1, k1));
  }
  const std::size_t m = m0 * m1;

  FftBuffer fa(m), fk(m);
  for (std::size_t i = 0; i < n0; ++i)
    for (std::size_t j = 0; j < n1; ++j) fa.re(i * m1 + j) = a[i * n1 + j];
  for (std::size_t i = 0; i < k0; ++i)
    for (std::size_t j = 0; j < k1; ++j) fk.re(i * m1 + j) = kernel[i * k1 + j];

  {
    FftPlan pa(m0, m1, fa, FFTW_FORWARD), pk(m0, m1, fk, FFTW_FORWARD);
    pa.execute();
    pk.execute();
  }
  for (std::size_t q = 0; q < m; ++q) {
    const std::complex<double> x(fa.re(q), fa.im(q)), y(fk.re(q), fk.im(q));
    const std::complex<double> z = x * y;
    fa.re(q) = z.real();
    fa.im(q) = z.imag();
  }
  FftPlan(m0, m1, fa, FFTW_BACKWARD).execute();

  const double norm = 1.0 / static_cast<double>(m);
  ScalarField out(ga);
  double max_re = 0.0, max_im = 0.0;
  for (std::size_t i = 0; i < n0; ++i) {
    for (std::size_t j = 0; j < n1; ++j) {
      const std::size_t q = ((i + c0) % m0) * m1 + (j + c1) % m1;
      out[i * n1 + j] = fa.re(q) * norm;
      max_re = std::max(max_re, std::abs(fa.re(q)));
      max_im = std::max(max_im, std::abs(fa.im(q)));
    }
  }
  if (max_im > 1e-9 * max_re + 1e-300)
    throw Error("convolve: FFT left a non-negligible imaginary residue");
  return out;
}

ScalarField convolve_direct(const ScalarField& a, const ScalarField& kernel, int threads) {
  const GridSpec& ga = a.grid();
  const GridSpec& gk = kernel.grid();
  const std::size_t n0 = ga.dim(0), n1 = ga.dim(1);
  const std::size_t k1 = gk.dim(1);
  const auto c0 = static_cast<std::ptrdiff_t>((gk.dim(0) - 1) / 2);
  const auto c1 = static_cast<std::ptrdiff_t>((k1 - 1) / 2);
  const auto kk0 = static_cast<std::ptrdiff_t>(gk.dim(0));
  const auto kk1 = static_cast<std::ptrdiff_t>(k1);

  ScalarField out(ga);
  auto rows = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = 0; j < n1; ++j) {
        double s = 0.0;
        for (std::size_t p = 0; p < n0; ++p) {
          const std::ptrdiff_t u = static_cast<std::ptrdiff_t>(i) -
                                   static_cast<std::ptrdiff_t>(p) + c0;
          if (u < 0 || u >= kk0) continue;
          for (std::size_t q = 0; q < n1; ++q) {
            const std::ptrdiff_t v = static_cast<std::ptrdiff_t>(j) -
                                     static_cast<std::ptrdiff_t>(q) + c1;
            if (v < 0 || v >= kk1) continue;
            s += a[p * n1 + q] * kernel[static_cast<std::size_t>(u * kk1 + v)];
          }
        }
        out[i * n1 + j] = s;
      }
    }
  };

  const auto nthreads = static_cast<std::size_t>(std::clamp(threads, 1, 256));
  if (nthreads == 1 || n0 < 2 * nthreads) {
    rows(0, n0);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n0 + nthreads - 1) / nthreads;
    for (std::size_t b = 0; b < n0; b += chunk)
      pool.emplace_back(rows, b, std::min(n0, b + chunk));
  }
  return out;
}

}  // namespace

void KernelParams::validate() const {
  require(hbar > 0.0 && std::isfinite(hbar), "kernel: hbar must be positive");
  require(f_const > 0.0 && std::isfinite(f_const), "kernel: f~ must be positive");
  require(dimension >= 1 && dimension <= 3, "kernel: dimension must be 1, 2 or 3");
}

OriginRegularization OriginRegularization::finite_cap(double value) {
  require(value > 0.0 && std::isfinite(value), "origin cap must be positive and finite");
  OriginRegularization r;
  r.kind = Kind::finite_cap;
  r.cap = value;
  return r;
}

double bessel_k0(double x) {
  require(x > 0.0, "bessel_k0: argument must be positive");
  // Past ~745 the value is below the smallest subnormal.
  if (x > 740.0) return 0.0;
  return std::cyl_bessel_k(0.0, x);
}

double green_1d(double r, const KernelParams& p) {
  require(r >= 0.0, "green_1d: r must be nonnegative");
  return std::exp(-p.f_const * r / p.hbar) / (2.0 * p.hbar * p.f_const);
}

double green_2d(double r, const KernelParams& p) {
  require(r >= 0.0, "green_2d: r must be nonnegative");
  if (r == 0.0)
    throw Error("green_2d: the kernel is singular at r = 0; use an origin regularization");
  return bessel_k0(p.f_const * r / p.hbar) /
         (2.0 * std::numbers::pi * p.hbar * p.hbar);
}

double green_2d_asymptotic(double r, const KernelParams& p) {
  require(r > 0.0, "green_2d_asymptotic: r must be positive");
  return std::exp(-p.f_const * r / p.hbar) /
         (2.0 * p.hbar * std::sqrt(2.0 * std::numbers::pi * p.hbar * p.f_const * r));
}

double green_3d(double r, const KernelParams& p) {
  if (!(r > 0.0)) throw Error("green_3d: the kernel is singular at r = 0");
  return std::exp(-p.f_const * r / p.hbar) /
         (4.0 * std::numbers::pi * p.hbar * p.hbar * r);
}

double modified_green(double r, const KernelParams& p) {
  require(r >= 0.0, "modified_green: r must be nonnegative");
  return std::exp(-p.f_const * r / p.hbar);
}

ScalarField kernel_field(const GridSpec& grid, const KernelParams& p, KernelKind which,
                         const ConvPolicy& policy, KernelExtent extent) {
  p.validate();
  require(grid.ndims() == 1 || grid.ndims() == 2, "kernel_field: grid must be 1D or 2D");
  if (which == KernelKind::exact)
    require(p.dimension == grid.ndims(),
            "kernel_field: exact kernel dimension does not match the grid");

  GridSpec kg = grid;
  std::array<double, 2> centre{0.0, 0.0};
  if (extent == KernelExtent::offsets) {
    kg = grid.offsets();
  } else {
    for (int a = 0; a < grid.ndims(); ++a)
      centre[a] = static_cast<double>((grid.dim(a) - 1) / 2) * grid.spacing(a);
  }
  // Offsets are measured from the centre node, not from world coordinates.
  ScalarField out(kg);
  const double r0 = regularized_origin_radius(grid);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const Index idx = kg.unflat(k);
    double dx = static_cast<double>(idx.i) * kg.spacing(0);
    double dy = kg.ndims() == 2 ? static_cast<double>(idx.j) * kg.spacing(1) : 0.0;
    if (extent == KernelExtent::offsets) {
      dx += kg.origin(0);
      if (kg.ndims() == 2) dy += kg.origin(1);
    } else {
      dx -= centre[0];
      dy -= centre[1];
    }
    const double r = std::hypot(dx, dy);
    double v = 0.0;
    if (which == KernelKind::modified) {
      v = modified_green(r, p);
    } else if (p.dimension == 1) {
      v = green_1d(r, p);
    } else if (r > 0.0) {
      v = green_2d(r, p);
    } else if (policy.origin.kind == OriginRegularization::Kind::half_cell) {
      v = green_2d(r0, p);
    } else {
      v = policy.origin.cap;
    }
    out[k] = v;
  }
  return out;
}

ScalarField convolve(const ScalarField& a, const ScalarField& kernel,
                     const ConvPolicy& policy, bool scale_by_cell) {
  const GridSpec& ga = a.grid();
  const GridSpec& gk = kernel.grid();
  check_same_spacing(ga, gk);
  if (policy.mode == ConvMode::circular) {
    require(ga.dim(0) == gk.dim(0) && ga.dim(1) == gk.dim(1),
            "convolve: circular mode needs the kernel on the field's own grid");
  } else {
    for (int ax = 0; ax < gk.ndims(); ++ax)
      require(gk.dim(ax) % 2 == 1, "convolve: kernel extent must be odd on each axis");
  }

  ScalarField out = policy.mode == ConvMode::direct
                        ? convolve_direct(a, kernel, policy.threads)
                        : convolve_fft(a, kernel, policy.mode == ConvMode::circular);
  if (scale_by_cell) {
    const double w = ga.cell_measure();
    for (double& v : out.values()) v *= w;
  }
  return out;
}

}  // namespace eik
