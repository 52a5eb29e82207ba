#include "polaron/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <sstream>

#include "polaron/kernels.hpp"

namespace polaron {

namespace {
// FFTW's planner is not reentrant; execution of an existing plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

class FftEngine {
 public:
  FftEngine(int dim, int n) {
    std::array<int, 3> shape{n, n, n};
    const std::size_t total = static_cast<std::size_t>(std::pow(n, dim));
    fftw_complex* scratch = fftw_alloc_complex(total);
    {
      std::lock_guard<std::mutex> lock(planner_mutex());
      const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
      forward_ = fftw_plan_dft(dim, shape.data(), scratch, scratch, FFTW_FORWARD, flags);
      backward_ = fftw_plan_dft(dim, shape.data(), scratch, scratch, FFTW_BACKWARD, flags);
    }
    fftw_free(scratch);
  }
  ~FftEngine() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }
  void run(bool forward, std::span<cplx> data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(forward ? forward_ : backward_, p, p);
  }

 private:
  fftw_plan forward_;
  fftw_plan backward_;
};

Grid::Grid(int dim, int points, double half_length)
    : dim_(dim),
      points_(points),
      half_length_(half_length),
      dx_(2.0 * half_length / points),
      dk_(kPi / half_length) {
  size_ = 1;
  for (int a = 0; a < dim; ++a) size_ *= static_cast<std::size_t>(points);
  position_measure_ = std::pow(dx_, dim);
  momentum_measure_ = std::pow(dk_, dim);
  k2_.resize(size_);
  sign_.resize(size_);
  for (std::size_t i = 0; i < size_; ++i) {
    const auto m = lattice(i);
    double k2 = 0.0;
    int msum = 0;
    for (int a = 0; a < dim_; ++a) {
      const double k = m[a] * dk_;
      k2 += k * k;
      msum += m[a];
    }
    k2_[i] = k2;
    sign_[i] = (msum % 2 == 0) ? 1.0 : -1.0;
  }
  fft_ = std::make_unique<FftEngine>(dim, points);
}

Grid::~Grid() = default;

std::array<int, 3> Grid::lattice(std::size_t flat) const noexcept {
  std::array<int, 3> m{0, 0, 0};
  const std::size_t n = static_cast<std::size_t>(points_);
  for (int a = dim_ - 1; a >= 0; --a) {
    const int idx = static_cast<int>(flat % n);
    flat /= n;
    m[a] = idx < points_ / 2 ? idx : idx - points_;
  }
  return m;
}

std::array<double, 3> Grid::momentum(std::size_t flat) const noexcept {
  const auto m = lattice(flat);
  return {m[0] * dk_, m[1] * dk_, m[2] * dk_};
}

std::array<double, 3> Grid::position(std::size_t flat) const noexcept {
  std::array<double, 3> x{0.0, 0.0, 0.0};
  const std::size_t n = static_cast<std::size_t>(points_);
  for (int a = dim_ - 1; a >= 0; --a) {
    x[a] = -half_length_ + static_cast<double>(flat % n) * dx_;
    flat /= n;
  }
  return x;
}

std::size_t Grid::flat_index(const std::array<int, 3>& m) const {
  std::size_t flat = 0;
  for (int a = 0; a < dim_; ++a) {
    if (m[a] < -points_ / 2 || m[a] >= points_ / 2) {
      throw ConfigError("lattice coordinate outside the Brillouin window");
    }
    const int idx = m[a] < 0 ? m[a] + points_ : m[a];
    flat = flat * static_cast<std::size_t>(points_) + static_cast<std::size_t>(idx);
  }
  return flat;
}

std::size_t Grid::negate(std::size_t flat) const noexcept {
  auto m = lattice(flat);
  for (int a = 0; a < dim_; ++a) {
    if (m[a] != -points_ / 2) m[a] = -m[a];
  }
  return flat_index(m);
}

bool Grid::has_nyquist_component(std::size_t flat) const noexcept {
  const auto m = lattice(flat);
  for (int a = 0; a < dim_; ++a) {
    if (m[a] == -points_ / 2) return true;
  }
  return false;
}

void Grid::dft_forward(std::span<cplx> data) const { fft_->run(true, data); }
void Grid::dft_backward(std::span<cplx> data) const { fft_->run(false, data); }

bool Grid::same_as(const Grid& o) const noexcept {
  return this == &o || (dim_ == o.dim_ && points_ == o.points_ && half_length_ == o.half_length_);
}

GridPtr make_grid(int dim, int points, double half_length) {
  if (dim != 1 && dim != 3) throw ConfigError("dimension must be 1 or 3");
  if (points % 2 != 0) throw ConfigError("N must be even");
  if (points < 8) throw ConfigError("N must be at least 8");
  if (!(half_length > 0.0)) throw ConfigError("L must be positive");
  return std::make_shared<const Grid>(dim, points, half_length);
}

ComplexField::ComplexField(GridPtr g, Basis b) : grid(std::move(g)), basis(b) {
  values.assign(grid->size(), cplx{});
}

ComplexField::ComplexField(GridPtr g, Basis b, CVec v)
    : grid(std::move(g)), basis(b), values(std::move(v)) {
  if (values.size() != grid->size()) throw BasisMismatch("field length does not match grid");
}

ComplexField transform(const ComplexField& field, Direction direction) {
  const Grid& g = *field.grid;
  const Basis expected = direction == Direction::forward ? Basis::position : Basis::momentum;
  if (field.basis != expected) {
    throw BasisMismatch(direction == Direction::forward
                            ? "forward transform expects a position-basis field"
                            : "inverse transform expects a momentum-basis field");
  }
  ComplexField out = field;
  const double d = g.dim();
  if (direction == Direction::forward) {
    g.dft_forward(out.values);
    RVec scale(g.origin_sign().begin(), g.origin_sign().end());
    const double c = std::pow(g.dx() / std::sqrt(2.0 * kPi), d);
    for (double& s : scale) s *= c;
    kernels::rmul(out.values, scale);
    out.basis = Basis::momentum;
  } else {
    RVec scale(g.origin_sign().begin(), g.origin_sign().end());
    const double c = std::pow(g.dk() / std::sqrt(2.0 * kPi), d);
    for (double& s : scale) s *= c;
    kernels::rmul(out.values, scale);
    g.dft_backward(out.values);
    out.basis = Basis::position;
  }
  return out;
}

void require_compatible(const ComplexField& a, const ComplexField& b) {
  if (!a.grid || !b.grid || !a.grid->same_as(*b.grid)) throw BasisMismatch("grid mismatch");
  if (a.basis != b.basis) throw BasisMismatch("basis mismatch");
  if (a.values.size() != b.values.size()) throw BasisMismatch("length mismatch");
}

cplx inner(const ComplexField& a, const ComplexField& b) {
  require_compatible(a, b);
  return kernels::cdot(a.values, b.values) * a.measure();
}

double norm(const ComplexField& f) { return std::sqrt(kernels::norm2(f.values) * f.measure()); }

double ModeSet::abs_k(std::size_t j) const {
  const auto k = momentum(j);
  return std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
}

ModeSet make_modes(GridPtr grid, double cutoff) {
  if (!(cutoff > 0.0)) throw ConfigError("UV cutoff must be positive");
  const Grid& g = *grid;
  // Representatives of each +-k pair: first nonzero lattice coordinate positive.
  std::vector<std::size_t> reps;
  const auto k2 = g.k_squared();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (k2[i] == 0.0 || g.has_nyquist_component(i)) continue;
    if (std::sqrt(k2[i]) > cutoff * (1.0 + 1e-12)) continue;
    const auto m = g.lattice(i);
    int first = 0;
    for (int a = 0; a < g.dim(); ++a) {
      if (m[a] != 0) {
        first = m[a];
        break;
      }
    }
    if (first > 0) reps.push_back(i);
  }
  if (reps.empty()) {
    std::ostringstream os;
    os << "UV cutoff " << cutoff << " retains no lattice modes (dk = " << g.dk() << ")";
    throw ConfigError(os.str());
  }
  std::sort(reps.begin(), reps.end(), [&](std::size_t a, std::size_t b) {
    if (k2[a] != k2[b]) return k2[a] < k2[b];
    return g.lattice(a) > g.lattice(b);
  });
  ModeSet ms;
  ms.grid = std::move(grid);
  ms.cutoff = cutoff;
  for (std::size_t r : reps) {
    ms.flat.push_back(r);
    ms.flat.push_back(g.negate(r));
  }
  ms.partner.resize(ms.flat.size());
  for (std::size_t j = 0; j < ms.flat.size(); ++j) ms.partner[j] = j ^ 1u;
  return ms;
}

RVec coupling_amplitudes(const Grid& grid, const ModeSet& modes) {
  RVec g(modes.size());
  const auto k2 = grid.k_squared();
  for (std::size_t j = 0; j < modes.size(); ++j) {
    const double kk = k2[modes.flat[j]];
    if (kk == 0.0) throw ConfigError("zero mode present in mode set");
    g[j] = 1.0 / std::sqrt(kk);
  }
  return g;
}

CVec gather_modes(const ComplexField& field, const ModeSet& modes) {
  if (field.basis != Basis::momentum) throw BasisMismatch("mode values need a momentum field");
  CVec out(modes.size());
  for (std::size_t j = 0; j < modes.size(); ++j) out[j] = field.values[modes.flat[j]];
  return out;
}

ComplexField scatter_modes(std::span<const cplx> values, const ModeSet& modes) {
  if (values.size() != modes.size()) throw BasisMismatch("mode vector length mismatch");
  ComplexField f(modes.grid, Basis::momentum);
  for (std::size_t j = 0; j < modes.size(); ++j) f.values[modes.flat[j]] = values[j];
  return f;
}

double off_support(const ComplexField& field, const ModeSet& modes) {
  std::vector<char> in(field.size(), 0);
  for (std::size_t f : modes.flat) in[f] = 1;
  double worst = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (!in[i]) worst = std::max(worst, std::abs(field.values[i]));
  }
  return worst;
}

ComplexField plane_wave(GridPtr grid, std::size_t flat) {
  ComplexField f(grid, Basis::position);
  const auto k = grid->momentum(flat);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const auto x = grid->position(i);
    f.values[i] = std::polar(1.0, k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
  }
  return f;
}

}  // namespace polaron
