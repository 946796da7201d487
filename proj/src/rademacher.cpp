#include "depthlab/rademacher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "depthlab/errors.hpp"
#include "depthlab/parallel.hpp"

namespace depthlab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// sup_h (1/n) sum_i s_i h(X_i) for signs given as bits (1 -> +1).
double sup_correlation(const FiniteClassValues& v, const std::vector<std::uint64_t>& bits) {
  const std::size_t n = v.n();
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t h = 0; h < v.size(); ++h) {
    const double* r = v.row(h);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += (bits[i >> 6] >> (i & 63) & 1u) ? r[i] : -r[i];
    best = std::max(best, acc);
  }
  return best / static_cast<double>(n);
}

void check_class(const FiniteClassValues& v) {
  if (v.size() == 0) throw PreconditionError("empty hypothesis class");
  if (v.n() == 0) throw PreconditionError("sample size must be positive");
}

}  // namespace

FiniteClassValues::FiniteClassValues(const std::vector<std::vector<double>>& rows)
    : n_(rows.empty() ? 0 : rows[0].size()) {
  for (const auto& r : rows) add_row(r);
}

void FiniteClassValues::add_row(const std::vector<double>& row) {
  if (row.size() != n_) throw PreconditionError("hypothesis row has the wrong length");
  add_row(row.data());
}

void FiniteClassValues::add_row(const double* row) {
  for (std::size_t i = 0; i < n_; ++i)
    if (!std::isfinite(row[i])) throw PreconditionError("hypothesis values must be finite");
  data_.insert(data_.end(), row, row + n_);
}

double FiniteClassValues::bound() const {
  double b = 0.0;
  for (double x : data_) b = std::max(b, std::fabs(x));
  return b;
}

RademacherEstimate empirical_rademacher(const FiniteClassValues& v, std::size_t draws, std::uint64_t seed,
                                        int threads) {
  check_class(v);
  if (draws == 0) throw PreconditionError("draws must be at least 1");
  const std::size_t words = (v.n() + 63) / 64;
  std::vector<double> sample(draws);
  parallel_for(draws, threads, [&](std::size_t d) {
    std::vector<std::uint64_t> bits(words);
    const std::uint64_t base = splitmix64(seed ^ splitmix64(d + 1));
    for (std::size_t w = 0; w < words; ++w) bits[w] = splitmix64(base + w);
    sample[d] = sup_correlation(v, bits);
  });
  RademacherEstimate e;
  e.draws = draws;
  e.seed = seed;
  double sum = 0.0;
  for (double s : sample) sum += s;
  e.mean = sum / static_cast<double>(draws);
  if (draws > 1) {
    double ss = 0.0;
    for (double s : sample) ss += (s - e.mean) * (s - e.mean);
    e.std_error = std::sqrt(ss / static_cast<double>(draws - 1) / static_cast<double>(draws));
  }
  return e;
}

double exact_rademacher(const FiniteClassValues& v) {
  check_class(v);
  if (v.n() > 24) throw PreconditionError("exact enumeration is limited to n <= 24");
  const std::uint64_t total = std::uint64_t{1} << v.n();
  std::vector<std::uint64_t> bits(1);
  double sum = 0.0;
  for (std::uint64_t s = 0; s < total; ++s) {
    bits[0] = s;
    sum += sup_correlation(v, bits);
  }
  return sum / static_cast<double>(total);
}

RademacherEstimate rademacher_complexity(const FiniteClassValues& v, std::size_t draws, std::uint64_t seed,
                                         int threads) {
  if (v.n() <= kExactSignLimit) {
    RademacherEstimate e;
    e.mean = exact_rademacher(v);
    e.draws = std::size_t{1} << v.n();
    e.seed = seed;
    e.exact = true;
    return e;
  }
  return empirical_rademacher(v, draws, seed, threads);
}

double massart_bound(double b, std::size_t class_size, std::size_t n) {
  if (class_size == 0 || n == 0) throw PreconditionError("class size and n must be positive");
  return b * std::sqrt(2.0 * std::log(static_cast<double>(class_size)) / static_cast<double>(n));
}

double uniform_deviation_bound(double r_hat, double b, double delta, std::size_t n, double beta_loss) {
  if (!(delta > 0.0 && delta <= 1.0)) throw PreconditionError("delta must lie in (0,1)");
  if (n == 0) throw PreconditionError("n must be positive");
  return 2.0 * beta_loss * r_hat + b * std::sqrt(2.0 * std::log(1.0 / delta) / static_cast<double>(n));
}

double hidden_output_bound(double r_hat_h, double dudley_term) { return r_hat_h + dudley_term; }

double two_integral_bound(double entropy_h, double entropy_f, double lipschitz, std::size_t n, double b) {
  if (n == 0) throw PreconditionError("n must be positive");
  if (b < 0.0) throw PreconditionError("B must be nonnegative");
  return 24.0 / std::sqrt(static_cast<double>(n)) * (entropy_h + lipschitz * entropy_f);
}

nlohmann::json rademacher_report(const RademacherEstimate& e, const RademacherBounds& b) {
  return {{"estimate", e.mean},
          {"stderr", e.std_error},
          {"draws", e.draws},
          {"seed", e.seed},
          {"exact", e.exact},
          {"bounds", {{"massart", b.massart}, {"hidden_output", b.hidden_output}, {"two_integral", b.two_integral}}}};
}

}  // namespace depthlab
