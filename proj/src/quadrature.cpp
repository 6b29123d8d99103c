#include "subdiff/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>

namespace subdiff::quad {

namespace {

GaussLegendre compute_gauss_legendre(int n) {
  GaussLegendre rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

// Kronrod 15-point extension of the 7-point Gauss rule (QUADPACK qk15).
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment kronrod15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  std::array<double, 7> fv1{}, fv2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    fv1[j] = f(center - dx);
    fv2[j] = f(center + dx);
  }
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    resk += kWgk[j] * (fv1[j] + fv2[j]);
    if (j % 2 == 1) resg += kWg[j / 2] * (fv1[j] + fv2[j]);
  }
  const double value = resk * half;
  double err = std::abs((resk - resg) * half);
  // Mean absolute deviation scaling, as in QUADPACK.
  const double reskh = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
  resasc *= std::abs(half);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  return {a, b, value, err};
}

}  // namespace

const GaussLegendre& gauss_legendre(int order) {
  static std::mutex mutex;
  static std::map<int, GaussLegendre> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_gauss_legendre(order)).first;
  return it->second;
}

Result adaptive(const std::function<double(double)>& f, double a, double b,
                const Options& opts) {
  Result result;
  if (a == b) {
    result.converged = true;
    return result;
  }
  std::priority_queue<Segment> heap;
  Segment first = kronrod15(f, a, b);
  result.evaluations = 15;
  double total = first.value;
  double total_err = first.error;
  heap.push(first);
  int intervals = 1;
  while (total_err > std::max(opts.abs_tol, opts.rel_tol * std::abs(total))) {
    if (intervals >= opts.max_intervals) break;
    Segment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;
    heap.pop();
    Segment left = kronrod15(f, worst.a, mid);
    Segment right = kronrod15(f, mid, worst.b);
    result.evaluations += 30;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }
  // Resum to limit drift from the incremental updates.
  std::vector<double> values;
  std::vector<double> errors;
  values.reserve(heap.size());
  while (!heap.empty()) {
    values.push_back(heap.top().value);
    errors.push_back(heap.top().error);
    heap.pop();
  }
  result.value = pairwise_sum(values);
  result.error = pairwise_sum(errors);
  result.converged =
      result.error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(result.value));
  return result;
}

Result adaptive_breaks(const std::function<double(double)>& f, std::span<const double> breaks,
                       const Options& opts) {
  Result total;
  total.converged = true;
  if (breaks.size() < 2) return total;
  // First pass for a magnitude estimate, then tighten each panel against it.
  const std::size_t panels = breaks.size() - 1;
  double magnitude = 0.0;
  for (std::size_t i = 0; i < panels; ++i) magnitude += std::abs(kronrod15(f, breaks[i], breaks[i + 1]).value);
  total.evaluations = 15 * panels;
  std::vector<double> values;
  for (std::size_t i = 0; i < panels; ++i) {
    Options local = opts;
    local.abs_tol = std::max(opts.abs_tol, opts.rel_tol * magnitude) / static_cast<double>(panels);
    Result r = adaptive(f, breaks[i], breaks[i + 1], local);
    values.push_back(r.value);
    total.error += r.error;
    total.evaluations += r.evaluations;
  }
  total.value = pairwise_sum(values);
  total.converged =
      total.error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total.value)) * 1.0001;
  return total;
}

double pairwise_sum(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values.subspan(0, half)) + pairwise_sum(values.subspan(half));
}

double WynnEpsilon::push(double partial_sum) {
  // Keeps one anti-diagonal of the epsilon table.
  ++count_;
  std::vector<double> next(row_.size() + 1);
  next[0] = partial_sum;
  for (std::size_t k = 1; k < next.size(); ++k) {
    const double diff = next[k - 1] - row_[k - 1];
    const double prev = (k >= 2) ? row_[k - 2] : 0.0;
    if (diff == 0.0) {
      // Converged exactly; truncate the diagonal here.
      next.resize(k);
      break;
    }
    next[k] = prev + 1.0 / diff;
  }
  row_ = std::move(next);
  // Even columns hold the estimates; take the deepest one available.
  const std::size_t last_even = (row_.size() - 1) & ~std::size_t{1};
  previous_ = estimate_;
  estimate_ = row_[last_even];
  if (!std::isfinite(estimate_)) estimate_ = partial_sum;
  error_ = count_ > 1 ? std::abs(estimate_ - previous_) : std::numeric_limits<double>::infinity();
  return estimate_;
}

}  // namespace subdiff::quad
