#include "semitorus/fit.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "semitorus/rng.hpp"

namespace semitorus {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line needs >= 2 paired points");
  double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line needs two distinct abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssres = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - (f.slope * x[i] + f.intercept);
    ssres += r * r;
  }
  f.r2 = syy > 0.0 ? 1.0 - ssres / syy : 1.0;
  return f;
}

LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("fit_loglog needs positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return fit_line(lx, ly);
}

namespace {

Interval percentile(std::vector<double> v, double level) {
  if (v.empty()) return {std::nan(""), std::nan("")};
  std::sort(v.begin(), v.end());
  double tail = 0.5 * (1.0 - level);
  auto pick = [&](double q) {
    double pos = q * (v.size() - 1);
    size_t i = static_cast<size_t>(std::floor(pos));
    size_t j = std::min(i + 1, v.size() - 1);
    double t = pos - i;
    return v[i] * (1.0 - t) + v[j] * t;
  };
  return {pick(tail), pick(1.0 - tail)};
}

}  // namespace

Interval bootstrap_slope(const std::vector<double>& x, const std::vector<double>& y, int resamples,
                         std::uint64_t seed, double level) {
  size_t n = x.size();
  std::vector<double> slopes;
  slopes.reserve(resamples);
  std::vector<double> bx(n), by(n);
  for (int r = 0; r < resamples; ++r) {
    std::set<double> distinct;
    for (size_t i = 0; i < n; ++i) {
      size_t k = static_cast<size_t>(counter_uniform(seed, r * n + i) * n);
      bx[i] = x[k];
      by[i] = y[k];
      distinct.insert(x[k]);
    }
    if (distinct.size() < 2) continue;
    slopes.push_back(fit_loglog(bx, by).slope);
  }
  return percentile(std::move(slopes), level);
}

Interval bootstrap_mean(const std::vector<double>& v, int resamples, std::uint64_t seed, double level) {
  size_t n = v.size();
  std::vector<double> means;
  means.reserve(resamples);
  for (int r = 0; r < resamples; ++r) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += v[static_cast<size_t>(counter_uniform(seed, r * n + i) * n)];
    means.push_back(s / n);
  }
  return percentile(std::move(means), level);
}

}  // namespace semitorus
