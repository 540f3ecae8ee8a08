#include "sroc/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sroc/error.hpp"

namespace sroc {

SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                          std::span<const double> x0, std::span<const double> step,
                          const SimplexOptions& options) {
  const std::size_t n = x0.size();
  if (n == 0 || step.size() != n) {
    throw Error(ErrorKind::InvalidArgument, "nelder_mead: start and step sizes must match and be non-empty");
  }
  constexpr double kReflect = 1.0;
  constexpr double kExpand = 2.0;
  constexpr double kContract = 0.5;
  constexpr double kShrink = 0.5;

  // NaN objective values are treated as +inf so they always lose.
  auto eval = [&](const std::vector<double>& x) {
    const double v = f(x);
    return std::isnan(v) ? HUGE_VAL : v;
  };

  std::vector<std::vector<double>> pts(n + 1, std::vector<double>(x0.begin(), x0.end()));
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step[i];
  std::vector<double> fx(n + 1);
  for (std::size_t i = 0; i <= n; ++i) fx[i] = eval(pts[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);

  SimplexResult result;
  int it = 0;
  for (;; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return fx[a] < fx[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[n - 1];

    if (std::fabs(fx[worst] - fx[best]) < options.f_spread_tol) {
      result.converged = true;
      break;
    }
    if (it >= options.max_iter) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[order[i]][j];
    }
    for (auto& c : centroid) c /= static_cast<double>(n);

    for (std::size_t j = 0; j < n; ++j) trial[j] = centroid[j] + kReflect * (centroid[j] - pts[worst][j]);
    const double f_reflect = eval(trial);

    if (f_reflect < fx[best]) {
      for (std::size_t j = 0; j < n; ++j) trial2[j] = centroid[j] + kExpand * (trial[j] - centroid[j]);
      const double f_expand = eval(trial2);
      if (f_expand < f_reflect) {
        pts[worst] = trial2;
        fx[worst] = f_expand;
      } else {
        pts[worst] = trial;
        fx[worst] = f_reflect;
      }
      continue;
    }
    if (f_reflect < fx[second]) {
      pts[worst] = trial;
      fx[worst] = f_reflect;
      continue;
    }

    const bool outside = f_reflect < fx[worst];
    for (std::size_t j = 0; j < n; ++j) {
      trial2[j] = outside ? centroid[j] + kContract * (trial[j] - centroid[j])
                          : centroid[j] + kContract * (pts[worst][j] - centroid[j]);
    }
    const double f_contract = eval(trial2);
    if (f_contract < (outside ? f_reflect : fx[worst])) {
      pts[worst] = trial2;
      fx[worst] = f_contract;
      continue;
    }

    for (std::size_t i = 1; i <= n; ++i) {
      auto& p = pts[order[i]];
      for (std::size_t j = 0; j < n; ++j) p[j] = pts[best][j] + kShrink * (p[j] - pts[best][j]);
      fx[order[i]] = eval(p);
    }
  }

  const auto best = static_cast<std::size_t>(std::min_element(fx.begin(), fx.end()) - fx.begin());
  result.x = pts[best];
  result.f = fx[best];
  result.iterations = it;
  return result;
}

}  // namespace sroc
