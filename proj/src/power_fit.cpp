#include "bwlab/power_fit.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace bwlab {

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_power_law: size mismatch");
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0.0) || y[k] == 0.0 || !std::isfinite(y[k])) continue;
    lx.push_back(std::log(x[k]));
    ly.push_back(std::log(std::abs(y[k])));
  }
  const std::size_t n = lx.size();
  if (n < 2) throw std::invalid_argument("fit_power_law: need at least two usable points");

  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    mx += lx[k];
    my += ly[k];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
    syy += (ly[k] - my) * (ly[k] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_power_law: x values are all equal");

  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  fit.log_prefactor = my - fit.exponent * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.points = static_cast<int>(n);
  return fit;
}

}  // namespace bwlab
