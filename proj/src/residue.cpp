#include "bwlab/residue.hpp"

#include "bwlab/errors.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace bwlab {

namespace {

constexpr std::size_t kMaxFactors = 32;

struct PoleGroup {
  double location;
  bool upper;
  int multiplicity;
};

double min_separation(const std::array<PoleGroup, kMaxFactors>& g, std::size_t count, bool upper) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < count; ++a) {
    if (g[a].upper != upper) continue;
    for (std::size_t b = a + 1; b < count; ++b) {
      if (g[b].upper != upper) continue;
      best = std::min(best, std::abs(g[a].location - g[b].location));
    }
  }
  return best;
}

// Coefficient of t^(m-1) in prod_{q != p} (p - q + t)^(-m_q), i.e. the
// residue of prod_q (eps - q)^(-m_q) at the pole p of multiplicity m.
double residue_at(const std::array<PoleGroup, kMaxFactors>& g, std::size_t count, std::size_t p) {
  const int m = g[p].multiplicity;
  std::array<double, kMaxFactors> c{};
  std::array<double, kMaxFactors> s{};
  std::array<double, kMaxFactors> tmp{};
  c[0] = 1.0;
  for (std::size_t q = 0; q < count; ++q) {
    if (q == p) continue;
    const double d = g[p].location - g[q].location;
    const int mq = g[q].multiplicity;
    s[0] = std::pow(d, -mq);
    for (int k = 1; k < m; ++k) s[k] = s[k - 1] * (-static_cast<double>(mq + k - 1) / (k * d));
    for (int k = 0; k < m; ++k) {
      double acc = 0.0;
      for (int r = 0; r <= k; ++r) acc += c[r] * s[k - r];
      tmp[k] = acc;
    }
    for (int k = 0; k < m; ++k) c[k] = tmp[k];
  }
  return c[m - 1];
}

}  // namespace

double contour_value(double E, std::span<const PropagatorFactor> factors) {
  if (factors.size() < 2) throw std::invalid_argument("contour_value: need at least two factors");
  if (factors.size() > kMaxFactors) throw std::invalid_argument("contour_value: too many factors");

  std::array<PoleGroup, kMaxFactors> groups{};
  std::size_t count = 0;
  double coefficient = 1.0;
  const double half = 0.5 * E;

  for (const PropagatorFactor& f : factors) {
    double loc = 0.0;
    bool upper = false;
    if (f.particle == 1) {
      loc = f.energy - half;
      upper = f.energy < 0.0;
    } else if (f.particle == 2) {
      // 1/(E/2 - eps - e) = -1/(eps - (E/2 - e))
      loc = half - f.energy;
      upper = f.energy > 0.0;
      coefficient = -coefficient;
    } else {
      throw std::invalid_argument("contour_value: particle must be 1 or 2");
    }
    bool merged = false;
    for (std::size_t k = 0; k < count; ++k) {
      if (std::abs(groups[k].location - loc) <= kPoleMergeTolerance * (1.0 + std::abs(loc))) {
        if (groups[k].upper != upper) {
          std::ostringstream os;
          os << "degenerate denominator: propagator poles pinch the contour at eps = " << loc
             << " (E = " << E << ")";
          throw DegenerateError(os.str());
        }
        ++groups[k].multiplicity;
        merged = true;
        break;
      }
    }
    if (!merged) groups[count++] = PoleGroup{loc, upper, 1};
  }

  std::size_t n_upper = 0;
  for (std::size_t k = 0; k < count; ++k) n_upper += groups[k].upper ? 1 : 0;
  const std::size_t n_lower = count - n_upper;
  if (n_upper == 0 || n_lower == 0) return 0.0;

  // Sum residues on the side whose poles are best separated; ties go to the
  // side with fewer poles.
  const double sep_upper = min_separation(groups, count, true);
  const double sep_lower = min_separation(groups, count, false);
  bool close_upper;
  if (sep_upper != sep_lower) {
    close_upper = sep_upper > sep_lower;
  } else {
    close_upper = n_upper <= n_lower;
  }

  double sum = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    if (groups[k].upper == close_upper) sum += residue_at(groups, count, k);
  }
  // i/(2 pi) * (+-2 pi i) = -+1: counterclockwise (upper) gives -sum.
  return coefficient * (close_upper ? -sum : sum);
}

}  // namespace bwlab
