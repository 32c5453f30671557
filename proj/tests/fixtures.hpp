#pragma once

// Random inputs shared by the unit and acceptance tests.

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "sphint/spherical.hpp"

namespace fixtures {

/// Bulk of 1..max_bulk atoms in [-3, 3] with multiplicities 1..50, plus
/// up to max_outliers simple outliers split between both sides.
inline sphint::DiscreteModel random_model(std::mt19937_64& rng, int max_bulk = 6, int max_outliers = 3,
                                          int min_top = 0) {
  std::uniform_int_distribution<int> nb(1, max_bulk), no(min_top, max_outliers), mult(1, 50);
  std::uniform_real_distribution<double> pos(-3.0, 3.0), gap(0.05, 2.0);
  const int p = nb(rng);
  const int outliers = no(rng);
  const int top = std::max(min_top, std::uniform_int_distribution<int>(0, outliers)(rng));
  const int bottom = std::max(0, outliers - top);
  std::set<double> bulk;
  while (static_cast<int>(bulk.size()) < p) bulk.insert(pos(rng));
  std::vector<double> etas;
  std::vector<std::int64_t> m;
  double x = *bulk.begin();
  std::vector<double> low;
  for (int i = 0; i < bottom; ++i) low.push_back(x -= gap(rng));
  std::reverse(low.begin(), low.end());
  for (double v : low) {
    etas.push_back(v);
    m.push_back(1);
  }
  for (double v : bulk) {
    etas.push_back(v);
    m.push_back(mult(rng));
  }
  x = *bulk.rbegin();
  for (int i = 0; i < top; ++i) {
    etas.push_back(x += gap(rng));
    m.push_back(1);
  }
  return sphint::DiscreteModel::make(etas, m, static_cast<std::size_t>(bottom),
                                     static_cast<std::size_t>(bottom + p - 1));
}

}  // namespace fixtures
