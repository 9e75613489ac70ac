#pragma once

#include "prefd/geometry.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace prefd {

/// Per-node augmentation degree m and the stencil size n derived from it.
struct OrderField {
  std::vector<int> m;
  std::vector<int> n;

  Eigen::Index size() const { return static_cast<Eigen::Index>(m.size()); }
};

/// Stencil size for augmentation degree m in `dim` dimensions: 2*C(m+d, d).
int stencil_size_for_order(int m, int dim);

struct RadialZone {
  double radius = 0.0;
  int order = 0;
};

/// Piecewise-constant order field around a center point: a node takes the
/// order of the innermost zone whose radius covers it (inclusive at the
/// radius), and default_order beyond the last zone.
struct RadialZoneSpec {
  Vector center;
  std::vector<RadialZone> zones;  // strictly increasing radii
  int default_order = 2;
  std::string name = "custom";
};

/// Named order layouts: c1, c2, c3 concentrate degree 6 and 4 zones of
/// increasing size around (1/2, ..., 1/2); uniform-2/4/6 use one degree
/// everywhere.
RadialZoneSpec preset(std::string_view name, int dim = 2);

OrderField assign_orders(const NodeSet& nodes, const RadialZoneSpec& spec);

/// Fraction of nodes per order; fractions sum to 1.
std::map<int, double> zone_census(const OrderField& orders);

}  // namespace prefd
