#include "prefd/refinement.hpp"

#include "prefd/basis.hpp"

#include <stdexcept>

namespace prefd {

namespace {

void validate_spec(const RadialZoneSpec& spec) {
  if (spec.center.size() < 1) throw std::invalid_argument("RadialZoneSpec: empty center");
  if (spec.default_order < 0) throw std::invalid_argument("RadialZoneSpec: negative default order");
  double prev = -1.0;
  for (const RadialZone& zone : spec.zones) {
    if (zone.radius < 0.0) throw std::invalid_argument("RadialZoneSpec: negative zone radius");
    if (zone.radius <= prev) throw std::invalid_argument("RadialZoneSpec: zone radii must strictly increase");
    if (zone.order <= 0) throw std::invalid_argument("RadialZoneSpec: zone orders must be positive");
    prev = zone.radius;
  }
}

}  // namespace

int stencil_size_for_order(int m, int dim) {
  return static_cast<int>(2 * monomial_count(m, dim));
}

RadialZoneSpec preset(std::string_view name, int dim) {
  RadialZoneSpec spec;
  spec.center = Vector::Constant(dim, 0.5);
  spec.name = std::string(name);
  if (name == "uniform-2" || name == "uniform-4" || name == "uniform-6") {
    spec.default_order = name.back() - '0';
    return spec;
  }
  if (name == "c1") {
    spec.zones = {{0.0, 6}, {1.0 / 10.0, 4}};
  } else if (name == "c2") {
    spec.zones = {{1.0 / 10.0, 6}, {1.0 / 5.0, 4}};
  } else if (name == "c3") {
    spec.zones = {{1.0 / 5.0, 6}, {2.0 / 5.0, 4}};
  } else {
    throw std::invalid_argument("preset: unknown name '" + std::string(name) + "'");
  }
  spec.default_order = 2;
  return spec;
}

OrderField assign_orders(const NodeSet& nodes, const RadialZoneSpec& spec) {
  validate_spec(spec);
  if (spec.center.size() != nodes.dimension()) {
    throw std::invalid_argument("assign_orders: dimension mismatch");
  }
  const int dim = nodes.dimension();
  OrderField field;
  field.m.resize(static_cast<std::size_t>(nodes.size()));
  field.n.resize(static_cast<std::size_t>(nodes.size()));
  for (Eigen::Index i = 0; i < nodes.size(); ++i) {
    const double dist = (nodes.positions.row(i).transpose() - spec.center).norm();
    int order = spec.default_order;
    for (const RadialZone& zone : spec.zones) {  // innermost wins; inclusive at the radius
      if (dist <= zone.radius) {
        order = zone.order;
        break;
      }
    }
    field.m[static_cast<std::size_t>(i)] = order;
    field.n[static_cast<std::size_t>(i)] = stencil_size_for_order(order, dim);
  }
  return field;
}

std::map<int, double> zone_census(const OrderField& orders) {
  if (orders.m.empty()) throw std::invalid_argument("zone_census: empty order field");
  std::map<int, double> fractions;
  for (const int m : orders.m) fractions[m] += 1.0;
  for (auto& [order, count] : fractions) count /= static_cast<double>(orders.m.size());
  return fractions;
}

}  // namespace prefd
