#pragma once

#include <Eigen/Core>

namespace prefd {

using Vector = Eigen::VectorXd;

}  // namespace prefd
