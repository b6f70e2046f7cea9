#pragma once

#include <Eigen/Dense>

namespace navsim {

// Positions, velocities and forces live in R^2 or R^3. A dynamic vector with
// compile-time max size 3 keeps them heap-free while the dimension stays a
// runtime value.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

inline Vec vec2(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

inline Vec vec3(double x, double y, double z) {
    Vec v(3);
    v << x, y, z;
    return v;
}

}  // namespace navsim
