#pragma once

#include <string>
#include <vector>

#include "navsim/types.hpp"
#include "navsim/world.hpp"

namespace navsim {

// Radial boundary profile of a star-shaped obstacle: every radial graph is
// star-shaped about its center by construction. The parameter is the polar
// angle in 2-D; in 3-D the profile is axisymmetric in the angle from +z.
struct RadialProfile {
    enum class Kind { disk, cosine_lobes, spline };
    Kind kind = Kind::disk;
    double base_radius = 1.0;
    // cosine_lobes: rho(a) = base * (1 + amplitude cos(lobes a + phase))
    double amplitude = 0.0;
    int lobes = 0;
    double phase = 0.0;
    // spline: periodic cubic through radii at uniform angles over [0, 2pi)
    std::vector<double> control_radii;

    static RadialProfile make_disk(double radius);
    static RadialProfile make_star_polygon(double base, double amplitude, int lobes,
                                           double phase = 0.0);
    static RadialProfile make_spline(std::vector<double> radii);

    double rho(double angle) const;
    double drho(double angle) const;
    double rho_min() const;
    double rho_max() const;

private:
    // Knot second derivatives, computed on first use.
    mutable std::vector<double> spline_m_;
    void ensure_spline() const;
};

struct StarObstacle {
    Vec center;
    RadialProfile profile;
    double influence_margin = 0.5;  // width of the blend shell outside the boundary
    double target_radius = 0.5;     // sphere radius this obstacle maps onto
};

// Diffeomorphism from a star world onto a sphere world with the same centers:
// inside each obstacle's blend shell the point is radially re-indexed onto the
// target sphere's offset, elsewhere the map is the identity (exact branch).
class StarMap {
public:
    StarMap(double workspace_radius, std::vector<StarObstacle> obstacles);

    int dim() const { return dim_; }
    double workspace_radius() const { return r_w_; }
    const std::vector<StarObstacle>& obstacles() const { return obstacles_; }

    // Point-robot sphere world the map targets (centers p_j, radii target_radius).
    World target_world() const;

    bool in_free_space(const Vec& x) const;
    // Radial gap to the nearest star boundary / workspace boundary (length).
    double clearance(const Vec& x) const;

    Vec map(const Vec& x) const;
    Mat jacobian(const Vec& x) const;
    void map_with_jacobian(const Vec& x, Vec& h, Mat& jac) const;

private:
    double r_w_;
    int dim_ = 2;
    std::vector<StarObstacle> obstacles_;
};

struct StarMapReport {
    bool ok = false;
    double min_abs_det = 0.0;
    double max_boundary_residual = 0.0;
    bool shells_disjoint = false;
    bool shells_inside_workspace = false;
    std::vector<std::string> failures;
};

// Grid validation: |det J| bounded away from zero over the free space,
// obstacle boundaries land on their target spheres, blend shells disjoint and
// inside the workspace.
StarMapReport validate_map(const StarMap& map, int grid_resolution);

}  // namespace navsim
