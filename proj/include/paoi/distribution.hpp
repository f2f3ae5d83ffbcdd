#pragma once

#include <functional>
#include <vector>

namespace paoi {

struct PointMass {
    double location;
    double mass;
};

/// A distribution given by a continuous density plus optional point masses.
/// Needed because the M/D/1 waiting time has an atom at zero; the PAoI
/// mixtures are purely continuous and carry an empty atom list.
struct MixedDistribution {
    std::function<double(double)> density; // must return 0 below support_lower
    std::vector<PointMass> atoms;
    double support_lower = 0.0;
};

} // namespace paoi
