#pragma once

#include <vector>

#include "permchan/channel.hpp"

namespace permchan {

// Squared distance from `point` to the convex hull of `generators`, computed
// by nonnegative least squares on the augmented system [G^T; 1^T] w = [p; 1].
double distance_to_hull_sq(const std::vector<std::vector<double>>& generators,
                           const std::vector<double>& point);

bool in_convex_hull(const std::vector<std::vector<double>>& generators,
                    const std::vector<double>& point, double tol = 1e-9);

// Number of extreme points of the convex hull of the channel rows: a row is
// extreme iff it is not in the hull of the remaining rows.
int extreme_point_count(const ChannelModel& ch, double tol = 1e-9);

}  // namespace permchan
