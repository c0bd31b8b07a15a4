#pragma once

#include <span>
#include <vector>

#include "massimo/common.hpp"
#include "massimo/ingest.hpp"
#include "massimo/linefit.hpp"

namespace massimo {

struct SpringParams {
  double k = 1.0;  ///< spring constant, force per pixel

  void validate() const;
};

/// Geometry of the link between two adjacent people relative to the queue
/// direction. `delta_d = d (1 - cos theta)`: the projection d cos theta is
/// taken as the spring's natural length, so links parallel to the queue
/// direction carry no force whatever their length.
struct LinkGeometry {
  double d = 0.0;
  double theta = 0.0;  ///< [0, pi]
  double delta_d = 0.0;
};

struct SpringLink {
  std::size_t i = 0;  ///< index of the first person in the ordered queue
  double d = 0.0;
  double theta = 0.0;
  double delta_d = 0.0;
  double f_parallel = 0.0;  ///< k delta_d cos theta
  double f_perp = 0.0;      ///< k delta_d sin theta
  double magnitude = 0.0;   ///< k delta_d
};

struct ForceVector {
  double fx = 0.0;
  double fy = 0.0;
};

struct ForceField {
  double k = 1.0;
  std::vector<int> person_ids;  ///< queue order
  std::vector<SpringLink> links;
  std::vector<ForceVector> net;  ///< image frame
  std::vector<double> net_magnitude;
};

LinkGeometry link_geometry(const QueuePoint& p, const QueuePoint& next, const DirectionVector& ev,
                           Warnings* warnings = nullptr);

SpringLink link_force(const LinkGeometry& geometry, const SpringParams& params, std::size_t i = 0);

/// Accumulates equal-and-opposite link forces along an ordered queue.
///
/// Each link contributes f_parallel along u = e_v/|e_v| plus f_perp along
/// n = (-u_y, u_x), signed + when the next person sits on the +n side of the
/// current one (for a left-to-right queue: lower in the image). The
/// contribution is added to person i and subtracted from person i+1.
ForceField chain_forces(std::span<const QueuePoint> points, const DirectionVector& ev,
                        const SpringParams& params, Warnings* warnings = nullptr);

std::vector<double> per_link_magnitudes(const ForceField& field);

}  // namespace massimo
