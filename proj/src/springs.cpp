#include "massimo/springs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace massimo {

void SpringParams::validate() const
{
  if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("spring constant k must be > 0");
}

LinkGeometry link_geometry(const QueuePoint& p, const QueuePoint& next, const DirectionVector& ev,
                           Warnings* warnings)
{
  const double ev_norm = ev.norm();
  if (!(ev_norm > 0.0)) throw DegenerateGeometryError("queue direction vector has zero length");

  const double sx = next.x - p.x;
  const double sy = next.y - p.y;
  const double d = std::hypot(sx, sy);
  if (d == 0.0) {
    warn(warnings, "persons " + std::to_string(p.person_id) + " and " +
                       std::to_string(next.person_id) + " coincide, link carries no force");
    return {};
  }
  const double cos_theta = std::clamp((sx * ev.dx + sy * ev.dy) / (d * ev_norm), -1.0, 1.0);
  return {d, std::acos(cos_theta), d * (1.0 - cos_theta)};
}

SpringLink link_force(const LinkGeometry& g, const SpringParams& params, std::size_t i)
{
  const double magnitude = params.k * g.delta_d;
  return {i, g.d, g.theta, g.delta_d, magnitude * std::cos(g.theta), magnitude * std::sin(g.theta),
          magnitude};
}

ForceField chain_forces(std::span<const QueuePoint> points, const DirectionVector& ev,
                        const SpringParams& params, Warnings* warnings)
{
  params.validate();
  const std::size_t n = points.size();

  ForceField field;
  field.k = params.k;
  field.person_ids.reserve(n);
  for (const auto& p : points) field.person_ids.push_back(p.person_id);
  field.net.assign(n, ForceVector{});
  field.net_magnitude.assign(n, 0.0);
  if (n < 2) return field;

  const Point2 u = ev.unit();
  const Point2 normal{-u.y, u.x};

  field.links.reserve(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const QueuePoint& a = points[i];
    const QueuePoint& b = points[i + 1];
    const SpringLink link = link_force(link_geometry(a, b, ev, warnings), params, i);
    field.links.push_back(link);

    const double side = (b.x - a.x) * normal.x + (b.y - a.y) * normal.y;
    const double perp = side > 0.0 ? link.f_perp : -link.f_perp;
    const double fx = link.f_parallel * u.x + perp * normal.x;
    const double fy = link.f_parallel * u.y + perp * normal.y;
    field.net[i].fx += fx;
    field.net[i].fy += fy;
    field.net[i + 1].fx -= fx;
    field.net[i + 1].fy -= fy;
  }
  for (std::size_t i = 0; i < n; ++i) field.net_magnitude[i] = std::hypot(field.net[i].fx, field.net[i].fy);
  return field;
}

std::vector<double> per_link_magnitudes(const ForceField& field)
{
  std::vector<double> out;
  out.reserve(field.links.size());
  for (const auto& l : field.links) out.push_back(l.magnitude);
  return out;
}

}  // namespace massimo
