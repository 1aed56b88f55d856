#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "knotlab/diagram.hpp"
#include "knotlab/rng.hpp"

namespace knotlab {

using Vec3 = std::array<double, 3>;

struct Polygon3D {
    std::vector<std::vector<Vec3>> components;
};

struct NonGenericProjection : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr double kGenericTolerance = 1e-9;

void require_valid(const Polygon3D& p);

// Over/under by height along dir; the plane frame (u, v) satisfies u x v = dir.
DiagramCode project(const Polygon3D& p, const Vec3& dir);

// Same, with an explicit in-plane frame and height axis. Handing in a frame
// that is not right-handed reflects the picture.
DiagramCode project_with_frame(const Polygon3D& p, const Vec3& u, const Vec3& v, const Vec3& height);

DiagramCode project_generic(const Polygon3D& p, RandomStream& rng, int max_attempts = 100);

Vec3 random_direction(RandomStream& rng);

nlohmann::json to_json(const Polygon3D& p);
Polygon3D polygon_from_json(const nlohmann::json& j);

}  // namespace knotlab
