#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "knotlab/braid.hpp"
#include "knotlab/diagram.hpp"
#include "knotlab/geometry.hpp"
#include "knotlab/grid.hpp"
#include "knotlab/rng.hpp"

namespace knotlab {

enum class Family {
    PetalumaKnot,
    PetalumaLink,
    GridKnot,
    Griddle,
    JumpPolygon,
    GaussianPolygon,
    FourierLoop,
    BraidWalk,
    FlatTorus,
    Star,
    Billiard,
};

enum class JumpDomain { Cube, Ball, Sphere, Gaussian };

struct FourierScheme {
    enum Kind { SharpCutoff, Exp, Gauss, Power } kind = SharpCutoff;
    double alpha = 1.0;  // Power only
};

// Raised for malformed model descriptions; `field` names the offending key.
struct SpecError : std::invalid_argument {
    SpecError(const std::string& field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field(field) {}
    std::string field;
};

// {"family": "petaluma", "params": {"petals": 41}, "options": {}}
struct ModelSpec {
    Family family = Family::PetalumaKnot;
    nlohmann::json params = nlohmann::json::object();
    nlohmann::json options = nlohmann::json::object();

    // Size used to normalize invariants (petaluma n = (petals-1)/2, grid n, star n, ...).
    int scale() const;
    bool yields_knots() const;
    // Fewest components any sample can have.
    int min_components() const;
};

std::string family_name(Family f);
Family family_from_name(const std::string& name);

// Parses and checks every parameter; throws SpecError.
ModelSpec parse_model_spec(const nlohmann::json& j);
nlohmann::json to_json(const ModelSpec& s);
void require_valid(const ModelSpec& s);

PetalPermutation sample_petaluma(int petals, RandomStream& rng);

// Each component is a bundle of parallel strands through the single
// multi-crossing; strand heights are one uniform permutation of all strands.
DiagramCode petaluma_link_diagram(const std::vector<int>& petals_per_component, const std::vector<int>& heights);
DiagramCode sample_petaluma_link(const std::vector<int>& petals_per_component, RandomStream& rng);

GridDiagram sample_grid(int n, RandomStream& rng);

// coins[i] = +1 keeps the vertical strand over at crossing i, -1 switches it.
DiagramCode switch_crossings(const DiagramCode& d, const std::vector<int>& coins);
DiagramCode sample_griddle(int n, RandomStream& rng);

Polygon3D sample_jump(const std::vector<int>& vertex_counts, JumpDomain domain, RandomStream& rng);
Polygon3D sample_gaussian_polygon(int n, RandomStream& rng);

// Number of Fourier modes kept: n for the sharp cutoff, otherwise the
// smallest K whose neglected amplitude sum w_k/k drops below 1e-6 (at most 10^4).
int fourier_modes(int n, const FourierScheme& scheme);
Polygon3D sample_fourier_loop(int n, const FourierScheme& scheme, int points, RandomStream& rng);

BraidWord sample_braid_walk(int strands, int length, Closure closure, RandomStream& rng);

struct CrisscrossBase {
    enum Kind { Star, FlatTorus, Billiard } kind = Star;
    int p = 2;  // Star: n; FlatTorus: p; Billiard: b
    int q = 1;  // FlatTorus: q; Billiard: a
};

// Base braid word with every exponent replaced by a fair coin.
BraidWord sample_crisscross_word(const CrisscrossBase& base, RandomStream& rng);
DiagramCode sample_crisscross(const CrisscrossBase& base, RandomStream& rng);

// One draw in the model's natural raw form.
using RawSample = std::variant<PetalPermutation, GridDiagram, BraidWord, Polygon3D, DiagramCode>;

RawSample draw_raw(const ModelSpec& spec, RandomStream& rng);
// Converts a raw draw to a diagram; polygons are projected along random directions drawn from rng.
DiagramCode to_diagram(const ModelSpec& spec, const RawSample& raw, RandomStream& rng);
DiagramCode draw_diagram(const ModelSpec& spec, RandomStream& rng);

nlohmann::json raw_to_json(const RawSample& raw);

// Braid word whose trace closure is the sampled diagram, when the model has one.
bool has_braid_form(Family f);
BraidWord to_braid(const ModelSpec& spec, const RawSample& raw);

}  // namespace knotlab
