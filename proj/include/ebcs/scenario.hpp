#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace ebcs {

using Rng = std::mt19937_64;

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

double distance(Point a, Point b);

// Thrown when a configuration violates a documented invariant. The message
// starts with the dotted path of the offending field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class PlacementScheme {
    // eBCS AP at the region centre; AP #1 at exactly B, the others at a
    // uniform distance in (0, B]; all at uniform random bearings.
    kCenterFarthestAtB,
};

struct ScenarioConfig {
    double region_side_m = 300.0;
    std::size_t num_bss = 2;
    std::size_t total_stas = 100;
    std::vector<std::size_t> stas_per_bss = {50, 50};
    double distance_b_m = 40.0;
    // Per-axis standard deviation of the STA scatter around its AP.
    double bss_radius_m = 10.0;
    std::size_t frames_per_step = 5;
    std::uint64_t seed = 1;
    PlacementScheme placement_scheme = PlacementScheme::kCenterFarthestAtB;

    void validate() const;
};

// Splits `total` STAs over `num_bss` BSSs as evenly as possible, earlier
// BSSs taking the remainder.
std::vector<std::size_t> even_split(std::size_t total, std::size_t num_bss);

struct Station {
    Point position;
    std::size_t bss = 1;  // 1-based BSS index, i.e. the BSSID an overhearer reads

    friend bool operator==(const Station&, const Station&) = default;
};

struct Deployment {
    double region_side_m = 300.0;
    Point ebcs_ap;
    std::vector<Point> ap_positions;  // non-eBCS APs, BSS i at index i-1
    std::vector<Station> stations;

    std::size_t num_bss() const { return ap_positions.size(); }
    std::size_t num_stas() const { return stations.size(); }
    bool contains(Point p) const;

    friend bool operator==(const Deployment&, const Deployment&) = default;
};

Deployment generate_deployment(const ScenarioConfig& config, Rng& rng);

// Distance from the eBCS AP to the farthest non-eBCS AP.
double distance_b(const Deployment& deployment);

// m distinct STA indices drawn uniformly without replacement from [0, n).
std::vector<std::size_t> sample_uplink_stas(std::size_t n, std::size_t m, Rng& rng);

inline std::vector<std::size_t> sample_uplink_stas(const Deployment& deployment, std::size_t m, Rng& rng) {
    return sample_uplink_stas(deployment.num_stas(), m, rng);
}

// Text persistence. One block per deployment:
//
//   deployment <label> <region_side_m>
//   ebcs_ap <x> <y>
//   ap <bss> <x> <y>          (one line per non-eBCS AP, bss = 1..I)
//   sta <bss> <x> <y>         (one line per STA)
//   end
//
// preceded by the header line "ebcs-deployments 1". Coordinates are metres,
// written in shortest round-trip form so a reload is bit-identical.
struct LabeledDeployment {
    std::string label;
    Deployment deployment;
};

void write_deployments(std::ostream& out, const std::vector<LabeledDeployment>& deployments);
std::vector<LabeledDeployment> read_deployments(std::istream& in);

std::string format_double(double value);

}  // namespace ebcs
