#include "ebcs/scenario.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

namespace ebcs {

namespace {

constexpr int kMaxResampleAttempts = 1'000'000;

Point polar_offset(Point origin, double radius, double bearing) {
    return {origin.x + radius * std::cos(bearing), origin.y + radius * std::sin(bearing)};
}

}  // namespace

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::vector<std::size_t> even_split(std::size_t total, std::size_t num_bss) {
    std::vector<std::size_t> counts(num_bss, num_bss == 0 ? 0 : total / num_bss);
    for (std::size_t i = 0; i < num_bss && i < total % num_bss; ++i) ++counts[i];
    return counts;
}

void ScenarioConfig::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    if (!(region_side_m > 0) || !std::isfinite(region_side_m)) fail("scenario.region_side_m: must be positive");
    if (num_bss == 0) fail("scenario.num_bss: at least one non-eBCS AP is required");
    if (stas_per_bss.size() != num_bss)
        fail("scenario.stas_per_bss: expected " + std::to_string(num_bss) + " entries, got " +
             std::to_string(stas_per_bss.size()));
    if (std::accumulate(stas_per_bss.begin(), stas_per_bss.end(), std::size_t{0}) != total_stas)
        fail("scenario.stas_per_bss: entries must sum to total_stas (" + std::to_string(total_stas) + ")");
    if (total_stas == 0) fail("scenario.total_stas: must be positive");
    if (frames_per_step == 0) fail("scenario.frames_per_step: must be positive");
    if (frames_per_step > total_stas)
        fail("scenario.frames_per_step: " + std::to_string(frames_per_step) + " exceeds total_stas " +
             std::to_string(total_stas));
    if (!(distance_b_m >= 0) || distance_b_m > region_side_m / 2)
        fail("scenario.distance_b_m: must lie in [0, region_side_m / 2]");
    if (!(bss_radius_m >= 0) || bss_radius_m > region_side_m / 2)
        fail("scenario.bss_radius_m: must lie in [0, region_side_m / 2]");
}

bool Deployment::contains(Point p) const {
    return p.x >= 0 && p.x <= region_side_m && p.y >= 0 && p.y <= region_side_m;
}

Deployment generate_deployment(const ScenarioConfig& config, Rng& rng) {
    config.validate();

    Deployment dep;
    dep.region_side_m = config.region_side_m;
    dep.ebcs_ap = {config.region_side_m / 2, config.region_side_m / 2};

    std::uniform_real_distribution<double> bearing(0.0, 2.0 * std::numbers::pi);
    dep.ap_positions.reserve(config.num_bss);
    dep.ap_positions.push_back(polar_offset(dep.ebcs_ap, config.distance_b_m, bearing(rng)));
    for (std::size_t i = 1; i < config.num_bss; ++i) {
        const double theta = bearing(rng);
        // (0, B]: flip the half-open [0, B) draw.
        const double r = config.distance_b_m - std::uniform_real_distribution<double>(0.0, config.distance_b_m)(rng);
        dep.ap_positions.push_back(polar_offset(dep.ebcs_ap, r, theta));
    }

    std::normal_distribution<double> scatter(0.0, 1.0);
    dep.stations.reserve(config.total_stas);
    for (std::size_t i = 0; i < config.num_bss; ++i) {
        const Point parent = dep.ap_positions[i];
        for (std::size_t k = 0; k < config.stas_per_bss[i]; ++k) {
            Point p;
            int attempts = 0;
            do {
                if (++attempts > kMaxResampleAttempts)
                    throw ConfigError("scenario.bss_radius_m: STA placement does not fit inside the region");
                const double gx = scatter(rng);
                const double gy = scatter(rng);
                p = {parent.x + config.bss_radius_m * gx, parent.y + config.bss_radius_m * gy};
            } while (!dep.contains(p));
            dep.stations.push_back({p, i + 1});
        }
    }
    return dep;
}

double distance_b(const Deployment& deployment) {
    if (deployment.ap_positions.empty()) throw std::domain_error("distance_b: no non-eBCS AP in deployment");
    double farthest = 0.0;
    for (const Point& ap : deployment.ap_positions) farthest = std::max(farthest, distance(deployment.ebcs_ap, ap));
    return farthest;
}

std::vector<std::size_t> sample_uplink_stas(std::size_t n, std::size_t m, Rng& rng) {
    if (m > n) throw std::domain_error("sample_uplink_stas: m exceeds the number of STAs");
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    // Partial Fisher-Yates: the first m slots end up a uniform m-subset.
    for (std::size_t j = 0; j < m; ++j) {
        std::uniform_int_distribution<std::size_t> pick(j, n - 1);
        std::swap(pool[j], pool[pick(rng)]);
    }
    pool.resize(m);
    return pool;
}

std::string format_double(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, end);
}

void write_deployments(std::ostream& out, const std::vector<LabeledDeployment>& deployments) {
    out << "ebcs-deployments 1\n";
    for (const auto& [label, dep] : deployments) {
        out << "deployment " << label << ' ' << format_double(dep.region_side_m) << '\n';
        out << "ebcs_ap " << format_double(dep.ebcs_ap.x) << ' ' << format_double(dep.ebcs_ap.y) << '\n';
        for (std::size_t i = 0; i < dep.ap_positions.size(); ++i)
            out << "ap " << i + 1 << ' ' << format_double(dep.ap_positions[i].x) << ' '
                << format_double(dep.ap_positions[i].y) << '\n';
        for (const Station& s : dep.stations)
            out << "sta " << s.bss << ' ' << format_double(s.position.x) << ' ' << format_double(s.position.y)
                << '\n';
        out << "end\n";
    }
}

namespace {

double parse_double(const std::string& token, std::size_t line_no) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size())
        throw std::runtime_error("deployments:" + std::to_string(line_no) + ": bad number '" + token + "'");
    return value;
}

}  // namespace

std::vector<LabeledDeployment> read_deployments(std::istream& in) {
    std::vector<LabeledDeployment> result;
    std::string line;
    std::size_t line_no = 0;
    auto error = [&](const std::string& msg) {
        return std::runtime_error("deployments:" + std::to_string(line_no) + ": " + msg);
    };

    if (!std::getline(in, line) || line != "ebcs-deployments 1") throw error("missing 'ebcs-deployments 1' header");
    ++line_no;

    LabeledDeployment* current = nullptr;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        std::istringstream fields(line);
        std::string tag;
        fields >> tag;
        std::vector<std::string> args;
        for (std::string tok; fields >> tok;) args.push_back(tok);

        if (tag == "deployment") {
            if (current) throw error("nested deployment block");
            if (args.size() != 2) throw error("expected 'deployment <label> <region_side_m>'");
            result.push_back({args[0], {}});
            current = &result.back();
            current->deployment.region_side_m = parse_double(args[1], line_no);
            continue;
        }
        if (!current) throw error("'" + tag + "' outside a deployment block");
        Deployment& dep = current->deployment;
        if (tag == "end") {
            for (const Station& s : dep.stations)
                if (s.bss == 0 || s.bss > dep.num_bss()) throw error("sta references unknown bss");
            current = nullptr;
        } else if (tag == "ebcs_ap" && args.size() == 2) {
            dep.ebcs_ap = {parse_double(args[0], line_no), parse_double(args[1], line_no)};
        } else if ((tag == "ap" || tag == "sta") && args.size() == 3) {
            const auto bss = static_cast<std::size_t>(parse_double(args[0], line_no));
            const Point p{parse_double(args[1], line_no), parse_double(args[2], line_no)};
            if (tag == "ap") {
                if (bss != dep.ap_positions.size() + 1) throw error("ap lines must be numbered 1..I in order");
                dep.ap_positions.push_back(p);
            } else {
                dep.stations.push_back({p, bss});
            }
        } else {
            throw error("unrecognised line '" + line + "'");
        }
    }
    if (current) throw error("unterminated deployment block");
    return result;
}

}  // namespace ebcs
