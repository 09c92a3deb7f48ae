#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "camforge/error.hpp"
#include "camforge/tessellate.hpp"
#include "common.hpp"

namespace camforge {

using namespace detail;

std::vector<ParamSpec> hotwire_schema() {
    ParamSpec directions;
    directions.name = "directions";
    directions.type = ParamType::Enum;
    directions.default_value = std::string("x_and_y");
    directions.choices = {"x_only", "x_and_y"};
    directions.description = "Cut one profile along x, or two perpendicular profiles";
    ParamSpec floor;
    floor.name = "fidelity_floor";
    floor.type = ParamType::Ratio;
    floor.default_value = 0.6;
    floor.min = 0.0;
    floor.max = 1.0;
    floor.description = "Warn when the cut shape keeps less of the model than this";
    return {
        directions,
        length_param("path_step", 1, 0, 100, true, "Spacing of points along the cut path"),
        length_param("lead_in", 10, 0, 500, false, "Straight run from outside the block to the profile"),
        length_param("block_margin", 5, 0, 500, false, "Foam block size beyond the model bounds"),
        floor,
    };
}

namespace {

// Projection of a world point onto the profile plane of a cut.
Vec2 project(char axis, Vec3 p) { return axis == 'x' ? Vec2{p.y, p.z} : Vec2{p.x, p.z}; }

// Horizontal extent of a convex CCW polygon at height v, if it reaches that height.
std::optional<std::pair<double, double>> slice_convex(const Contour& hull, double v) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    const std::size_t n = hull.points.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = hull.points[i];
        const Vec2 b = hull.points[(i + 1) % n];
        if ((v < std::min(a.y, b.y)) || (v > std::max(a.y, b.y))) continue;
        if (a.y == b.y) {
            lo = std::min({lo, a.x, b.x});
            hi = std::max({hi, a.x, b.x});
        } else {
            const double u = a.x + (b.x - a.x) * (v - a.y) / (b.y - a.y);
            lo = std::min(lo, u);
            hi = std::max(hi, u);
        }
    }
    if (lo > hi) return std::nullopt;
    return std::make_pair(lo, hi);
}

const HotwireCut* cut_for(const HotwirePlan& plan, char axis) {
    for (const auto& c : plan.cuts) {
        if (c.axis == axis) return &c;
    }
    return nullptr;
}

// x and y extents of the approximation at height z.
std::optional<std::pair<std::pair<double, double>, std::pair<double, double>>> extents_at(const HotwirePlan& plan, double z) {
    const Aabb3& m = plan.mesh_bounds;
    if (z < m.min.z || z > m.max.z) return std::nullopt;
    std::pair<double, double> xr{m.min.x, m.max.x}, yr{m.min.y, m.max.y};
    if (const auto* cx = cut_for(plan, 'x')) {
        const auto s = slice_convex(cx->silhouette, z);
        if (!s) return std::nullopt;
        yr = {std::max(yr.first, s->first), std::min(yr.second, s->second)};
    }
    if (const auto* cy = cut_for(plan, 'y')) {
        const auto s = slice_convex(cy->silhouette, z);
        if (!s) return std::nullopt;
        xr = {std::max(xr.first, s->first), std::min(xr.second, s->second)};
    }
    if (xr.first > xr.second || yr.first > yr.second) return std::nullopt;
    return std::make_pair(xr, yr);
}

// Heights where an extent changes slope.
std::vector<double> breakpoints(const HotwirePlan& plan) {
    std::vector<double> zs{plan.mesh_bounds.min.z, plan.mesh_bounds.max.z};
    for (const auto& c : plan.cuts) {
        for (Vec2 p : c.silhouette.points) zs.push_back(std::clamp(p.y, plan.mesh_bounds.min.z, plan.mesh_bounds.max.z));
    }
    std::sort(zs.begin(), zs.end());
    zs.erase(std::unique(zs.begin(), zs.end(), [](double a, double b) { return b - a < 1e-12; }), zs.end());
    return zs;
}

// Cell centres carry a tiny irrational offset so they never sit exactly on axis-aligned faces.
double cell_centre(double lo, double size, int res, int i, double jitter) {
    return lo + size * (i + 0.5 + jitter) / res;
}

constexpr double kJitterX = 1.6180339887e-6;
constexpr double kJitterY = 2.2360679775e-6;
constexpr double kJitterZ = 1.4142135624e-6;

std::vector<Vec2> cut_path(const Contour& hull, const Aabb2& block, double step, double lead_in) {
    const Aabb2 hb = *contour_bounds(hull);
    // Sides in tie-break order: bottom, right, top, left.
    const double gaps[4] = {hb.min.y - block.min.y, block.max.x - hb.max.x, block.max.y - hb.max.y, hb.min.x - block.min.x};
    const int side = static_cast<int>(std::min_element(std::begin(gaps), std::end(gaps)) - std::begin(gaps));
    const Vec2 outward[4] = {{0, -1}, {1, 0}, {0, 1}, {-1, 0}};
    std::size_t entry = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < hull.points.size(); ++i) {
        const double reach = dot(hull.points[i], outward[side]);
        if (reach > best) {
            best = reach;
            entry = i;
        }
    }
    const Vec2 e = hull.points[entry];
    const Vec2 edge = side == 0 ? Vec2{e.x, block.min.y}
                    : side == 1 ? Vec2{block.max.x, e.y}
                    : side == 2 ? Vec2{e.x, block.max.y}
                                : Vec2{block.min.x, e.y};
    const Vec2 start = edge + outward[side] * lead_in;

    std::vector<Vec2> path{start, edge, e};
    const std::size_t n = hull.points.size();
    for (std::size_t k = 0; k < n; ++k) {
        const Vec2 a = hull.points[(entry + k) % n];
        const Vec2 b = hull.points[(entry + k + 1) % n];
        const auto pieces = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(distance(a, b) / step - 1e-9)));
        for (std::size_t s = 1; s <= pieces; ++s) path.push_back(a + (b - a) * (static_cast<double>(s) / pieces));
    }
    path.push_back(edge);
    path.push_back(start);
    path.erase(std::unique(path.begin(), path.end()), path.end());
    return path;
}

double path_length(const std::vector<Vec2>& path) {
    double len = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) len += distance(path[i - 1], path[i]);
    return len;
}

}  // namespace

bool inside_approximation(const HotwirePlan& plan, Vec3 p) {
    const auto ext = extents_at(plan, p.z);
    if (!ext) return false;
    return p.x >= ext->first.first && p.x <= ext->first.second && p.y >= ext->second.first && p.y <= ext->second.second;
}

double approximation_volume(const HotwirePlan& plan) {
    const auto zs = breakpoints(plan);
    auto area = [&](double z) {
        const auto e = extents_at(plan, z);
        return e ? (e->first.second - e->first.first) * (e->second.second - e->second.first) : 0.0;
    };
    // Extents are linear between breakpoints, so the area is quadratic and Simpson's rule is exact.
    double v = 0.0;
    for (std::size_t i = 0; i + 1 < zs.size(); ++i) {
        const double a = zs[i], b = zs[i + 1];
        v += (b - a) / 6.0 * (area(a) + 4.0 * area(0.5 * (a + b)) + area(b));
    }
    return v;
}

TriangleMesh approximation_mesh(const HotwirePlan& plan) {
    TriangleMesh m;
    m.name = "approximation";
    const auto zs = breakpoints(plan);
    std::vector<double> levels;
    for (double z : zs) {
        const auto e = extents_at(plan, z);
        if (!e) continue;
        levels.push_back(z);
        m.vertices.push_back({e->first.first, e->second.first, z});
        m.vertices.push_back({e->first.second, e->second.first, z});
        m.vertices.push_back({e->first.second, e->second.second, z});
        m.vertices.push_back({e->first.first, e->second.second, z});
    }
    if (levels.size() < 2) return m;
    const auto top = static_cast<std::uint32_t>(4 * (levels.size() - 1));
    m.triangles.push_back({0, 2, 1});
    m.triangles.push_back({0, 3, 2});
    m.triangles.push_back({top, top + 1, top + 2});
    m.triangles.push_back({top, top + 2, top + 3});
    for (std::uint32_t k = 0; k + 1 < levels.size(); ++k) {
        const std::uint32_t lo = 4 * k, hi = 4 * (k + 1);
        for (std::uint32_t s = 0; s < 4; ++s) {
            const std::uint32_t t = (s + 1) % 4;
            m.triangles.push_back({lo + s, lo + t, hi + t});
            m.triangles.push_back({lo + s, hi + t, hi + s});
        }
    }
    return m;
}

std::size_t voxel_count_mesh(const TriangleMesh& mesh, const Aabb3& box, int res) {
    const Vec3 size = box.extent();
    std::vector<std::vector<std::uint32_t>> columns(static_cast<std::size_t>(res) * res);
    auto column_of = [&](double v, double lo, double len) {
        return static_cast<int>(std::floor((v - lo) / len * res - 0.5));
    };
    for (std::uint32_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        double x0 = mesh.vertices[tri[0]].x, x1 = x0, y0 = mesh.vertices[tri[0]].y, y1 = y0;
        for (auto i : tri) {
            x0 = std::min(x0, mesh.vertices[i].x);
            x1 = std::max(x1, mesh.vertices[i].x);
            y0 = std::min(y0, mesh.vertices[i].y);
            y1 = std::max(y1, mesh.vertices[i].y);
        }
        const int i0 = std::max(0, column_of(x0, box.min.x, size.x)), i1 = std::min(res - 1, column_of(x1, box.min.x, size.x) + 1);
        const int j0 = std::max(0, column_of(y0, box.min.y, size.y)), j1 = std::min(res - 1, column_of(y1, box.min.y, size.y) + 1);
        for (int j = j0; j <= j1; ++j) {
            for (int i = i0; i <= i1; ++i) columns[static_cast<std::size_t>(j) * res + i].push_back(t);
        }
    }
    std::size_t count = 0;
    std::vector<double> hits;
    for (int j = 0; j < res; ++j) {
        for (int i = 0; i < res; ++i) {
            const double x = cell_centre(box.min.x, size.x, res, i, kJitterX);
            const double y = cell_centre(box.min.y, size.y, res, j, kJitterY);
            hits.clear();
            for (auto t : columns[static_cast<std::size_t>(j) * res + i]) {
                const Vec3 a = mesh.vertices[mesh.triangles[t][0]];
                const Vec3 b = mesh.vertices[mesh.triangles[t][1]];
                const Vec3 c = mesh.vertices[mesh.triangles[t][2]];
                const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
                if (det == 0.0) continue;
                const double u = ((x - a.x) * (c.y - a.y) - (c.x - a.x) * (y - a.y)) / det;
                const double v = ((b.x - a.x) * (y - a.y) - (x - a.x) * (b.y - a.y)) / det;
                if (u < 0.0 || v < 0.0 || u + v > 1.0) continue;
                hits.push_back(a.z + u * (b.z - a.z) + v * (c.z - a.z));
            }
            std::sort(hits.begin(), hits.end());
            for (std::size_t h = 0; h + 1 < hits.size(); h += 2) {
                for (int k = 0; k < res; ++k) {
                    const double z = cell_centre(box.min.z, size.z, res, k, kJitterZ);
                    if (z >= hits[h] && z <= hits[h + 1]) ++count;
                }
            }
        }
    }
    return count;
}

HotwirePlan plan_hotwire(const TriangleMesh& mesh, const WorkflowParams& params) {
    const double step = param_number(params, "path_step");
    const double lead = param_number(params, "lead_in");
    const double margin = param_number(params, "block_margin");
    const bool both = param_text(params, "directions") == "x_and_y";

    HotwirePlan plan;
    plan.mesh_bounds = mesh.bounds();
    plan.block = {plan.mesh_bounds.min - Vec3{margin, margin, margin}, plan.mesh_bounds.max + Vec3{margin, margin, margin}};
    for (char axis : both ? std::string("xy") : std::string("x")) {
        std::vector<Vec2> pts;
        pts.reserve(mesh.vertices.size());
        for (const Vec3& v : mesh.vertices) pts.push_back(project(axis, v));
        HotwireCut cut;
        cut.axis = axis;
        try {
            cut.silhouette = convex_hull_2d(pts);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::DegenerateInput) throw;
            plan.warnings.push_back({"DegenerateInput", Severity::Blocker,
                                     fmt::format("the model is flat when seen along {}; there is no profile to cut", axis)});
            continue;
        }
        cut.block_profile = {project(axis, plan.block.min), project(axis, plan.block.max)};
        cut.path = cut_path(cut.silhouette, cut.block_profile, step, lead);
        plan.cuts.push_back(std::move(cut));
    }
    if (plan.cuts.size() != (both ? 2u : 1u)) {
        plan.fidelity = 0.0;
        return plan;
    }

    plan.approx_volume = approximation_volume(plan);
    plan.mesh_voxels = voxel_count_mesh(mesh, plan.block);
    const Vec3 size = plan.block.extent();
    for (int k = 0; k < kVoxelResolution; ++k) {
        const auto e = extents_at(plan, cell_centre(plan.block.min.z, size.z, kVoxelResolution, k, kJitterZ));
        if (!e) continue;
        std::size_t nx = 0, ny = 0;
        for (int i = 0; i < kVoxelResolution; ++i) {
            const double x = cell_centre(plan.block.min.x, size.x, kVoxelResolution, i, kJitterX);
            const double y = cell_centre(plan.block.min.y, size.y, kVoxelResolution, i, kJitterY);
            nx += x >= e->first.first && x <= e->first.second;
            ny += y >= e->second.first && y <= e->second.second;
        }
        plan.approx_voxels += nx * ny;
    }
    // Both solids are sampled on one grid so that discretisation error cancels.
    double f = plan.mesh_voxels > 0 && plan.approx_voxels > 0
                   ? static_cast<double>(plan.mesh_voxels) / static_cast<double>(plan.approx_voxels)
                   : (plan.approx_volume > 0.0 ? mesh_volume(mesh) / plan.approx_volume : 0.0);
    plan.fidelity = std::clamp(f, 0.0, 1.0);

    const double floor = param_number(params, "fidelity_floor");
    if (plan.fidelity < floor) {
        plan.warnings.push_back({"ConcavityLoss", Severity::Caution,
                                 fmt::format("straight hot-wire cuts keep only {:.1f}% of the shape (below the {:.0f}% "
                                             "floor); concave details will be lost",
                                             100 * plan.fidelity, 100 * floor)});
    }
    return plan;
}

WorkflowOutput gen_hotwire(const TriangleMesh& mesh, const WorkflowParams& params, const DocLinks& links) {
    HotwirePlan plan = plan_hotwire(mesh, params);
    WorkflowOutput out;
    double cut_total = 0.0;
    std::vector<std::vector<std::string>> per_cut;
    for (const auto& cut : plan.cuts) {
        const std::string csv = fmt::format("hotwire_{}.csv", cut.axis);
        const std::string svg = fmt::format("profile_{}.svg", cut.axis);
        out.artifacts.push_back({csv, ArtifactFormat::Csv, export_points_csv(cut.path)});
        SheetLayout layout{cut.block_profile.width(), cut.block_profile.height(), {}};
        Placement p;
        p.part_id = fmt::format("profile_{}", cut.axis);
        p.translation = Vec2{} - cut.block_profile.min;
        p.polygons = PolygonSet{{cut.silhouette}}.translated(p.translation);
        p.label = std::string(1, static_cast<char>(std::toupper(cut.axis)));
        const Aabb2 hb = *contour_bounds(cut.silhouette);
        p.label_anchor = Vec2{(hb.min.x + hb.max.x) / 2, (hb.min.y + hb.max.y) / 2} + p.translation;
        layout.placements.push_back(std::move(p));
        out.artifacts.push_back({svg, ArtifactFormat::Svg, export_svg(layout)});
        per_cut.push_back({csv, svg});
        cut_total += path_length(cut.path);
    }
    TriangleMesh approx = approximation_mesh(plan);
    if (!approx.triangles.empty()) {
        out.artifacts.push_back({"approximation.stl", ArtifactFormat::Stl, write_stl(approx, false)});
        out.preview.push_back({"approximation", "part", approx});
    }
    TriangleMesh model = mesh;
    model.name = "model";
    out.preview.push_back({"model", "model", std::move(model)});

    const Vec3 b = plan.block.extent();
    int index = 0;
    out.guide.steps.push_back({++index, "Mount the foam block",
                               fmt::format("Cut a foam block of at least {:.0f} x {:.0f} x {:.0f} mm and fix it to the "
                                           "cutter table.",
                                           std::ceil(b.x), std::ceil(b.y), std::ceil(b.z)),
                               {}, links, {"hot wire cutter", "foam block"}});
    for (std::size_t k = 0; k < plan.cuts.size(); ++k) {
        if (k > 0) {
            out.guide.steps.push_back({++index, "Rotate the block",
                                       "Turn the block 90 degrees about the vertical axis, keeping the first cut's offcuts "
                                       "taped in place so it sits flat.",
                                       {}, {}, {"tape"}});
        }
        out.guide.steps.push_back({++index, fmt::format("Cut profile {}", static_cast<char>(std::toupper(plan.cuts[k].axis))),
                                   fmt::format("Follow the path in {} with the wire running along {}; start at the lead-in "
                                               "outside the block.",
                                               per_cut[k][0], plan.cuts[k].axis),
                                   per_cut[k], {}, {"hot wire cutter"}});
    }
    out.guide.steps.push_back({++index, "Sand", "Remove the offcuts and sand the faceted surface.", {}, {}, {"sandpaper"}});

    out.warnings = std::move(plan.warnings);
    out.metrics.part_count = 1;
    out.metrics.material_volume = b.x * b.y * b.z;
    out.metrics.total_cut_length = cut_total;
    out.metrics.estimated_fidelity = plan.fidelity;
    return out;
}

}  // namespace camforge
