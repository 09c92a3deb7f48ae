#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "camforge/error.hpp"
#include "camforge/export.hpp"

namespace camforge {

namespace {

// Deepest point of a coarse interior grid, so labels sit inside material.
Vec2 label_anchor(const PolygonSet& p, const Aabb2& box) {
    Vec2 best{(box.min.x + box.max.x) / 2, (box.min.y + box.max.y) / 2};
    double best_d = -1.0;
    constexpr int kGrid = 16;
    for (int i = 0; i < kGrid; ++i) {
        for (int j = 0; j < kGrid; ++j) {
            const Vec2 q{box.min.x + box.width() * (i + 0.5) / kGrid, box.min.y + box.height() * (j + 0.5) / kGrid};
            if (!p.contains(q)) continue;
            const double d = distance_to_boundary(p, q);
            if (d > best_d) {
                best_d = d;
                best = q;
            }
        }
    }
    return best;
}

}  // namespace

std::vector<SheetLayout> pack_sheets(std::vector<PackPart> parts, double sheet_w, double sheet_h, double gap) {
    struct Item {
        PackPart part;
        Aabb2 box;
    };
    std::vector<Item> items;
    for (auto& part : parts) {
        const auto box = part.polygons.bounds();
        if (!box) continue;
        if (box->width() + gap > sheet_w || box->height() + gap > sheet_h) {
            throw Error(ErrorCode::PartTooLarge,
                        fmt::format("part '{}' ({:.3f} x {:.3f} mm plus {} mm gap) does not fit a {} x {} mm sheet",
                                    part.id, box->width(), box->height(), gap, sheet_w, sheet_h));
        }
        items.push_back({std::move(part), *box});
    }
    std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        if (a.box.height() != b.box.height()) return a.box.height() > b.box.height();
        return a.part.id < b.part.id;
    });

    std::vector<SheetLayout> sheets;
    double x = 0.0, y = 0.0, shelf_h = 0.0;
    for (auto& item : items) {
        const double w = item.box.width();
        const double h = item.box.height();
        if (!sheets.empty() && x + w + gap > sheet_w) {
            y += shelf_h + gap;
            x = 0.0;
            shelf_h = 0.0;
        }
        if (sheets.empty() || y + h + gap > sheet_h) {
            sheets.push_back({sheet_w, sheet_h, {}});
            x = y = shelf_h = 0.0;
        }
        const Vec2 shift = Vec2{x, y} - item.box.min;
        Placement p;
        p.part_id = item.part.id;
        p.translation = shift;
        p.polygons = item.part.polygons.translated(shift);
        p.label = item.part.label;
        p.label_anchor = label_anchor(item.part.polygons, item.box) + shift;
        sheets.back().placements.push_back(std::move(p));
        x += w + gap;
        shelf_h = std::max(shelf_h, h);
    }
    return sheets;
}

}  // namespace camforge
