#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "psiflow/circle_ode.hpp"
#include "psiflow/curve.hpp"

namespace psiflow {

// Overlaid curve snapshots colored from early (blue) to late (red); an
// optional dashed circle marks the predicted limit.
void write_curve_overlay_svg(
    const std::string& path,
    const std::vector<std::pair<double, DiscreteCurve>>& snapshots,
    std::optional<double> limit_circle_radius = std::nullopt);

// Drift profile over the radius axis with arrows showing the motion of
// origin-centered circles and A/R/S markers on the psi-minimal radii.
void write_phase_portrait_svg(const std::string& path, const PhasePortrait& pp);

void write_phase_portrait_csv(const std::string& path, const PhasePortrait& pp);

}  // namespace psiflow
