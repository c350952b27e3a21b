#pragma once

#include <filesystem>
#include <string>

#include "dsahs/decomposer.hpp"
#include "dsahs/model.hpp"
#include "dsahs/verifier.hpp"

namespace dsahs {

/// SVG picture of a decomposition. One element per via (class "via mask-N"),
/// one capsule per group (class "group mask-N"), one line per unresolved
/// conflict (class "conflict") and one frame per realized hotspot (class
/// "hotspot"). Output bytes depend only on the inputs.
std::string render_svg(const Layout& layout, const Decomposition& decomposition, const ViolationReport& report,
                       const TechParams& tech);

void write_svg(const std::filesystem::path& path, const Layout& layout, const Decomposition& decomposition,
               const ViolationReport& report, const TechParams& tech);

}  // namespace dsahs
