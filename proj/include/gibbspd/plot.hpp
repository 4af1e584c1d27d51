#pragma once

#include <filesystem>

#include "gibbspd/homology.hpp"
#include "gibbspd/sampler.hpp"

namespace gibbspd {

/// Render a tilted diagram as a standalone SVG with birth/persistence axes.
void plot_diagram_svg(const PersistenceDiagram& diagram, const Window& window,
                      const std::filesystem::path& path);

/// Render two recorded iterates (nearest to the requested iterations) side
/// by side.
void plot_samples_svg(const SampleSet& samples, const Window& window,
                      std::int64_t first_iterate, std::int64_t second_iterate,
                      const std::filesystem::path& path);

}  // namespace gibbspd
