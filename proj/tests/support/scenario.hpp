#pragma once

#include <filesystem>

#include "properties.hpp"

namespace props {

/// A ten-minute talk for a lay audience built entirely over HTTP: constraints,
/// five sections (one reused from an earlier talk), a jargon check, an edit of
/// the reused material kept as a new version, and a final save. Checks the
/// resulting repository against a scripted expectation.
Outcome alice_scenario(const std::filesystem::path& fixtures_dir);

} // namespace props
