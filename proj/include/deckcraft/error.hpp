#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"

namespace deckcraft {

using Json = nlohmann::ordered_json;

/// Every failure the engine can report. Each code has exactly one stable
/// wire name (see code_name) used by the HTTP service and the CLI.
enum class Errc {
    invalid_duration,
    invalid_audience,
    invalid_bounds,
    invalid_deck,
    position_out_of_range,
    not_a_permutation,
    unknown_presentation,
    unknown_section,
    unknown_slide,
    unknown_element,
    malformed_document,
    unsupported_schema_version,
    unknown_entry,
    unknown_lineage,
    unknown_version,
    unknown_asset,
    granularity_mismatch,
    invalid_decision,
    no_lineage,
    empty_query,
    empty_slide,
    duplicate_lexicon_term,
    provider_error,
    storage_failure,
    store_locked,
    config_error,
    revision_conflict,
    bad_request,
    not_found,
};

std::string_view code_name(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message, Json details = nullptr)
        : std::runtime_error(message), code_(code), details_(std::move(details)) {}

    Errc code() const noexcept { return code_; }
    const Json& details() const noexcept { return details_; }

private:
    Errc code_;
    Json details_;
};

} // namespace deckcraft
