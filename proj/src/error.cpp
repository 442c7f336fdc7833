#include "deckcraft/error.hpp"

namespace deckcraft {

std::string_view code_name(Errc code) {
    switch (code) {
    case Errc::invalid_duration: return "invalid_duration";
    case Errc::invalid_audience: return "invalid_audience";
    case Errc::invalid_bounds: return "invalid_bounds";
    case Errc::invalid_deck: return "invalid_deck";
    case Errc::position_out_of_range: return "position_out_of_range";
    case Errc::not_a_permutation: return "not_a_permutation";
    case Errc::unknown_presentation: return "unknown_presentation";
    case Errc::unknown_section: return "unknown_section";
    case Errc::unknown_slide: return "unknown_slide";
    case Errc::unknown_element: return "unknown_element";
    case Errc::malformed_document: return "malformed_document";
    case Errc::unsupported_schema_version: return "unsupported_schema_version";
    case Errc::unknown_entry: return "unknown_entry";
    case Errc::unknown_lineage: return "unknown_lineage";
    case Errc::unknown_version: return "unknown_version";
    case Errc::unknown_asset: return "unknown_asset";
    case Errc::granularity_mismatch: return "granularity_mismatch";
    case Errc::invalid_decision: return "invalid_decision";
    case Errc::no_lineage: return "no_lineage";
    case Errc::empty_query: return "empty_query";
    case Errc::empty_slide: return "empty_slide";
    case Errc::duplicate_lexicon_term: return "duplicate_lexicon_term";
    case Errc::provider_error: return "provider_error";
    case Errc::storage_failure: return "storage_failure";
    case Errc::store_locked: return "store_locked";
    case Errc::config_error: return "config_error";
    case Errc::revision_conflict: return "revision_conflict";
    case Errc::bad_request: return "bad_request";
    case Errc::not_found: return "not_found";
    }
    return "unknown";
}

} // namespace deckcraft
