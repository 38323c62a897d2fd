#include "topictrend/error.hpp"

namespace topictrend {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::config_error: return "config_error";
    case Errc::parse_error: return "parse_error";
    case Errc::io_error: return "io_error";
    case Errc::dimension_mismatch: return "dimension_mismatch";
    case Errc::non_finite: return "non_finite";
    case Errc::duplicate_id: return "duplicate_id";
    case Errc::empty_intersection: return "empty_intersection";
    case Errc::undefined_validity: return "undefined_validity";
    case Errc::no_valid_configuration: return "no_valid_configuration";
    case Errc::no_classes: return "no_classes";
    case Errc::empty_class: return "empty_class";
    case Errc::no_searchable_terms: return "no_searchable_terms";
    case Errc::topic_not_found: return "topic_not_found";
    case Errc::date_before_origin: return "date_before_origin";
    case Errc::no_bins_in_interval: return "no_bins_in_interval";
    case Errc::window_too_narrow: return "window_too_narrow";
    case Errc::empty_group: return "empty_group";
    case Errc::degenerate_ties: return "degenerate_ties";
    case Errc::artifact_exists: return "artifact_exists";
    case Errc::corrupt_artifact: return "corrupt_artifact";
    case Errc::unsupported_version: return "unsupported_version";
  }
  return "unknown";
}

}  // namespace topictrend
