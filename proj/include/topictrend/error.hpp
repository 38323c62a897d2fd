#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace topictrend {

// Every failure raised by the library carries one of these codes. The service
// maps them to HTTP statuses and the CLI to exit codes.
enum class Errc {
  invalid_argument,
  config_error,
  parse_error,
  io_error,
  dimension_mismatch,
  non_finite,
  duplicate_id,
  empty_intersection,
  undefined_validity,
  no_valid_configuration,
  no_classes,
  empty_class,
  no_searchable_terms,
  topic_not_found,
  date_before_origin,
  no_bins_in_interval,
  window_too_narrow,
  empty_group,
  degenerate_ties,
  artifact_exists,
  corrupt_artifact,
  unsupported_version,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const { return code_; }
  std::string_view name() const { return errc_name(code_); }

 private:
  Errc code_;
};

}  // namespace topictrend
