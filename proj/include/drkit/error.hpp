#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace drkit {

// Stable error codes, one per failure mode the library reports.
enum class Errc {
    // ingestion / matrix construction
    duplicate_key,
    empty_input,
    missing_cell,
    same_domain,
    no_shifts,
    empty_source_group,
    // statistics
    constant_input,
    constant_predictor,
    length_mismatch,
    insufficient_data,
    empty_counts,
    all_zero,
    // analysis
    too_few_shifts,
    all_degenerate,
    k_too_large,
    missing_divergence,
    // theorem
    invalid_probabilities,
    too_few_domains,
    invalid_config,
    assertion_failure,
    // divergence
    empty_after_filtering,
    support_mismatch,
    // io
    schema_error,
    score_out_of_range,
    write_failure,
    unpopulated_section,
};

constexpr std::string_view to_string(Errc c) {
    switch (c) {
        case Errc::duplicate_key: return "duplicate_key";
        case Errc::empty_input: return "empty_input";
        case Errc::missing_cell: return "missing_cell";
        case Errc::same_domain: return "same_domain";
        case Errc::no_shifts: return "no_shifts";
        case Errc::empty_source_group: return "empty_source_group";
        case Errc::constant_input: return "constant_input";
        case Errc::constant_predictor: return "constant_predictor";
        case Errc::length_mismatch: return "length_mismatch";
        case Errc::insufficient_data: return "insufficient_data";
        case Errc::empty_counts: return "empty_counts";
        case Errc::all_zero: return "all_zero";
        case Errc::too_few_shifts: return "too_few_shifts";
        case Errc::all_degenerate: return "all_degenerate";
        case Errc::k_too_large: return "k_too_large";
        case Errc::missing_divergence: return "missing_divergence";
        case Errc::invalid_probabilities: return "invalid_probabilities";
        case Errc::too_few_domains: return "too_few_domains";
        case Errc::invalid_config: return "invalid_config";
        case Errc::assertion_failure: return "assertion_failure";
        case Errc::empty_after_filtering: return "empty_after_filtering";
        case Errc::support_mismatch: return "support_mismatch";
        case Errc::schema_error: return "schema_error";
        case Errc::score_out_of_range: return "score_out_of_range";
        case Errc::write_failure: return "write_failure";
        case Errc::unpopulated_section: return "unpopulated_section";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace drkit
