#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace spmm {

enum class Algorithm : std::uint8_t { RowSplit, MergeBased, Reference, DenseGemm };

const char* to_string(Algorithm algo) noexcept;

/// Accepts "rowsplit", "merge" and "reference" (case-sensitive, as on the
/// command line) plus the names produced by to_string.
std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept;

}  // namespace spmm
