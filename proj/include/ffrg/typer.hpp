#pragma once

#include <string_view>

#include "ffrg/data_type.hpp"

namespace ffrg {

/// Rule-based data-type tagger used as the value-eligibility gate.
///
/// money  : optional currency symbol/code around an amount that has either a
///          currency marker, two decimals, or thousands grouping; always
///          reported together with number.
/// date   : numeric dates with separators (01/31/2020, 2020-01-31, 31.01.20)
///          and month-name forms (Jan 31, 2020 / 31 January 2020 / 31-Jan-2020).
/// number : digit-dominated tokens with separators or a leading '#', and
///          invoice-number style ids (up to 3 letters, then 3+ digits).
/// other  : nothing matched; exclusive.
///
/// Throws ValidationError for empty or all-whitespace text.
DataTypeSet type_of(std::string_view text);

} // namespace ffrg
