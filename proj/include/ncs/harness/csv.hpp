#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace ncs {

/// 17 significant digits, '.' decimal separator, independent of locale.
std::string format_real(double x);

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string csv_field(std::string_view s);

/// Writes one RFC 4180 style row terminated by LF.
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace ncs
