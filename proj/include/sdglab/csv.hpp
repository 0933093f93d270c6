#ifndef SDGLAB_CSV_HPP
#define SDGLAB_CSV_HPP

#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace sdglab::csv {

// Reads one CSV record (RFC 4180 quoting, may span lines). nullopt at EOF.
std::optional<std::vector<std::string>> read_record(std::istream& in);

std::string escape(const std::string& field);

std::string join(const std::vector<std::string>& fields);

}  // namespace sdglab::csv

#endif
