#ifndef BAYESCANCEL_CSV_HPP
#define BAYESCANCEL_CSV_HPP

#include <string>
#include <vector>

namespace bayescancel::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// RFC-4180 reader: quoted fields, doubled quotes, CRLF and bare-LF line
/// endings, embedded newlines inside quotes. The first record is the header.
Table read_file(const std::string& path);

Table parse(const std::string& text, const std::string& origin = "<string>");

/// Quotes a field when it contains a comma, quote, or newline.
std::string escape(const std::string& field);

std::string join_row(const std::vector<std::string>& fields);

}  // namespace bayescancel::csv

#endif
