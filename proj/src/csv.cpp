#include "bayescancel/csv.hpp"

#include <fstream>
#include <sstream>

#include "bayescancel/errors.hpp"

namespace bayescancel::csv {

Table parse(const std::string& text, const std::string& origin) {
  Table table;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool any_field = false;

  auto end_field = [&] {
    record.push_back(field);
    field.clear();
    any_field = false;
  };
  auto end_record = [&] {
    end_field();
    if (table.header.empty()) {
      table.header = std::move(record);
    } else {
      table.rows.push_back(std::move(record));
    }
    record.clear();
  };

  const std::size_t n = text.size();
  std::size_t i = 0;
  bool at_record_start = true;
  while (i < n) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < n && text[i + 1] == '"') {
          field.push_back('"');
          i += 2;
        } else {
          in_quotes = false;
          ++i;
        }
      } else {
        field.push_back(ch);
        ++i;
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (!field.empty()) {
          throw ParseError(origin + ": stray quote inside unquoted field");
        }
        in_quotes = true;
        any_field = true;
        ++i;
        break;
      case ',':
        end_field();
        any_field = true;  // a comma implies a following (possibly empty) field
        ++i;
        break;
      case '\r':
        if (i + 1 < n && text[i + 1] == '\n') ++i;
        [[fallthrough]];
      case '\n':
        if (!at_record_start || any_field || !field.empty() || !record.empty()) {
          end_record();
        }
        ++i;
        at_record_start = true;
        continue;
      default:
        field.push_back(ch);
        any_field = true;
        ++i;
        break;
    }
    at_record_start = false;
  }
  if (in_quotes) throw ParseError(origin + ": unterminated quoted field");
  if (!field.empty() || !record.empty() || any_field) end_record();
  return table;
}

Table read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

std::string escape(const std::string& field) {
  const bool needs_quotes =
      field.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string join_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += escape(fields[i]);
  }
  return out;
}

}  // namespace bayescancel::csv
