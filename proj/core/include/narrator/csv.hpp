#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace narrator {

// Minimal RFC-4180 reader: comma separated, double-quote quoting with ""
// escapes, quoted fields may span lines, CRLF tolerated, UTF-8 passthrough.
class CsvReader {
public:
    explicit CsvReader(std::istream& in) : in_(in) {}

    // Reads the next record into `fields`. Returns false at end of input.
    // `record_number()` is 1-based and counts the header as record 1.
    bool next(std::vector<std::string>& fields);

    int record_number() const { return record_; }

private:
    std::istream& in_;
    int record_ = 0;
};

// Convenience: parse a whole stream. First record is the header.
std::vector<std::vector<std::string>> read_csv(std::istream& in);

// RFC-4180 quoting for one field (quotes only when needed).
std::string csv_quote(const std::string& field);

}  // namespace narrator
