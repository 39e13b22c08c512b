#include "narrator/csv.hpp"

#include <istream>

namespace narrator {

bool CsvReader::next(std::vector<std::string>& fields) {
    fields.clear();
    int c = in_.get();
    if (c == std::istream::traits_type::eof()) return false;

    std::string field;
    bool quoted = false;
    bool any = false;

    auto end_field = [&] {
        fields.push_back(std::move(field));
        field.clear();
    };

    while (true) {
        if (c == std::istream::traits_type::eof()) {
            end_field();
            break;
        }
        const char ch = static_cast<char>(c);
        if (quoted) {
            if (ch == '"') {
                const int peek = in_.peek();
                if (peek == '"') {
                    field += '"';
                    in_.get();
                } else {
                    quoted = false;
                }
            } else {
                field += ch;
            }
        } else if (ch == '"' && field.empty() && !any) {
            quoted = true;
        } else if (ch == ',') {
            end_field();
            any = false;
            c = in_.get();
            continue;
        } else if (ch == '\n') {
            if (!field.empty() && field.back() == '\r') field.pop_back();
            end_field();
            break;
        } else {
            field += ch;
        }
        any = true;
        c = in_.get();
    }
    ++record_;
    return true;
}

std::vector<std::vector<std::string>> read_csv(std::istream& in) {
    CsvReader reader(in);
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> fields;
    while (reader.next(fields)) rows.push_back(fields);
    return rows;
}

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

}  // namespace narrator
